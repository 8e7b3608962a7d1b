/* A compact CDCL SAT solver for DIMACS CNF.
 *
 * Features: two-watched-literal propagation, first-UIP clause learning with
 * self-subsumption minimization, VSIDS decision heap, phase saving, Luby
 * restarts, and LBD-based learned-clause deletion.
 *
 * Output follows SAT-competition conventions:
 *   s SATISFIABLE / s UNSATISFIABLE
 *   v <lit> ... v 0           (model, when satisfiable)
 * Exit code 10 = SAT, 20 = UNSAT, 1 = usage/parse error.
 */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

/* ------------------------------------------------------------------ */
/* dynamic int vector                                                  */
typedef struct {
    int *data;
    int size, cap;
} Vec;

static void vec_push(Vec *v, int x)
{
    if (v->size == v->cap) {
        v->cap = v->cap ? 2 * v->cap : 8;
        v->data = realloc(v->data, (size_t)v->cap * sizeof(int));
        if (!v->data) { fprintf(stderr, "c out of memory\n"); exit(1); }
    }
    v->data[v->size++] = x;
}

/* ------------------------------------------------------------------ */
/* clauses live in one growable arena of ints:                         */
/*   [size][lbd][lit0][lit1]...   (lbd < 0 marks an original clause)   */
typedef int Cref;

static int *arena;
static long arena_size, arena_cap;

static Cref arena_alloc(const int *lits, int size, int lbd)
{
    long need = arena_size + size + 2;
    if (need > arena_cap) {
        arena_cap = arena_cap ? arena_cap : 1 << 16;
        while (arena_cap < need)
            arena_cap *= 2;
        arena = realloc(arena, (size_t)arena_cap * sizeof(int));
        if (!arena) { fprintf(stderr, "c out of memory\n"); exit(1); }
    }
    Cref c = (Cref)arena_size;
    arena[arena_size++] = size;
    arena[arena_size++] = lbd;
    memcpy(arena + arena_size, lits, (size_t)size * sizeof(int));
    arena_size += size;
    return c;
}

#define CL_SIZE(c) (arena[c])
#define CL_LBD(c) (arena[(c) + 1])
#define CL_LITS(c) (arena + (c) + 2)

/* ------------------------------------------------------------------ */
static int nvars;
static signed char *assigns;  /* 1-indexed: 0 unassigned, +1 true, -1 false */
static signed char *phase;
static int *level;
static Cref *reason;          /* -1 = decision/none */
static int *trail, trail_size;
static int *trail_lim, decision_level;
static int qhead;

static Vec *watches; /* indexed by 2*var + (lit<0) */
static Vec learnts;  /* crefs of learned clauses */
static Vec units;    /* top-level units from the input */

static double *activity;
static double var_inc = 1.0;

/* binary heap over variables ordered by activity */
static int *heap, heap_size;
static int *heap_pos; /* -1 when absent */

static unsigned char *seen;
static long n_conflicts;

#define WIDX(lit) (2 * abs(lit) + ((lit) < 0))
#define LIT_VALUE(lit) ((lit) > 0 ? assigns[(lit)] : (signed char)(-assigns[-(lit)]))

/* ---------------- heap ------------------------------------------- */
static int heap_less(int a, int b) { return activity[a] > activity[b]; }

static void heap_up(int i)
{
    int v = heap[i];
    while (i > 0) {
        int p = (i - 1) / 2;
        if (!heap_less(v, heap[p]))
            break;
        heap[i] = heap[p];
        heap_pos[heap[i]] = i;
        i = p;
    }
    heap[i] = v;
    heap_pos[v] = i;
}

static void heap_down(int i)
{
    int v = heap[i];
    for (;;) {
        int c = 2 * i + 1;
        if (c >= heap_size)
            break;
        if (c + 1 < heap_size && heap_less(heap[c + 1], heap[c]))
            c++;
        if (!heap_less(heap[c], v))
            break;
        heap[i] = heap[c];
        heap_pos[heap[i]] = i;
        i = c;
    }
    heap[i] = v;
    heap_pos[v] = i;
}

static void heap_insert(int v)
{
    if (heap_pos[v] >= 0)
        return;
    heap[heap_size] = v;
    heap_pos[v] = heap_size;
    heap_size++;
    heap_up(heap_pos[v]);
}

static int heap_pop(void)
{
    int v = heap[0];
    heap_pos[v] = -1;
    heap_size--;
    if (heap_size > 0) {
        heap[0] = heap[heap_size];
        heap_pos[heap[0]] = 0;
        heap_down(0);
    }
    return v;
}

static void bump_var(int v)
{
    activity[v] += var_inc;
    if (activity[v] > 1e100) {
        for (int i = 1; i <= nvars; i++)
            activity[i] *= 1e-100;
        var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0)
        heap_up(heap_pos[v]);
}

/* ---------------- assignment ------------------------------------- */
static void enqueue(int lit, Cref from)
{
    int v = abs(lit);
    assigns[v] = (signed char)(lit > 0 ? 1 : -1);
    level[v] = decision_level;
    reason[v] = from;
    trail[trail_size++] = lit;
}

static void watch_clause(Cref c)
{
    int *lits = CL_LITS(c);
    vec_push(&watches[WIDX(lits[0])], c);
    vec_push(&watches[WIDX(lits[1])], c);
}

/* returns conflicting clause or -1 */
static Cref propagate(void)
{
    while (qhead < trail_size) {
        int lit = trail[qhead++];
        Vec *ws = &watches[WIDX(-lit)];
        int i = 0, j = 0;
        while (i < ws->size) {
            Cref c = ws->data[i++];
            int *lits = CL_LITS(c);
            int size = CL_SIZE(c);
            /* make sure the false literal is lits[1] */
            if (lits[0] == -lit) {
                lits[0] = lits[1];
                lits[1] = -lit;
            }
            if (LIT_VALUE(lits[0]) == 1) { /* satisfied by other watch */
                ws->data[j++] = c;
                continue;
            }
            int k, moved = 0;
            for (k = 2; k < size; k++) {
                if (LIT_VALUE(lits[k]) != -1) {
                    lits[1] = lits[k];
                    lits[k] = -lit;
                    vec_push(&watches[WIDX(lits[1])], c);
                    moved = 1;
                    break;
                }
            }
            if (moved)
                continue;
            ws->data[j++] = c; /* keep watching */
            if (LIT_VALUE(lits[0]) == -1) { /* conflict */
                while (i < ws->size)
                    ws->data[j++] = ws->data[i++];
                ws->size = j;
                qhead = trail_size;
                return c;
            }
            enqueue(lits[0], c);
        }
        ws->size = j;
    }
    return -1;
}

static void backtrack(int lvl)
{
    if (decision_level <= lvl)
        return;
    for (int i = trail_size - 1; i >= trail_lim[lvl]; i--) {
        int v = abs(trail[i]);
        phase[v] = assigns[v];
        assigns[v] = 0;
        reason[v] = -1;
        heap_insert(v);
    }
    trail_size = trail_lim[lvl];
    qhead = trail_size;
    decision_level = lvl;
}

/* ---------------- conflict analysis ------------------------------- */
static Vec learnt_clause;

static int lit_redundant(int lit)
{
    /* a learnt literal is redundant if its reason's literals are all
     * already seen (one-step self-subsumption) */
    int v = abs(lit);
    Cref r = reason[v];
    if (r < 0)
        return 0;
    int *lits = CL_LITS(r);
    for (int i = 0; i < CL_SIZE(r); i++) {
        int u = abs(lits[i]);
        if (u != v && !seen[u] && level[u] > 0)
            return 0;
    }
    return 1;
}

static int analyze(Cref confl, int *out_btlevel, int *out_lbd)
{
    learnt_clause.size = 0;
    vec_push(&learnt_clause, 0); /* slot for the asserting literal */
    int counter = 0, p = 0;
    int index = trail_size - 1;

    for (;;) {
        int *lits = CL_LITS(confl);
        int size = CL_SIZE(confl);
        for (int i = (p == 0 ? 0 : 1); i < size; i++) {
            int q = lits[i];
            int v = abs(q);
            if (seen[v] || level[v] == 0)
                continue;
            seen[v] = 1;
            bump_var(v);
            if (level[v] == decision_level)
                counter++;
            else
                vec_push(&learnt_clause, q);
        }
        /* pick next literal from trail */
        while (!seen[abs(trail[index])])
            index--;
        p = trail[index--];
        confl = reason[abs(p)];
        seen[abs(p)] = 0;
        counter--;
        if (counter == 0)
            break;
    }
    learnt_clause.data[0] = -p;

    /* minimize; clear seen for removed literals here, kept ones at the end */
    int j = 1;
    for (int i = 1; i < learnt_clause.size; i++) {
        int lit = learnt_clause.data[i];
        if (!lit_redundant(lit))
            learnt_clause.data[j++] = lit;
        else
            seen[abs(lit)] = 0;
    }
    learnt_clause.size = j;

    /* compute LBD and backtrack level */
    int lbd = 1;
    for (int i = 1; i < learnt_clause.size; i++) {
        int lv = level[abs(learnt_clause.data[i])];
        int dup = 0;
        for (int k = 1; k < i; k++)
            if (level[abs(learnt_clause.data[k])] == lv)
                dup = 1;
        if (!dup)
            lbd++;
    }
    *out_lbd = lbd;

    int btlevel = 0;
    if (learnt_clause.size > 1) {
        int max_i = 1;
        for (int i = 2; i < learnt_clause.size; i++)
            if (level[abs(learnt_clause.data[i])] >
                level[abs(learnt_clause.data[max_i])])
                max_i = i;
        int tmp = learnt_clause.data[1];
        learnt_clause.data[1] = learnt_clause.data[max_i];
        learnt_clause.data[max_i] = tmp;
        btlevel = level[abs(learnt_clause.data[1])];
    }
    *out_btlevel = btlevel;

    for (int i = 0; i < learnt_clause.size; i++)
        seen[abs(learnt_clause.data[i])] = 0;
    return learnt_clause.size;
}

/* ---------------- learned clause deletion -------------------------- */
static int cmp_lbd(const void *a, const void *b)
{
    Cref ca = *(const Cref *)a, cb = *(const Cref *)b;
    if (CL_LBD(ca) != CL_LBD(cb))
        return CL_LBD(cb) - CL_LBD(ca); /* worst (high lbd) first */
    return CL_SIZE(cb) - CL_SIZE(ca);
}

static int clause_locked(Cref c)
{
    int lit0 = CL_LITS(c)[0];
    return LIT_VALUE(lit0) == 1 && reason[abs(lit0)] == c;
}

static void detach_clause(Cref c)
{
    for (int w = 0; w < 2; w++) {
        Vec *ws = &watches[WIDX(CL_LITS(c)[w])];
        for (int i = 0; i < ws->size; i++)
            if (ws->data[i] == c) {
                ws->data[i] = ws->data[--ws->size];
                break;
            }
    }
}

static void reduce_db(void)
{
    qsort(learnts.data, (size_t)learnts.size, sizeof(Cref), cmp_lbd);
    int keep_from = learnts.size / 2;
    int j = 0;
    for (int i = 0; i < learnts.size; i++) {
        Cref c = learnts.data[i];
        if (i < keep_from && CL_LBD(c) > 2 && CL_SIZE(c) > 2 &&
            !clause_locked(c))
            detach_clause(c);
        else
            learnts.data[j++] = c;
    }
    learnts.size = j;
}

/* ---------------- restarts ---------------------------------------- */
static long luby(long x)
{
    /* the Luby sequence: 1 1 2 1 1 2 4 ... */
    long size, seq;
    for (size = 1, seq = 0; size < x + 1; seq++, size = 2 * size + 1)
        ;
    while (size - 1 != x) {
        size = (size - 1) / 2;
        seq--;
        x = x % size;
    }
    return 1L << seq;
}

/* ---------------- top level --------------------------------------- */
static int solve(void)
{
    long restart_num = 0;
    long conflicts_until_restart = 128 * luby(restart_num);
    long conflicts_this_restart = 0;
    long max_learnts = 4000;

    /* top-level units */
    for (int i = 0; i < units.size; i++) {
        int lit = units.data[i];
        signed char v = LIT_VALUE(lit);
        if (v == -1)
            return 0;
        if (v == 0)
            enqueue(lit, -1);
    }
    if (propagate() >= 0)
        return 0;

    for (;;) {
        Cref confl = propagate();
        if (confl >= 0) {
            n_conflicts++;
            conflicts_this_restart++;
            if (decision_level == 0)
                return 0;
            int btlevel, lbd;
            int size = analyze(confl, &btlevel, &lbd);
            backtrack(btlevel);
            if (size == 1) {
                enqueue(learnt_clause.data[0], -1);
            } else {
                Cref c = arena_alloc(learnt_clause.data, size, lbd);
                vec_push(&learnts, c);
                watch_clause(c);
                enqueue(learnt_clause.data[0], c);
            }
            var_inc /= 0.95;
        } else {
            if (conflicts_this_restart >= conflicts_until_restart) {
                restart_num++;
                conflicts_until_restart = 128 * luby(restart_num);
                conflicts_this_restart = 0;
                backtrack(0);
                continue;
            }
            if (learnts.size >= max_learnts) {
                reduce_db();
                max_learnts += 300;
            }
            /* decide */
            int next = 0;
            while (heap_size > 0) {
                int v = heap_pop();
                if (assigns[v] == 0) {
                    next = v;
                    break;
                }
            }
            if (next == 0)
                return 1; /* all assigned */
            trail_lim[decision_level++] = trail_size;
            enqueue(phase[next] >= 0 ? next : -next, -1);
        }
    }
}

/* ---------------- DIMACS parsing ----------------------------------- */
static int parse(FILE *f, int *empty_clause)
{
    int header_vars = 0;
    long header_clauses = 0;
    Vec lits = {0};
    int ch;

    while ((ch = fgetc(f)) != EOF) {
        if (ch == 'c') {
            while ((ch = fgetc(f)) != EOF && ch != '\n')
                ;
        } else if (ch == 'p') {
            if (fscanf(f, " cnf %d %ld", &header_vars, &header_clauses) != 2)
                return -1;
            nvars = header_vars;
            assigns = calloc((size_t)nvars + 1, 1);
            phase = calloc((size_t)nvars + 1, 1);
            level = calloc((size_t)nvars + 1, sizeof(int));
            reason = malloc(((size_t)nvars + 1) * sizeof(Cref));
            trail = malloc(((size_t)nvars + 1) * sizeof(int));
            trail_lim = malloc(((size_t)nvars + 2) * sizeof(int));
            activity = calloc((size_t)nvars + 1, sizeof(double));
            heap = malloc(((size_t)nvars + 1) * sizeof(int));
            heap_pos = malloc(((size_t)nvars + 1) * sizeof(int));
            seen = calloc((size_t)nvars + 1, 1);
            watches = calloc(2 * ((size_t)nvars + 1), sizeof(Vec));
            if (!reason || !trail || !trail_lim || !heap || !heap_pos ||
                !watches || !assigns || !phase || !level || !activity ||
                !seen)
                return -1;
            for (int v = 1; v <= nvars; v++) {
                reason[v] = -1;
                heap_pos[v] = -1;
                phase[v] = -1; /* default polarity: false */
            }
            for (int v = 1; v <= nvars; v++)
                heap_insert(v);
        } else if (ch == '-' || (ch >= '0' && ch <= '9')) {
            ungetc(ch, f);
            int lit;
            if (fscanf(f, "%d", &lit) != 1)
                return -1;
            if (lit == 0) {
                /* clause complete: dedupe, drop tautologies */
                int taut = 0, m = 0;
                for (int i = 0; i < lits.size && !taut; i++) {
                    int dup = 0;
                    for (int k = 0; k < m; k++) {
                        if (lits.data[k] == lits.data[i])
                            dup = 1;
                        if (lits.data[k] == -lits.data[i])
                            taut = 1;
                    }
                    if (!dup)
                        lits.data[m++] = lits.data[i];
                }
                if (!taut) {
                    if (m == 0)
                        *empty_clause = 1;
                    else if (m == 1)
                        vec_push(&units, lits.data[0]);
                    else
                        watch_clause(arena_alloc(lits.data, m, -1));
                }
                lits.size = 0;
            } else {
                if (abs(lit) > nvars)
                    return -1;
                vec_push(&lits, lit);
            }
        }
        /* whitespace: skip */
    }
    free(lits.data);
    return 0;
}

int main(int argc, char **argv)
{
    if (argc != 2) {
        fprintf(stderr, "usage: %s <file.cnf>\n", argv[0]);
        return 1;
    }
    FILE *f = fopen(argv[1], "r");
    if (!f) {
        fprintf(stderr, "c cannot open %s\n", argv[1]);
        return 1;
    }
    int empty_clause = 0;
    if (parse(f, &empty_clause) != 0) {
        fprintf(stderr, "c parse error\n");
        fclose(f);
        return 1;
    }
    fclose(f);

    int sat;
    if (empty_clause)
        sat = 0;
    else
        sat = solve();

    if (sat) {
        printf("s SATISFIABLE\n");
        printf("v");
        int col = 1;
        for (int v = 1; v <= nvars; v++) {
            int lit = assigns[v] >= 0 ? v : -v;
            char buf[16];
            int len = snprintf(buf, sizeof(buf), " %d", lit);
            if (col + len > 78) {
                printf("\nv");
                col = 1;
            }
            printf("%s", buf);
            col += len;
        }
        printf(" 0\n");
        return 10;
    }
    printf("s UNSATISFIABLE\n");
    return 20;
}
