"""CNF construction: axioms, problem constraints, symmetry breaking, DIMACS.

All orientation literals are routed through the symmetry class tables, so
emitted clauses only ever mention representative variables. Ordering
variables use one variable per unordered pair; the reverse direction is its
negation, which makes the totality and asymmetry axioms structural.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .symmetry import (
    A,
    B,
    C,
    CONTRADICTORY,
    FORCED_FALSE,
    ClassTable,
    SFold,
    is_lex_min_in_orbit,
    orbit_of_index_set,
)

GENERAL = "generalPosition"
COLLINEAR = "collinearAllowed"


class TrivialUnsatError(Exception):
    """The symmetry identifies an orientation literal with its own negation
    in general-position mode: no model exists and no CNF is emitted."""


@dataclass
class ProblemSpec:
    n: int
    mode: str = GENERAL
    no_kgon: int | None = None
    imbalance_at_least: int | None = None
    s: int = 1
    center: bool = False
    symmetry_breaking: bool = False
    q_clauses: bool = True
    conv_orbit_filtering: bool = True
    wlog_order: bool = False

    def __post_init__(self):
        if self.mode not in (GENERAL, COLLINEAR):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.wlog_order and self.s != 1:
            raise ValueError("wlogOrder conflicts with the s-fold variable "
                             "identification")
        if self.no_kgon is not None and self.mode != GENERAL:
            raise ValueError("noKGon requires general-position mode")
        if self.imbalance_at_least is not None and self.mode != COLLINEAR:
            raise ValueError("imbalanceAtLeast requires collinear mode")

    @property
    def sym(self) -> SFold | None:
        if self.s == 1:
            return None
        return SFold(self.n, self.s, center=self.center)


def problem_from_config(cfg: dict) -> ProblemSpec:
    known = {"n", "s", "center", "mode", "no_kgon", "imbalance_at_least",
             "symmetry_breaking", "q_clauses", "conv_orbit_filtering",
             "wlog_order"}
    extra = set(cfg) - known
    fields = {k: v for k, v in cfg.items() if k in known}
    if extra - {"solver", "search", "seed", "realize", "output"}:
        raise ValueError(f"unknown config keys: {sorted(extra)}")
    return ProblemSpec(**fields)


class VarTable:
    """Bijection between semantic variable names and contiguous DIMACS ids."""

    def __init__(self):
        self._id: dict = {}
        self._name: list = [None]  # 1-based

    def new(self, key) -> int:
        if key in self._id:
            raise KeyError(f"variable {key!r} allocated twice")
        vid = len(self._name)
        self._id[key] = vid
        self._name.append(key)
        return vid

    def id(self, key) -> int:
        return self._id[key]

    def __contains__(self, key) -> bool:
        return key in self._id

    def name(self, vid: int):
        return self._name[vid]

    def __len__(self) -> int:
        return len(self._name) - 1

    def items(self):
        return ((vid, self._name[vid]) for vid in range(1, len(self._name)))


def _format_var(key) -> str:
    tag, payload = key[0], key[1:]
    flat = []
    for part in payload:
        if isinstance(part, tuple):
            flat.extend(part)
        else:
            flat.append(part)
    return tag + "_" + "_".join(str(p) for p in flat)


@dataclass
class CnfFormula:
    vt: VarTable
    clauses: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    family_counts: dict = field(default_factory=dict)

    @property
    def nvars(self) -> int:
        return len(self.vt)

    def add(self, lits, family: str):
        """Add a clause; literals may include True (clause satisfied, drop)
        and False (literal dropped). Tautologies and duplicate literals are
        removed after substitution."""
        out = []
        for lit in lits:
            if lit is True:
                return
            if lit is False:
                continue
            out.append(lit)
        uniq = sorted(set(out), key=abs)
        seen = set(uniq)
        if any(-l in seen for l in uniq):
            return
        self.clauses.append(uniq)
        self.family_counts[family] = self.family_counts.get(family, 0) + 1


class Encoder:
    def __init__(self, spec: ProblemSpec):
        self.spec = spec
        self.n = spec.n
        self.sym = spec.sym
        regime = "general" if spec.mode == GENERAL else "collinear"
        self.table = ClassTable(spec.n, self.sym, regime=regime)
        self.vt = VarTable()
        self.formula = CnfFormula(self.vt)
        self.formula.meta["problem"] = spec
        self._conv_reps: list = []
        self._allocate_orientation_vars()
        self._allocate_ordering_vars()

    # ------------------------------------------------------------------
    def _allocate_orientation_vars(self):
        forced = []
        for cls in self.table.classes:
            if cls.status == CONTRADICTORY:
                raise TrivialUnsatError(
                    f"class of {cls.rep} contains its own negation")
            self.vt.new(("class",) + cls.rep)
            if cls.status == FORCED_FALSE:
                forced.append(cls)
        # A/B classes identified with their own mirror are false, and the
        # collided triples must be collinear; emitted as units so the DIMACS
        # file stands alone.
        for cls in forced:
            self.formula.add([-self.vt.id(("class",) + cls.rep)], "forced_units")
            for key in cls.forced_collinear:
                self.formula.add([self.olit(*key, kind=C)], "forced_units")

    def _allocate_ordering_vars(self):
        for i, j in itertools.combinations(range(1, self.n + 1), 2):
            self.vt.new(("ord", (i, j)))

    # literal resolution ------------------------------------------------
    def olit(self, i, j, k, kind=A, neg=False) -> int:
        cls, pol = self.table.lookup(i, j, k, kind)
        lit = pol * self.vt.id(("class",) + cls.rep)
        return -lit if neg else lit

    def prec(self, i, j, neg=False) -> int:
        """Literal for i comes before j."""
        if i < j:
            lit = self.vt.id(("ord", (i, j)))
        else:
            lit = -self.vt.id(("ord", (j, i)))
        return -lit if neg else lit

    # axiom families ----------------------------------------------------
    def encode_linear_order(self):
        add = self.formula.add
        for i, j, k in itertools.permutations(range(1, self.n + 1), 3):
            add([self.prec(i, j, neg=True), self.prec(j, k, neg=True),
                 self.prec(i, k)], "order_transitivity")

    def encode_wlog_order(self):
        """Pin the sweep order to the label order. The constraint families
        are invariant under relabeling, so this is satisfiability-preserving;
        it is rejected for s-fold identified variable spaces, whose rotation
        action does not commute with relabeling."""
        add = self.formula.add
        for i, j in itertools.combinations(range(1, self.n + 1), 2):
            add([self.prec(i, j)], "wlog_order_units")

    def encode_dynamic_ordering_axioms(self):
        add = self.formula.add
        for i, j, k, l in itertools.permutations(range(1, self.n + 1), 4):
            add([self.prec(i, k, neg=True), self.prec(j, k, neg=True),
                 self.prec(k, l, neg=True),
                 self.olit(i, j, k), self.olit(i, k, l, neg=True),
                 self.olit(j, k, l)], "orientation_axioms")
            if max(j, k) < l:
                add([self.prec(i, j, neg=True), self.prec(i, k, neg=True),
                     self.prec(i, l, neg=True),
                     self.olit(i, j, k), self.olit(i, j, l, neg=True),
                     self.olit(i, k, l)], "orientation_axioms_restricted")

    def encode_exactly_one(self):
        add = self.formula.add
        for t in itertools.combinations(range(1, self.n + 1), 3):
            a = self.olit(*t, kind=A)
            b = self.olit(*t, kind=B)
            c = self.olit(*t, kind=C)
            add([a, b, c], "exactly_one")
            add([-a, -b], "exactly_one")
            add([-a, -c], "exactly_one")
            add([-b, -c], "exactly_one")

    def encode_collinearity_axioms(self):
        """Four-point collinearity axioms plus the reversed-ordering analogs
        of the ordering-dependent ones."""
        add = self.formula.add
        n = self.n
        for i, j, k in itertools.combinations(range(1, n + 1), 3):
            c_ijk = self.olit(i, j, k, kind=C)
            for l in range(1, n + 1):
                if l in (i, j, k):
                    continue
                others = [tuple(sorted(t)) for t in
                          itertools.combinations((i, j, k, l), 3)
                          if tuple(sorted(t)) != (i, j, k)]
                # transitivity of collinearity (no ordering literals)
                for t1, t2 in itertools.combinations(others, 2):
                    c1 = self.olit(*t1, kind=C)
                    c2 = self.olit(*t2, kind=C)
                    add([-c_ijk, -c1, c2], "collinear_transitivity")
                    add([-c_ijk, -c2, c1], "collinear_transitivity")
                for rev in (False, True):
                    def pr(a, b):
                        return self.prec(b, a, neg=True) if rev \
                            else self.prec(a, b, neg=True)
                    # monotone order i-j-k: all relative orientations equal;
                    # literals written with the off-line point l last so the
                    # sign convention matches across the three triples
                    written = [(i, j, l), (i, k, l), (j, k, l)]
                    for t1, t2 in itertools.combinations(written, 2):
                        a1 = self.olit(*t1, kind=A)
                        a2 = self.olit(*t2, kind=A)
                        add([pr(i, j), pr(j, k), -c_ijk, -a1, a2],
                            "collinear_orientation")
                        add([pr(i, j), pr(j, k), -c_ijk, a1, -a2],
                            "collinear_orientation")
                    # order i-k-j: lines i->j and i->k agree, j->k opposes
                    pairs3 = [((i, j, l), A, (i, k, l), A),
                              ((i, j, l), A, (j, k, l), B)]
                    for t1, k1, t2, k2 in pairs3:
                        a1 = self.olit(*t1, kind=k1)
                        a2 = self.olit(*t2, kind=k2)
                        add([pr(i, k), pr(k, j), -c_ijk, -a1, a2],
                            "collinear_orientation")
                        add([pr(i, k), pr(k, j), -c_ijk, a1, -a2],
                            "collinear_orientation")
                    # order k-i-j: lines i->k and j->k both oppose i->j
                    pairs4 = [((i, j, l), A, (i, k, l), B),
                              ((i, j, l), A, (j, k, l), B)]
                    for t1, k1, t2, k2 in pairs4:
                        a1 = self.olit(*t1, kind=k1)
                        a2 = self.olit(*t2, kind=k2)
                        add([pr(k, i), pr(i, j), -c_ijk, -a1, a2],
                            "collinear_orientation")
                        add([pr(k, i), pr(i, j), -c_ijk, a1, -a2],
                            "collinear_orientation")

    # convexity ---------------------------------------------------------
    def conv_quads(self):
        """Quadruples that carry a conv variable (orbit representatives when
        filtering is on)."""
        quads = itertools.combinations(range(1, self.n + 1), 4)
        if self.sym is not None and self.spec.conv_orbit_filtering:
            return [q for q in quads if is_lex_min_in_orbit(q, self.sym)]
        return list(quads)

    def conv_rep(self, quad):
        if self.sym is not None and self.spec.conv_orbit_filtering:
            return min(orbit_of_index_set(quad, self.sym))
        return tuple(sorted(quad))

    def encode_convexity_vars(self):
        add = self.formula.add
        self._conv_reps = self.conv_quads()
        for q in self._conv_reps:
            self.vt.new(("conv", q))
            self.vt.new(("xor", q))
        for q in self._conv_reps:
            i, j, k, l = q
            conv = self.vt.id(("conv", q))
            t = self.vt.id(("xor", q))
            x = self.olit(i, j, k)
            y = self.olit(i, k, l)
            z = self.olit(i, j, l)
            w = self.olit(j, k, l)
            # t <-> x xor y
            add([-t, x, y], "conv_definition")
            add([-t, -x, -y], "conv_definition")
            add([t, -x, y], "conv_definition")
            add([t, x, -y], "conv_definition")
            # conv <-> not (t xor z xor w): forbid even-parity assignments
            # of (conv, t, z, w)
            for signs in itertools.product((1, -1), repeat=4):
                if (signs.count(1)) % 2 == 0:
                    add([signs[0] * conv, signs[1] * t,
                         signs[2] * z, signs[3] * w], "conv_definition")

    def encode_no_kgon(self, k: int):
        add = self.formula.add
        for X in itertools.combinations(range(1, self.n + 1), k):
            if self.sym is not None and not is_lex_min_in_orbit(X, self.sym):
                continue
            lits = [-self.vt.id(("conv", self.conv_rep(q)))
                    for q in itertools.combinations(X, 4)]
            add(lits, f"no_{k}gon")

    # imbalance ---------------------------------------------------------
    def _counter_ladder(self, pair, fam: str, lits):
        """Full sequential counter over `lits` with exact-count outputs.

        Register (pair, fam, 'r', k, m) means "at least m of the first k";
        (pair, fam, 'eq', m) means "exactly m overall".
        """
        add = self.formula.add
        N = len(lits)
        vt = self.vt

        def reg(k, m):
            # constants folded: at-least-0 is true, at-least-(>k) is false
            if m <= 0:
                return True
            if m > k:
                return False
            return vt.id((fam, pair, "r", k, m))

        for k in range(1, N + 1):
            for m in range(1, k + 1):
                vt.new((fam, pair, "r", k, m))
        for k in range(1, N + 1):
            x = lits[k - 1]
            for m in range(1, k + 1):
                r = reg(k, m)
                p = reg(k - 1, m)
                q = reg(k - 1, m - 1)
                add([_neg(p), r], "counter")
                add([-x, _neg(q), r], "counter")
                add([-r, p, x], "counter")
                add([-r, p, q], "counter")
        for m in range(0, N + 1):
            s = vt.new((fam, pair, "eq", m))
            add([-s, reg(N, m)], "counter")
            add([-s, _neg(reg(N, m + 1))], "counter")
            add([s, _neg(reg(N, m)), reg(N, m + 1)], "counter")
        return N

    def encode_imbalance_at_least(self, c: int):
        add = self.formula.add
        n = self.n
        for i, j in itertools.combinations(range(1, n + 1), 2):
            if self.sym is not None and not is_lex_min_in_orbit((i, j), self.sym):
                continue
            ks = [k for k in range(1, n + 1) if k not in (i, j)]
            above = [self.olit(i, j, k, kind=A) for k in ks]
            below = [self.olit(i, j, k, kind=B) for k in ks]
            N = self._counter_ladder((i, j), "cntA", above)
            self._counter_ladder((i, j), "cntB", below)
            if c <= 0:
                continue
            for x in range(0, N + 1):
                for y in range(0, N + 1):
                    if abs(x - y) < c:
                        add([-self.vt.id(("cntA", (i, j), "eq", x)),
                             -self.vt.id(("cntB", (i, j), "eq", y))],
                            "imbalance")

    # symmetry breaking -------------------------------------------------
    def encode_symmetry_breaking(self):
        if self.sym is None:
            raise ValueError("symmetry breaking needs an active s-fold symmetry")
        add = self.formula.add
        s = self.sym.s
        layers = [c for c in self.sym.cycles() if len(c) == s]
        for outer, inner in zip(layers, layers[1:]):
            base = outer[0]
            for i in outer:
                succ = base + (i - base + 1) % s
                for j in inner:
                    add([self.olit(i, succ, j)], "convex_layer_units")
        if self.sym.center:
            # the rotation center is inside the innermost layer
            c = self.n
            base = layers[-1][0]
            for i in layers[-1]:
                succ = base + (i - base + 1) % s
                add([self.olit(i, succ, c)], "convex_layer_units")
            if self.spec.q_clauses:
                # sector analog of the quadrant clauses: each inner layer's
                # base point lies in the angular sector swept from ray
                # center->1 to ray center->2
                for layer in layers[1:]:
                    j = layer[0]
                    add([self.olit(c, 1, j)], "quadrant_units")
                    add([self.olit(c, 2, j, neg=True)], "quadrant_units")
        elif self.spec.q_clauses and self.n % s == 0:
            for i in range(1 + s, self.n + 1, s):
                add([self.olit(1, 3, i, neg=True)], "quadrant_units")
                add([self.olit(2, 4, i)], "quadrant_units")

    # ------------------------------------------------------------------
    def projection_vars(self):
        """Orientation class representatives: the default enumeration
        projection (A kind in general-position mode, A/B/C otherwise)."""
        return [self.vt.id(("class",) + cls.rep) for cls in self.table.classes]


def _neg(lit):
    if lit is True:
        return False
    if lit is False:
        return True
    return -lit


def encode_problem(spec: ProblemSpec) -> CnfFormula:
    enc = Encoder(spec)
    enc.encode_linear_order()
    enc.encode_dynamic_ordering_axioms()
    if spec.mode == COLLINEAR:
        enc.encode_exactly_one()
        enc.encode_collinearity_axioms()
    if spec.no_kgon is not None:
        enc.encode_convexity_vars()
        enc.encode_no_kgon(spec.no_kgon)
    if spec.imbalance_at_least is not None:
        enc.encode_imbalance_at_least(spec.imbalance_at_least)
    if spec.symmetry_breaking:
        enc.encode_symmetry_breaking()
    if spec.wlog_order:
        enc.encode_wlog_order()
    enc.formula.meta["projection"] = enc.projection_vars()
    enc.formula.meta["encoder"] = enc
    return enc.formula


# ---------------------------------------------------------------------------
# Proposition-2 style completeness formula: dynamic-ordering axioms for five
# points conjoined with the Tseitin-negated interiority/transitivity axioms.
# ---------------------------------------------------------------------------

def cc_axiom_clauses(enc: Encoder):
    """Interiority and transitivity clauses over canonical variables;
    tautologies (satisfied by canonicalization alone) are dropped."""
    n = enc.n
    out = []
    seen = set()
    for i, j, k, l in itertools.permutations(range(1, n + 1), 4):
        clause = [enc.olit(i, j, k), enc.olit(i, k, l),
                  enc.olit(k, j, l), enc.olit(j, i, l)]
        _push_clause(out, seen, clause)
    for l, i, m in itertools.permutations(range(1, n + 1), 3):
        rest = [x for x in range(1, n + 1) if x not in (l, i, m)]
        for j, k in itertools.permutations(rest, 2):
            clause = [enc.olit(l, i, m), enc.olit(l, j, m), enc.olit(l, k, m),
                      enc.olit(l, j, i), enc.olit(l, k, j), enc.olit(l, i, k)]
            _push_clause(out, seen, clause)
    return out


def _push_clause(out, seen, clause):
    uniq = tuple(sorted(set(clause), key=abs))
    lits = set(uniq)
    if any(-l in lits for l in uniq):
        return
    if uniq in seen:
        return
    seen.add(uniq)
    out.append(list(uniq))


def build_proposition_two_formula() -> CnfFormula:
    """Dynamic-ordering axioms on 5 points AND (not CC axioms), the latter
    negated clause-by-clause through fresh selector variables. Expected
    unsatisfiable: every dynamic-ordering model respects the CC axioms."""
    spec = ProblemSpec(n=5)
    enc = Encoder(spec)
    enc.encode_linear_order()
    enc.encode_dynamic_ordering_axioms()
    f = enc.formula
    selectors = []
    for idx, clause in enumerate(cc_axiom_clauses(enc)):
        y = enc.vt.new(("y", idx))
        selectors.append(y)
        for lit in clause:
            f.add([-lit, -y], "negated_cc")
    f.add(selectors, "negated_cc")
    f.meta["encoder"] = enc
    return f


# ---------------------------------------------------------------------------
# DIMACS
# ---------------------------------------------------------------------------

def emit_dimacs(formula: CnfFormula, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"p cnf {formula.nvars} {len(formula.clauses)}\n")
        for clause in formula.clauses:
            fh.write(" ".join(str(l) for l in clause) + " 0\n")
    map_path = str(path)
    map_path = map_path[:-4] + ".map" if map_path.endswith(".cnf") \
        else map_path + ".map"
    with open(map_path, "w", encoding="utf-8") as fh:
        for vid in range(1, formula.nvars + 1):
            fh.write(f"{vid} {_format_var(formula.vt.name(vid))}\n")
    return map_path


def parse_dimacs(path):
    """Clause list from a DIMACS file (used by round-trip tests and the
    enumeration driver)."""
    nvars = 0
    clauses = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith(("c", "p")):
                if line.startswith("p cnf"):
                    nvars = int(line.split()[2])
                continue
            lits = [int(x) for x in line.split()]
            if lits and lits[-1] == 0:
                lits = lits[:-1]
            if lits:
                clauses.append(lits)
    return nvars, clauses
