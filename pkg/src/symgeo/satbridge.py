"""External SAT solving: subprocess driving, model decoding, enumeration.

The default solver is a small CDCL solver shipped as C source and compiled
on demand; any solver taking `<cmd> <file.cnf>` and printing competition
`s`/`v` lines can be substituted.
"""

from __future__ import annotations

import importlib.resources
import itertools
import os
import shutil
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path

from .encoder import CnfFormula
from .symmetry import A, B, C

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


class SolverError(Exception):
    pass


@dataclass
class SolverResult:
    status: str
    model: dict | None = None  # var id -> bool
    elapsed: float = 0.0
    exit_code: int | None = None


# ---------------------------------------------------------------------------
# bundled solver
# ---------------------------------------------------------------------------

def _cache_dir() -> Path:
    root = os.environ.get("XDG_CACHE_HOME") or os.path.join(
        os.path.expanduser("~"), ".cache")
    return Path(root) / "symgeo"


def default_solver_command() -> list[str]:
    """Command for the bundled solver, compiling it on first use.

    Overridable with the SYMGEO_SOLVER environment variable (a shell-split
    command prefix)."""
    override = os.environ.get("SYMGEO_SOLVER")
    if override:
        return override.split()
    src = importlib.resources.files("symgeo").joinpath("csolver/solver.c")
    exe = _cache_dir() / "symgeo-solver"
    with importlib.resources.as_file(src) as src_path:
        if not exe.exists() or exe.stat().st_mtime < src_path.stat().st_mtime:
            exe.parent.mkdir(parents=True, exist_ok=True)
            cc = os.environ.get("CC") or shutil.which("cc") or shutil.which("gcc")
            if cc is None:
                raise SolverError("no C compiler found to build the bundled solver")
            tmp = exe.with_suffix(".tmp")
            subprocess.run([cc, "-O2", "-o", str(tmp), str(src_path)],
                           check=True, capture_output=True)
            tmp.replace(exe)
    return [str(exe)]


# ---------------------------------------------------------------------------
# solving
# ---------------------------------------------------------------------------

def solve_external(cnf_path, solver_cmd=None, timeout=None) -> SolverResult:
    if solver_cmd is None:
        solver_cmd = default_solver_command()
    cmd = list(solver_cmd) + [str(cnf_path)]
    start = time.monotonic()
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True,
                              timeout=timeout)
    except subprocess.TimeoutExpired:
        return SolverResult(UNKNOWN, elapsed=time.monotonic() - start)
    elapsed = time.monotonic() - start

    status = None
    lits: list[int] = []
    for line in proc.stdout.splitlines():
        if line.startswith("s "):
            word = line.split(None, 1)[1].strip()
            if word == "SATISFIABLE":
                status = SAT
            elif word == "UNSATISFIABLE":
                status = UNSAT
            elif word == "UNKNOWN":
                status = UNKNOWN
        elif line.startswith("v"):
            lits.extend(int(x) for x in line[1:].split())
    if status is None:
        raise SolverError(
            f"unparseable solver output (exit {proc.returncode}): "
            f"{proc.stdout[:200]!r} stderr: {proc.stderr[:200]!r}")
    if status == SAT:
        model = {abs(l): l > 0 for l in lits if l != 0}
        if not model:
            raise SolverError("unparseable solver output: sat without model")
        return SolverResult(SAT, model=model, elapsed=elapsed,
                            exit_code=proc.returncode)
    return SolverResult(status, elapsed=elapsed, exit_code=proc.returncode)


# ---------------------------------------------------------------------------
# orientation assignments
# ---------------------------------------------------------------------------

@dataclass
class OrientationAssignment:
    n: int
    values: dict  # sorted triple -> {-1, 0, +1}

    def __getitem__(self, triple):
        return self.values[tuple(sorted(triple))]

    def triples(self):
        return itertools.combinations(range(1, self.n + 1), 3)


def save_assignment(tau: OrientationAssignment, path):
    with open(path, "w", encoding="utf-8") as fh:
        for t in tau.triples():
            fh.write(f"{t[0]} {t[1]} {t[2]} {tau.values[t]}\n")


def load_assignment(path) -> OrientationAssignment:
    values = {}
    n = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"bad assignment line: {line!r}")
            i, j, k, v = (int(p) for p in parts)
            if v not in (-1, 0, 1):
                raise ValueError(f"bad orientation value: {line!r}")
            values[tuple(sorted((i, j, k)))] = v
            n = max(n, i, j, k)
    expect = set(itertools.combinations(range(1, n + 1), 3))
    if set(values) != expect:
        raise ValueError("assignment is not total")
    return OrientationAssignment(n, values)


def decode_model(model: dict, encoder) -> OrientationAssignment:
    """Expand a model over representative variables to all C(n,3) triples."""
    table = encoder.table
    vt = encoder.vt
    values = {}
    general = table.regime == "general"
    for key in itertools.combinations(range(1, encoder.n + 1), 3):
        if general:
            cls, pol = table.lookup(*key, A)
            val = model[vt.id(("class",) + cls.rep)]
            if pol < 0:
                val = not val
            values[key] = 1 if val else -1
        else:
            trues = []
            for kind in (A, B, C):
                cls, _ = table.lookup(*key, kind)
                if model[vt.id(("class",) + cls.rep)]:
                    trues.append(kind)
            if len(trues) != 1:
                raise ValueError(f"inconsistent model: triple {key} "
                                 f"has kinds {trues}")
            values[key] = {A: 1, B: -1, C: 0}[trues[0]]
    return OrientationAssignment(encoder.n, values)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

_HEADER_PAD = 12


def write_enumeration_file(formula: CnfFormula, path):
    """DIMACS with a padded clause count in the header so blocking clauses
    can be appended with an in-place header patch."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"p cnf {formula.nvars} "
                 f"{len(formula.clauses):<{_HEADER_PAD}}\n")
        for clause in formula.clauses:
            fh.write(" ".join(str(l) for l in clause) + " 0\n")


def _append_blocking(path, nvars, count, clause):
    with open(path, "r+", encoding="utf-8") as fh:
        fh.seek(0, os.SEEK_END)
        fh.write(" ".join(str(l) for l in clause) + " 0\n")
        fh.seek(0)
        fh.write(f"p cnf {nvars} {count:<{_HEADER_PAD}}")


@dataclass
class EnumerationResult:
    models: list = field(default_factory=list)  # projected models (dicts)
    status: str = "complete"  # complete | partial
    n_solves: int = 0
    elapsed: float = 0.0

    def assignments(self, encoder):
        return [decode_model(m, encoder) for m in self.models]


def enumerate_all(formula: CnfFormula, projection_vars=None, solver_cmd=None,
                  limit=None, timeout=None, workdir=None) -> EnumerationResult:
    """All models of `formula` distinct on `projection_vars`, by repeated
    solving with appended blocking clauses.

    Every model is re-checked against the formula's clauses before being
    accepted. A solver timeout ends the enumeration with status "partial".
    """
    if projection_vars is None:
        projection_vars = formula.meta.get("projection")
    if not projection_vars:
        raise ValueError("no projection variables given")
    bad = [v for v in projection_vars if not 1 <= v <= formula.nvars]
    if bad:
        raise ValueError(f"projection variables not allocated: {bad}")

    if workdir is None:
        import tempfile
        tmp = tempfile.TemporaryDirectory(prefix="symgeo-enum-")
        workdir = tmp.name
    path = Path(workdir) / "enumeration.cnf"
    write_enumeration_file(formula, path)
    count = len(formula.clauses)

    out = EnumerationResult()
    start = time.monotonic()
    while limit is None or len(out.models) < limit:
        remaining = None
        if timeout is not None:
            remaining = timeout - (time.monotonic() - start)
            if remaining <= 0:
                out.status = "partial"
                break
        res = solve_external(path, solver_cmd=solver_cmd, timeout=remaining)
        out.n_solves += 1
        if res.status == UNKNOWN:
            out.status = "partial"
            break
        if res.status == UNSAT:
            break
        model = res.model
        for clause in formula.clauses:
            if not any(model[abs(l)] == (l > 0) for l in clause):
                raise SolverError(f"solver model violates clause {clause}")
        out.models.append({v: model[v] for v in projection_vars})
        blocking = [-v if model[v] else v for v in projection_vars]
        count += 1
        _append_blocking(path, formula.nvars, count, blocking)
    out.elapsed = time.monotonic() - start
    return out
