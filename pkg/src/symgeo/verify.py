"""Exact certification and statistics over pointsets.

Everything here works on exact coordinates (Fraction or Quad); orientation
signs are computed with exact arithmetic, so a passing certificate is a
proof, not a numerical claim.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .geom import Quad, orient
from .satbridge import OrientationAssignment
from .symmetry import inversion_parity


@dataclass
class CertifyResult:
    ok: bool
    violations: list = field(default_factory=list)  # (triple, expected, actual)


def orientation_of(points) -> OrientationAssignment:
    """Read the full orientation assignment off a pointset exactly."""
    n = len(points)
    values = {}
    for t in itertools.combinations(range(1, n + 1), 3):
        values[t] = orient(points[t[0] - 1], points[t[1] - 1], points[t[2] - 1])
    return OrientationAssignment(n, values)


def certify(points, tau: OrientationAssignment) -> CertifyResult:
    if len(points) != tau.n:
        raise ValueError("pointset size does not match assignment")
    violations = []
    for t in tau.triples():
        actual = orient(points[t[0] - 1], points[t[1] - 1], points[t[2] - 1])
        if actual != tau.values[t]:
            violations.append((t, tau.values[t], actual))
    return CertifyResult(not violations, violations)


def snap_float_to_rational(points, max_den: int = 10 ** 6):
    return [(Fraction(x).limit_denominator(max_den),
             Fraction(y).limit_denominator(max_den)) for x, y in points]


# ---------------------------------------------------------------------------
# k-gons
# ---------------------------------------------------------------------------

def _require_general_position(points):
    for t in itertools.combinations(points, 3):
        if orient(*t) == 0:
            raise ValueError("general position required")


def quad_convex(points, q) -> bool:
    """Convexity of a 4-subset via the orientation-parity criterion: the four
    leave-one-out orientations have an even number of counterclockwise ones
    exactly for convex position."""
    i, j, k, l = q
    trues = sum(
        orient(points[a - 1], points[b - 1], points[c - 1]) > 0
        for a, b, c in ((i, j, k), (i, k, l), (i, j, l), (j, k, l)))
    return trues % 2 == 0


def count_kgons(points, k: int) -> int:
    _require_general_position(points)
    n = len(points)
    conv = {}
    for q in itertools.combinations(range(1, n + 1), 4):
        conv[q] = quad_convex(points, q)
    if k == 4:
        return sum(conv.values())
    count = 0
    for X in itertools.combinations(range(1, n + 1), k):
        if all(conv[q] for q in itertools.combinations(X, 4)):
            count += 1
    return count


# ---------------------------------------------------------------------------
# imbalance
# ---------------------------------------------------------------------------

def min_imbalance(points):
    """(Delta, witness): minimum over all lines through >= 2 points of the
    absolute difference between strict side counts. Lines carrying more than
    two points are considered once."""
    n = len(points)
    if len(set(points)) != n:
        raise ValueError("duplicate points")
    best = None
    witness = None
    seen_lines = set()
    for i, j in itertools.combinations(range(1, n + 1), 2):
        on_line = [i, j]
        pos = neg = 0
        for k in range(1, n + 1):
            if k in (i, j):
                continue
            s = orient(points[i - 1], points[j - 1], points[k - 1])
            if s == 0:
                on_line.append(k)
            elif s > 0:
                pos += 1
            else:
                neg += 1
        key = frozenset(on_line)
        if key in seen_lines:
            continue
        seen_lines.add(key)
        delta = abs(pos - neg)
        if best is None or delta < best:
            best = delta
            witness = tuple(sorted(on_line))
    return best, witness


# ---------------------------------------------------------------------------
# convex layers
# ---------------------------------------------------------------------------

def _hull_indices(points, idxs):
    """Convex hull (general position) of the points selected by idxs,
    via Andrew's monotone chain with exact comparisons."""
    order = sorted(idxs, key=lambda i: points[i - 1])
    if len(order) <= 2:
        return list(order)

    def half(seq):
        out = []
        for i in seq:
            while len(out) >= 2 and orient(points[out[-2] - 1],
                                           points[out[-1] - 1],
                                           points[i - 1]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = half(order)
    upper = half(reversed(order))
    return lower[:-1] + upper[:-1]


def convex_layers(points):
    _require_general_position(points)
    remaining = set(range(1, len(points) + 1))
    layers = []
    while remaining:
        hull = _hull_indices(points, remaining)
        layers.append(tuple(sorted(hull)))
        remaining -= set(hull)
    return layers


# ---------------------------------------------------------------------------
# symmetry
# ---------------------------------------------------------------------------

def check_combinatorial_symmetry(subject, sym) -> bool:
    """True iff sigma(p_i,p_j,p_k) = sigma(p_pi(i),p_pi(j),p_pi(k)) for all
    triples; accepts a pointset or an OrientationAssignment."""
    tau = subject if isinstance(subject, OrientationAssignment) \
        else orientation_of(subject)
    if sym is None:
        return True
    for t in tau.triples():
        img = tuple(sym.apply(i) for i in t)
        key = tuple(sorted(img))
        if inversion_parity(img) * tau.values[key] != tau.values[t]:
            return False
    return True


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def certification_report(points, tau: OrientationAssignment) -> str:
    res = certify(points, tau)
    lines = [f"status {'ok' if res.ok else 'violations'}",
             f"points {len(points)}",
             f"triples {len(tau.values)}",
             f"violations {len(res.violations)}"]
    for t, want, got in res.violations[:50]:
        lines.append(f"violation {t[0]},{t[1]},{t[2]} expected {want} got {got}")
    return "\n".join(lines) + "\n"


def statistics_summary(points, kgons=(4, 5, 6), sym=None) -> dict:
    """Machine-readable stats: key=value pairs for reports and manifests."""
    out = {"n": len(points)}
    try:
        for k in kgons:
            out[f"kgons_{k}"] = count_kgons(points, k)
        out["layers"] = ";".join(
            ",".join(map(str, layer)) for layer in convex_layers(points))
    except ValueError:
        delta, witness = min_imbalance(points)
        out["min_imbalance"] = delta
        out["witness_line"] = ",".join(map(str, witness))
    if sym is not None:
        out["symmetric"] = check_combinatorial_symmetry(points, sym)
    return out


def format_summary(stats: dict) -> str:
    return "".join(f"{k}={v}\n" for k, v in stats.items())
