"""Realization of collinearity-bearing (everywhere-unbalanced) assignments.

The pipeline: extract the family of maximal lines from the zero triples of an
orientation assignment, derive an incidence construction plan (free points,
points parameterized along a line, points forced as line intersections), then
maximize the minimum line imbalance with an in-repo differential-evolution
search over the plan's free slots. Candidates are snapped to rational
coordinates and re-checked with exact arithmetic; collinearities that the plan
made structural survive snapping exactly by construction.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .satbridge import OrientationAssignment
from .verify import min_imbalance


# ---------------------------------------------------------------------------
# line extraction
# ---------------------------------------------------------------------------

@dataclass
class LineFamily:
    n: int
    lines: list  # sorted tuples of indices, |line| >= 3, pairwise sharing <= 1

    def covered_pairs(self):
        out = set()
        for line in self.lines:
            out.update(itertools.combinations(line, 2))
        return out


def extract_lines(tau: OrientationAssignment) -> LineFamily:
    """Maximal collinear index sets. Raises on assignments where the zero
    triples do not glue into consistent lines."""
    n = tau.n
    lines = set()
    for i, j in itertools.combinations(range(1, n + 1), 2):
        members = {i, j}
        for k in range(1, n + 1):
            if k in (i, j):
                continue
            if tau.values[tuple(sorted((i, j, k)))] == 0:
                members.add(k)
        if len(members) >= 3:
            lines.add(tuple(sorted(members)))
    lines = sorted(lines)
    # consistency: every triple inside a line must be zero, and two lines may
    # share at most one point
    for line in lines:
        for t in itertools.combinations(line, 3):
            if tau.values[t] != 0:
                raise ValueError("inconsistent collinearity")
    for a, b in itertools.combinations(lines, 2):
        if len(set(a) & set(b)) >= 2:
            raise ValueError("inconsistent collinearity")
    return LineFamily(n, lines)


# ---------------------------------------------------------------------------
# dependency planning
# ---------------------------------------------------------------------------

@dataclass
class DependencyPlan:
    n: int
    steps: list  # ("free", p) | ("on_line", p, line_idx) | ("meet", p, l1, l2)
    anchors: dict  # line_idx -> (p, q) member points fixing the line
    residuals: list  # (p, line_idx) memberships not structural
    slot_of: dict = field(default_factory=dict)  # step-local slot offsets

    @property
    def dims(self):
        d = 0
        for step in self.steps:
            if step[0] == "free":
                d += 2
            elif step[0] == "on_line":
                d += 1
        return d


def plan_dependencies(family: LineFamily) -> DependencyPlan:
    """Greedy incidence construction: a line becomes determined once two of
    its members are; a point on two determined lines is their intersection;
    otherwise the next point is opened as a position on one determined line
    (one slot) or fully free (two slots)."""
    lines = [tuple(line) for line in family.lines]
    on_lines = {p: [li for li, line in enumerate(lines) if p in line]
                for p in range(1, family.n + 1)}
    det_pts: set[int] = set()
    anchors: dict[int, tuple[int, int]] = {}
    steps = []
    residuals = []

    def settle():
        progress = True
        while progress:
            progress = False
            for li, line in enumerate(lines):
                if li in anchors:
                    continue
                ready = [p for p in line if p in det_pts]
                if len(ready) >= 2:
                    anchors[li] = (ready[0], ready[1])
                    for extra in ready[2:]:
                        residuals.append((extra, li))
                    progress = True
            for p in range(1, family.n + 1):
                if p in det_pts:
                    continue
                dls = [li for li in on_lines[p] if li in anchors]
                if len(dls) >= 2:
                    steps.append(("meet", p, dls[0], dls[1]))
                    for li in dls[2:]:
                        residuals.append((p, li))
                    det_pts.add(p)
                    progress = True

    settle()
    while len(det_pts) < family.n:
        remaining = [p for p in range(1, family.n + 1) if p not in det_pts]
        # prefer the point that unlocks the most lines; positions along an
        # already-determined line cost one slot instead of two
        best = max(remaining,
                   key=lambda p: (len([li for li in on_lines[p]
                                       if li in anchors]) > 0,
                                  len(on_lines[p])))
        dls = [li for li in on_lines[best] if li in anchors]
        if dls:
            steps.append(("on_line", best, dls[0]))
        else:
            steps.append(("free", best))
        det_pts.add(best)
        settle()

    plan = DependencyPlan(family.n, steps, anchors, residuals)
    slot = 0
    for step in plan.steps:
        if step[0] == "free":
            plan.slot_of[step[1]] = slot
            slot += 2
        elif step[0] == "on_line":
            plan.slot_of[step[1]] = slot
            slot += 1
    return plan


# ---------------------------------------------------------------------------
# resolution
# ---------------------------------------------------------------------------

class DegenerateResolution(Exception):
    pass


def resolve(plan: DependencyPlan, family: LineFamily, slots):
    """Coordinates for all points from the free-slot vector. Works for floats
    and Fractions alike; raises DegenerateResolution on parallel or collapsed
    defining lines."""
    pts: dict[int, tuple] = {}
    lines = family.lines

    def line_dir(li):
        a, b = plan.anchors[li]
        ax, ay = pts[a]
        bx, by = pts[b]
        dx, dy = bx - ax, by - ay
        if dx == 0 and dy == 0:
            raise DegenerateResolution("collapsed anchors")
        return (ax, ay), (dx, dy)

    for step in plan.steps:
        kind = step[0]
        p = step[1]
        if kind == "free":
            s = plan.slot_of[p]
            pts[p] = (slots[s], slots[s + 1])
        elif kind == "on_line":
            (ax, ay), (dx, dy) = line_dir(step[2])
            t = slots[plan.slot_of[p]]
            pts[p] = (ax + t * dx, ay + t * dy)
        else:  # meet
            (ax, ay), (dx, dy) = line_dir(step[2])
            (bx, by), (ex, ey) = line_dir(step[3])
            den = dx * ey - dy * ex
            if den == 0:
                raise DegenerateResolution("parallel defining lines")
            t = ((bx - ax) * ey - (by - ay) * ex) / den
            pts[p] = (ax + t * dx, ay + t * dy)
    return [pts[p] for p in range(1, family.n + 1)]


# ---------------------------------------------------------------------------
# objective
# ---------------------------------------------------------------------------

def _orient_f(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def imbalance_objective(slots, plan: DependencyPlan, family: LineFamily,
                        delta: float = 1e-3) -> float:
    """Smoothed minimum imbalance of the resolved configuration. Residual
    line memberships (not structural in the plan) are penalized by distance;
    points within a band of width `delta` of a line they must lie on count as
    on-line."""
    try:
        pts = resolve(plan, family, slots)
    except DegenerateResolution:
        return -1e9
    n = family.n
    penalty = 0.0
    for p, li in plan.residuals:
        a, b = plan.anchors[li]
        d = _orient_f(pts[a - 1], pts[b - 1], pts[p - 1])
        norm = math.hypot(pts[b - 1][0] - pts[a - 1][0],
                          pts[b - 1][1] - pts[a - 1][1])
        if norm < 1e-12:
            return -1e9
        penalty += (d / norm) ** 2

    deltas = []
    margin = float("inf")
    covered = family.covered_pairs()
    # family lines
    for li, line in enumerate(family.lines):
        a, b = line[0], line[1]
        pos = neg = 0
        for k in range(1, n + 1):
            if k in line:
                continue
            d = _orient_f(pts[a - 1], pts[b - 1], pts[k - 1])
            norm = math.hypot(pts[b - 1][0] - pts[a - 1][0],
                              pts[b - 1][1] - pts[a - 1][1])
            dist = abs(d) / max(norm, 1e-12)
            if dist >= delta:
                margin = min(margin, dist)
            if d > 0:
                pos += 1
            elif d < 0:
                neg += 1
        deltas.append(abs(pos - neg))
    # plain two-point lines
    for i, j in itertools.combinations(range(1, n + 1), 2):
        if (i, j) in covered:
            continue
        pos = neg = 0
        for k in range(1, n + 1):
            if k in (i, j):
                continue
            d = _orient_f(pts[i - 1], pts[j - 1], pts[k - 1])
            norm = math.hypot(pts[j - 1][0] - pts[i - 1][0],
                              pts[j - 1][1] - pts[i - 1][1])
            dist = abs(d) / max(norm, 1e-12)
            if dist < delta:
                continue  # inside the band: treat as on-line
            margin = min(margin, dist)
            if d > 0:
                pos += 1
            else:
                neg += 1
        deltas.append(abs(pos - neg))
    deltas.sort()
    second = deltas[1] if len(deltas) > 1 else deltas[0]
    shaping = min(1.0, (margin if margin < float("inf") else 1.0) / delta)
    return deltas[0] + 0.01 * second + 1e-3 * shaping - 1000.0 * penalty


# ---------------------------------------------------------------------------
# snapping
# ---------------------------------------------------------------------------

def snap_to_exact(slots, plan: DependencyPlan, family: LineFamily,
                  max_den: int = 10 ** 6):
    """Exact pointset from a float slot vector: rationalize the slots, then
    re-run the plan with Fraction arithmetic so every structural collinearity
    holds exactly."""
    exact = [Fraction(float(v)).limit_denominator(max_den) for v in slots]
    pts = resolve(plan, family, exact)
    if len(set(pts)) != len(pts):
        raise DegenerateResolution("duplicate points after snapping")
    return pts


# ---------------------------------------------------------------------------
# differential evolution (rand/1/bin)
# ---------------------------------------------------------------------------

@dataclass
class DEParams:
    pop_factor: int = 15
    crossover: float = 0.7
    f_low: float = 0.5
    f_high: float = 1.0
    bound: float = 10.0
    seed: int = 0
    budget: float = 120.0  # seconds


@dataclass
class CollinearResult:
    success: bool
    points: list | None  # exact coordinates on success
    best_slots: np.ndarray
    best_score: float
    exact_delta: int | None  # exact min imbalance of the best snap, if any
    generations: int
    elapsed: float


def optimize_imbalance(plan: DependencyPlan, family: LineFamily, target: int,
                       params: DEParams | None = None) -> CollinearResult:
    params = params or DEParams()
    rng = np.random.default_rng(params.seed)
    dims = plan.dims
    npop = params.pop_factor * dims
    pop = rng.uniform(-params.bound, params.bound, size=(npop, dims))
    scores = np.array([imbalance_objective(ind, plan, family) for ind in pop])
    t0 = time.monotonic()
    deadline = t0 + params.budget
    gens = 0
    best_exact = None  # (delta, exact_points)

    def try_exact(ind):
        nonlocal best_exact
        for max_den in (10 ** 6, 10 ** 7, 10 ** 8, 10 ** 9):
            try:
                pts = snap_to_exact(ind, plan, family, max_den)
            except DegenerateResolution:
                continue
            delta, _ = min_imbalance(pts)
            if best_exact is None or delta > best_exact[0]:
                best_exact = (delta, pts)
            return delta
        return None

    while time.monotonic() < deadline:
        gens += 1
        fmut = rng.uniform(params.f_low, params.f_high)
        for i in range(npop):
            r1, r2, r3 = rng.choice(npop, size=3, replace=False)
            mutant = pop[r1] + fmut * (pop[r2] - pop[r3])
            cross = rng.random(dims) < params.crossover
            cross[rng.integers(dims)] = True
            trial = np.where(cross, mutant, pop[i])
            np.clip(trial, -params.bound, params.bound, out=trial)
            s = imbalance_objective(trial, plan, family)
            if s >= scores[i]:
                pop[i] = trial
                scores[i] = s
        best_i = int(np.argmax(scores))
        if scores[best_i] >= target:
            delta = try_exact(pop[best_i])
            if delta is not None and delta >= target:
                return CollinearResult(True, best_exact[1], pop[best_i].copy(),
                                       float(scores[best_i]), delta, gens,
                                       time.monotonic() - t0)
    best_i = int(np.argmax(scores))
    delta = try_exact(pop[best_i])
    if delta is not None and delta >= target:
        return CollinearResult(True, best_exact[1], pop[best_i].copy(),
                               float(scores[best_i]), delta, gens,
                               time.monotonic() - t0)
    return CollinearResult(False,
                           best_exact[1] if best_exact else None,
                           pop[best_i].copy(), float(scores[best_i]),
                           best_exact[0] if best_exact else None, gens,
                           time.monotonic() - t0)


def realize_collinear(tau: OrientationAssignment, target: int,
                      params: DEParams | None = None) -> CollinearResult:
    """End-to-end: line extraction, planning, optimization, exact snap."""
    family = extract_lines(tau)
    plan = plan_dependencies(family)
    return optimize_imbalance(plan, family, target, params)
