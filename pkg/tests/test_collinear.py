import itertools
import math
import random
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from symgeo.collinear import (
    CollinearResult,
    DegenerateResolution,
    DEParams,
    extract_lines,
    imbalance_objective,
    optimize_imbalance,
    plan_dependencies,
    realize_collinear,
    resolve,
    snap_to_exact,
)
from symgeo.geom import orient
from symgeo.satbridge import OrientationAssignment, load_assignment
from symgeo.verify import min_imbalance, orientation_of

DATA = Path(__file__).parent / "data"
TAU12 = load_assignment(DATA / "eu12_assignment.txt")


def tau_from_points(points):
    return orientation_of(points)


def slots_for(plan, family, coords):
    """Free-slot vector reproducing `coords` (dict index -> (x, y)) under the
    plan, for any planner output with no residuals."""
    slots = [None] * plan.dims
    done = {}
    for step in plan.steps:
        kind, p = step[0], step[1]
        if kind == "free":
            s = plan.slot_of[p]
            slots[s], slots[s + 1] = coords[p]
            done[p] = coords[p]
        elif kind == "on_line":
            a, b = plan.anchors[step[2]]
            ax, ay = done[a]
            bx, by = done[b]
            dx, dy = bx - ax, by - ay
            x, y = coords[p]
            t = (x - ax) / dx if dx else (y - ay) / dy
            slots[plan.slot_of[p]] = t
            done[p] = coords[p]
        else:
            done[p] = coords[p]
    return slots


class TestExtractLines:
    def test_no_zeros_empty(self):
        pts = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)),
               (Fraction(0), Fraction(1)), (Fraction(3), Fraction(5))]
        fam = extract_lines(tau_from_points(pts))
        assert fam.lines == []

    def test_four_collinear_single_maximal_line(self):
        pts = [(Fraction(k), Fraction(2 * k)) for k in range(4)]
        pts.append((Fraction(5), Fraction(0)))
        fam = extract_lines(tau_from_points(pts))
        assert fam.lines == [(1, 2, 3, 4)]

    def test_inconsistent_rejected(self):
        # zeros on (1,2,3) and (1,2,4) force the line {1,2,3,4}, so a nonzero
        # (1,3,4) is contradictory
        values = {}
        for t in itertools.combinations(range(1, 5), 3):
            values[t] = 1
        values[(1, 2, 3)] = 0
        values[(1, 2, 4)] = 0
        with pytest.raises(ValueError, match="inconsistent"):
            extract_lines(OrientationAssignment(4, values))

    def test_eu12_fixture_line_pattern(self):
        fam = extract_lines(TAU12)
        assert len(fam.lines) == 6
        assert all(len(line) == 4 for line in fam.lines)
        # every index lies on at least one line; line pairs share <= 1 point
        assert set().union(*map(set, fam.lines)) == set(range(1, 13))

    def test_closure_every_zero_covered(self):
        fam = extract_lines(TAU12)
        covered = set()
        for line in fam.lines:
            covered.update(itertools.combinations(line, 3))
        zeros = {t for t, v in TAU12.values.items() if v == 0}
        assert zeros == covered


# a complete quadrilateral: 4 lines, 6 points, every point on two lines
QUAD_COORDS = {
    1: (Fraction(0), Fraction(0)), 2: (Fraction(1), Fraction(0)),
    3: (Fraction(2, 3), Fraction(0)), 4: (Fraction(0), Fraction(1)),
    5: (Fraction(0), Fraction(2)), 6: (Fraction(1, 2), Fraction(1, 2)),
}
QUAD_TAU = tau_from_points([QUAD_COORDS[i] for i in range(1, 7)])


class TestPlan:
    def test_no_lines_all_free(self):
        pts = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)),
               (Fraction(0), Fraction(1)), (Fraction(3), Fraction(5))]
        plan = plan_dependencies(extract_lines(tau_from_points(pts)))
        assert plan.dims == 8
        assert all(step[0] == "free" for step in plan.steps)

    def test_two_lines_sharing_a_point(self):
        pts = [(Fraction(k), Fraction(0)) for k in (-1, 1)]
        pts += [(Fraction(0), Fraction(0))]
        pts += [(Fraction(k), Fraction(k)) for k in (1, 2)]
        plan = plan_dependencies(extract_lines(tau_from_points(pts)))
        # 2 three-point lines on 5 points leave 10 - 2 degrees of freedom
        assert plan.dims == 8
        assert plan.residuals == []

    def test_quadrilateral_has_a_meet(self):
        plan = plan_dependencies(extract_lines(QUAD_TAU))
        assert any(step[0] == "meet" for step in plan.steps)
        assert plan.residuals == []
        # 4 lines x 3 points: 12 - 4 = 8 degrees of freedom
        assert plan.dims == 8

    def test_eu12_fully_structural(self):
        plan = plan_dependencies(extract_lines(TAU12))
        assert plan.residuals == []
        assert plan.dims == 12


class TestResolve:
    def test_reproduces_quadrilateral_exactly(self):
        fam = extract_lines(QUAD_TAU)
        plan = plan_dependencies(fam)
        slots = slots_for(plan, fam, QUAD_COORDS)
        pts = resolve(plan, fam, slots)
        assert pts == [QUAD_COORDS[i] for i in range(1, 7)]

    def test_meet_is_exact_intersection(self):
        # point 6 must land on (1/2, 1/2) = intersection of the diagonals
        fam = extract_lines(QUAD_TAU)
        plan = plan_dependencies(fam)
        slots = slots_for(plan, fam, QUAD_COORDS)
        assert resolve(plan, fam, slots)[5] == (Fraction(1, 2), Fraction(1, 2))

    def test_structural_collinearity_random_slots(self):
        fam = extract_lines(TAU12)
        plan = plan_dependencies(fam)
        rnd = random.Random(0)
        hits = 0
        for _ in range(20):
            slots = [Fraction(rnd.randint(-40, 40), rnd.randint(1, 9))
                     for _ in range(plan.dims)]
            try:
                pts = resolve(plan, fam, slots)
            except DegenerateResolution:
                continue
            hits += 1
            for line in fam.lines:
                for t in itertools.combinations(line, 3):
                    assert orient(pts[t[0] - 1], pts[t[1] - 1],
                                  pts[t[2] - 1]) == 0
        assert hits >= 15

    def test_collapsed_anchor_degenerate(self):
        fam = extract_lines(QUAD_TAU)
        plan = plan_dependencies(fam)
        with pytest.raises(DegenerateResolution):
            resolve(plan, fam, [0.0] * plan.dims)


class TestObjective:
    def test_square_delta_zero(self):
        pts = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)),
               (Fraction(1), Fraction(1)), (Fraction(0), Fraction(1))]
        fam = extract_lines(tau_from_points(pts))
        plan = plan_dependencies(fam)
        slots = [float(v) for p in pts for v in p]
        score = imbalance_objective(slots, plan, fam)
        assert 0.0 <= score < 1.0

    def test_rotation_invariance(self):
        rnd = random.Random(1)
        pts = [(rnd.uniform(-5, 5), rnd.uniform(-5, 5)) for _ in range(7)]
        tau = tau_from_points(
            [(Fraction(x).limit_denominator(10 ** 9),
              Fraction(y).limit_denominator(10 ** 9)) for x, y in pts])
        fam = extract_lines(tau)
        plan = plan_dependencies(fam)
        base = [v for p in pts for v in p]
        s0 = imbalance_objective(base, plan, fam)
        for a in (0.3, 1.1, 2.9):
            c, s = math.cos(a), math.sin(a)
            rot = [v for x, y in pts for v in (c * x - s * y, s * x + c * y)]
            assert abs(imbalance_objective(rot, plan, fam) - s0) < 1e-6

    def test_degenerate_is_very_bad(self):
        fam = extract_lines(QUAD_TAU)
        plan = plan_dependencies(fam)
        assert imbalance_objective([0.0] * plan.dims, plan, fam) <= -1e8

    def test_21_point_table_scores_two(self):
        from symgeo.geom import load_points
        pts = load_points(DATA / "table3_21pt.txt")
        tau = orientation_of(pts)
        fam = extract_lines(tau)
        plan = plan_dependencies(fam)
        coords = {i + 1: (float(x), float(y)) for i, (x, y) in enumerate(pts)}
        slots = slots_for(plan, fam, coords)
        score = imbalance_objective(slots, plan, fam)
        assert 1.9 < score < 2.6


class TestSnap:
    def test_convergent_snapping(self):
        pts = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)),
               (Fraction(0), Fraction(1))]
        fam = extract_lines(tau_from_points(pts))
        plan = plan_dependencies(fam)
        got = snap_to_exact([0.5, 0.3333334, 0, 0, 1, 1], plan, fam,
                            max_den=1000)
        assert got[plan.steps[0][1] - 1] == (Fraction(1, 2), Fraction(1, 3))

    def test_snap_preserves_structure(self):
        fam = extract_lines(TAU12)
        plan = plan_dependencies(fam)
        rnd = random.Random(2)
        slots = [rnd.uniform(-5, 5) for _ in range(plan.dims)]
        pts = snap_to_exact(slots, plan, fam)
        for line in fam.lines:
            for t in itertools.combinations(line, 3):
                assert orient(pts[t[0] - 1], pts[t[1] - 1],
                              pts[t[2] - 1]) == 0


class TestOptimize:
    def test_target_zero_trivial(self):
        pts = [(Fraction(0), Fraction(0)), (Fraction(3), Fraction(1)),
               (Fraction(1), Fraction(4)), (Fraction(5), Fraction(5)),
               (Fraction(2), Fraction(2))]
        tau = tau_from_points(pts)
        res = realize_collinear(tau, 0, DEParams(seed=0, budget=30))
        assert res.success and res.exact_delta >= 0

    def test_budget_exhaustion_returns_best(self):
        fam = extract_lines(TAU12)
        plan = plan_dependencies(fam)
        res = optimize_imbalance(plan, fam, 50, DEParams(seed=0, budget=2))
        assert not res.success
        assert res.best_slots.shape == (plan.dims,)

    @pytest.mark.slow
    def test_eu12_end_to_end(self):
        res = realize_collinear(TAU12, 2, DEParams(seed=0, budget=600))
        assert res.success
        delta, _ = min_imbalance(res.points)
        assert delta >= 2
        fam = extract_lines(TAU12)
        for line in fam.lines:
            for t in itertools.combinations(line, 3):
                assert orient(res.points[t[0] - 1], res.points[t[1] - 1],
                              res.points[t[2] - 1]) == 0
