import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from symgeo.geom import (
    Quad,
    format_coord,
    format_points,
    orient,
    parse_coord,
    parse_points,
    rotate,
    rotate120_quad,
    sign_quad,
)


def F(*args):
    return Fraction(*args)


class TestOrient:
    def test_ccw_triangle(self):
        assert orient((0, 0), (1, 0), (0, 1)) == 1

    def test_collinear(self):
        assert orient((0, 0), (1, 1), (2, 2)) == 0

    def test_outer_layer_of_fourfold_table(self):
        # points 1,2,3 of the certified 4-fold configuration
        assert orient((F(-30), F(0)), (F(0), F(-30)), (F(30), F(0))) == 1

    def test_antisymmetry_and_cyclic_exact(self):
        rnd = random.Random(0)
        for _ in range(200):
            p, q, r = [(F(rnd.randint(-50, 50)), F(rnd.randint(-50, 50)))
                       for _ in range(3)]
            assert orient(p, q, r) == -orient(p, r, q)
            assert orient(p, q, r) == orient(q, r, p)

    def test_rotation_preserves_orientation_float(self):
        rnd = random.Random(1)
        checked = 0
        while checked < 300:
            p, q, r = [(rnd.uniform(-1, 1), rnd.uniform(-1, 1)) for _ in range(3)]
            det = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
            if abs(det) < 1e-6:
                continue
            a = rnd.uniform(0, 2 * math.pi)
            assert orient(rotate(p, a), rotate(q, a), rotate(r, a)) == orient(p, q, r)
            checked += 1


class TestQuadSign:
    def test_zero(self):
        assert sign_quad(Quad.of(0, 0)) == 0

    def test_dominant_rational(self):
        assert sign_quad(Quad.of(-2, 1)) == -1  # 4 > 3

    def test_dominant_root(self):
        assert sign_quad(Quad.of(-5, 3)) == 1  # 25 < 27

    def test_against_high_precision(self):
        import mpmath

        mpmath.mp.dps = 200
        r3 = mpmath.sqrt(3)
        rnd = random.Random(2)
        for _ in range(1000):
            a = Fraction(rnd.randint(-999, 999), rnd.randint(1, 999))
            b = Fraction(rnd.randint(-999, 999), rnd.randint(1, 999))
            v = mpmath.mpf(a.numerator) / a.denominator \
                + (mpmath.mpf(b.numerator) / b.denominator) * r3
            expect = 0 if v == 0 else (1 if v > 0 else -1)
            assert sign_quad(Quad(a, b)) == expect


class TestRotate:
    def test_quarter_turn(self):
        x, y = rotate((1, 0), math.pi / 2)
        assert abs(x) < 1e-12 and abs(y - 1) < 1e-12

    def test_full_turn_in_fifths(self):
        p = (0.3, -1.7)
        q = p
        for _ in range(5):
            q = rotate(q, 2 * math.pi / 5)
        assert abs(q[0] - p[0]) < 1e-9 and abs(q[1] - p[1]) < 1e-9

    def test_fivefold_table_point3(self):
        # point 3 of the 5-fold table is the once-rotated copy of (-12, -17)
        x, y = rotate((-12, -17), 2 * math.pi / 5)
        c, s = math.cos(2 * math.pi / 5), math.sin(2 * math.pi / 5)
        assert abs(x - (-12 * c + 17 * s)) < 1e-12
        assert abs(y - (-12 * s - 17 * c)) < 1e-12

    def test_exact_120(self):
        p = (Quad.of(F(-3)) * Quad.of(0, 1), Quad.of(-1))  # (-3*rt3, -1)
        q = rotate120_quad(rotate120_quad(rotate120_quad(p)))
        assert q == p


class TestPointFile:
    def test_grammar_examples(self):
        assert parse_coord("30") == Fraction(30)
        assert parse_coord("-19/10") == Fraction(-19, 10)
        assert parse_coord("1/2+-3/2*rt3") == Quad.of(F(1) / 2, F(-3) / 2)
        assert parse_coord("-3*rt3") == Quad.of(0, -3)
        assert parse_coord("0.25") == 0.25

    def test_round_trip_exact(self):
        pts = [(F(-30), F(0)), (F(-19, 10), F(-6, 5)),
               (Quad.of(0, -3), Quad.of(F(-1)))]
        pts = parse_points(format_points(pts))
        assert format_points(parse_points(format_points(pts))) == format_points(pts)

    def test_comments_ignored(self):
        pts = parse_points("# header\n1 2\n\n3/2 4\n")
        assert pts == [(F(1), F(2)), (F(3, 2), F(4))]

    @given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6)),
                    min_size=1, max_size=8))
    def test_float_round_trip(self, pts):
        out = parse_points(format_points(pts))
        assert [(float(x), float(y)) for x, y in out] == [
            (float(x), float(y)) for x, y in pts]

    def test_bad_line(self):
        with pytest.raises(ValueError):
            parse_points("1 2 3\n")
