"""Exact and floating-point geometric primitives.

Coordinates live in one of three regimes:

* ``float`` -- used by the local search,
* ``Fraction`` -- exact rationals for certification,
* ``Quad`` -- numbers of the form a + b*sqrt(3), for certifying the
  constructions whose published coordinates involve sqrt(3).

Points are plain ``(x, y)`` tuples; all functions here are pure.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction


def sign(x) -> int:
    """Strict sign. For floats there is deliberately no epsilon: a noisy
    near-zero determinant is simply reported with its floating sign and the
    callers (the local search) treat unreliable triples as unsatisfied."""
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


@dataclass(frozen=True)
class Quad:
    """a + b*sqrt(3) with exact rational a, b."""

    a: Fraction
    b: Fraction

    def __add__(self, other: "Quad") -> "Quad":
        return Quad(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "Quad") -> "Quad":
        return Quad(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "Quad":
        return Quad(-self.a, -self.b)

    def __mul__(self, other: "Quad") -> "Quad":
        # (a + b r)(c + d r) with r^2 = 3
        return Quad(
            self.a * other.a + 3 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(3.0)

    def sign(self) -> int:
        return sign_quad(self)

    def __lt__(self, other: "Quad") -> bool:
        return (self - other).sign() < 0

    def __gt__(self, other: "Quad") -> bool:
        return (self - other).sign() > 0

    @staticmethod
    def of(a=0, b=0) -> "Quad":
        return Quad(Fraction(a), Fraction(b))


QUAD_ZERO = Quad.of(0, 0)


def sign_quad(q: Quad) -> int:
    """Exact sign of a + b*sqrt(3).

    When a and b do not disagree in sign the answer is immediate; otherwise
    compare a^2 against 3 b^2, which decides |a| vs |b|*sqrt(3).
    """
    sa, sb = sign(q.a), sign(q.b)
    if sa == 0:
        return sb
    if sb == 0 or sa == sb:
        return sa
    # signs disagree: result has the sign of the dominant summand
    return sa * sign(q.a * q.a - 3 * q.b * q.b)


def orient(p, q, r) -> int:
    """Triple orientation: +1 counterclockwise, -1 clockwise, 0 collinear.

    Sign of the 2x2 determinant (q - p) x (r - p); works for any coordinate
    type with exact ring operations, and for floats with strict sign.
    """
    d = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    if isinstance(d, Quad):
        return d.sign()
    return sign(d)


def rotate(p, angle: float):
    """Rotation by `angle` radians about the origin (float regime)."""
    c, s = math.cos(angle), math.sin(angle)
    return (p[0] * c - p[1] * s, p[0] * s + p[1] * c)


def rotate120_quad(p):
    """Exact rotation by 2*pi/3 for Quad coordinates.

    cos(2pi/3) = -1/2 and sin(2pi/3) = sqrt(3)/2 are both in Q(sqrt(3)),
    so the rotation is exact in this regime.
    """
    c = Quad.of(Fraction(-1, 2), 0)
    s = Quad.of(0, Fraction(1, 2))
    x, y = p
    return (x * c - y * s, x * s + y * c)


# ---------------------------------------------------------------------------
# Pointset file format: one point per line, two space-separated coordinates.
# Coordinate grammar: INT | INT/INT | [INT[/INT]+]INT[/INT]*rt3 | float.
# '#' starts a comment line.
# ---------------------------------------------------------------------------

_RAT = r"-?\d+(?:/\d+)?"
_QUAD_RE = re.compile(rf"^(?:({_RAT})\+)?({_RAT})\*rt3$")
_FLOAT_RE = re.compile(r"^-?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?$")


def parse_coord(tok: str):
    m = _QUAD_RE.match(tok)
    if m:
        a = Fraction(m.group(1)) if m.group(1) else Fraction(0)
        return Quad(a, Fraction(m.group(2)))
    if "/" in tok:
        return Fraction(tok)
    if "." in tok or "e" in tok or "E" in tok:
        if not _FLOAT_RE.match(tok):
            raise ValueError(f"bad coordinate {tok!r}")
        return float(tok)
    return Fraction(int(tok))


def format_coord(c) -> str:
    if isinstance(c, Quad):
        if c.b == 0:
            return format_coord(c.a)
        rt = f"{c.b}*rt3"
        return rt if c.a == 0 else f"{c.a}+{rt}"
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else str(c)
    if isinstance(c, int):
        return str(c)
    return f"{float(c):.17g}"


def parse_points(text: str):
    """Parse a pointset file. Mixed-regime files are promoted: any Quad makes
    the set Quad, else any float makes it float, else exact rational."""
    pts = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ValueError(f"line {lineno}: expected 2 coordinates")
        try:
            pts.append((parse_coord(fields[0]), parse_coord(fields[1])))
        except ValueError as e:
            raise ValueError(f"line {lineno}: {e}") from None
    if any(isinstance(c, Quad) for p in pts for c in p):
        pts = [tuple(c if isinstance(c, Quad) else Quad(Fraction(c), Fraction(0))
                     for c in p) for p in pts]
    elif any(isinstance(c, float) for p in pts for c in p):
        pts = [(float(x), float(y)) for x, y in pts]
    return pts


def format_points(pts) -> str:
    return "".join(f"{format_coord(x)} {format_coord(y)}\n" for x, y in pts)


def load_points(path):
    with open(path, "r", encoding="utf-8") as f:
        return parse_points(f.read())


def save_points(path, pts):
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_points(pts))
