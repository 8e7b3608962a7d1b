"""Literal canonicalization and equivalence classes under s-fold symmetry.

Orientation variables come in three families: A (counterclockwise),
B (clockwise) and C (collinear), indexed by strictly increasing triples.
A variable written with unsorted indices is rewritten to the sorted triple;
an odd permutation of the indices flips the orientation, which is recorded
as polarity -1 on the A family (general-position reading) or as an A<->B
family swap (collinear reading, where negation of A is not B).

An s-fold rotation of the plane induces the index permutation that cycles
each consecutive block of s indices, with at most one fixed point (the
center, allowed only when s does not divide n, and required to be index n).
Orbits of literals under that permutation are collapsed to equivalence
classes, each with a deterministic representative.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

A, B, C = "A", "B", "C"
KINDS = (A, B, C)

FREE = "free"
FORCED_FALSE = "forcedFalse"
CONTRADICTORY = "contradictory"


def inversion_parity(t) -> int:
    """+1 for an even number of inversions, -1 for odd."""
    inv = sum(1 for a, b in itertools.combinations(t, 2) if a > b)
    return -1 if inv % 2 else 1


def canonicalize(i: int, j: int, k: int, kind: str = A):
    """Sorted triple plus polarity: ((i',j',k'), parity, kind).

    Polarity is the inversion parity for A/B and always +1 for C
    (collinearity is symmetric in its arguments).
    """
    if i == j or j == k or i == k:
        raise ValueError("degenerate triple")
    key = tuple(sorted((i, j, k)))
    pol = 1 if kind == C else inversion_parity((i, j, k))
    return key, pol, kind


def collinear_variable(i: int, j: int, k: int, kind: str):
    """Canonical *variable* for the collinear regime, where all three
    families exist: an odd permutation swaps A and B instead of negating."""
    key, pol, kind = canonicalize(i, j, k, kind)
    if pol < 0:
        kind = B if kind == A else A if kind == B else C
    return key, kind


@dataclass(frozen=True)
class SFold:
    """s-fold symmetry on n points: consecutive blocks of s indices form
    cycles, optionally followed by a single fixed center (index n)."""

    n: int
    s: int
    center: bool = False

    def __post_init__(self):
        if self.s < 1 or self.n < 1:
            raise ValueError("need n >= 1, s >= 1")
        moving = self.n - (1 if self.center else 0)
        if moving % self.s != 0:
            raise ValueError(
                f"{self.n} points cannot be split into {self.s}-cycles"
                + ("" if self.center else " (try center=True)")
            )
        if self.center and self.s == 1:
            raise ValueError("center point is meaningless for s=1")

    def apply(self, i: int) -> int:
        if self.center and i == self.n:
            return i
        block = (i - 1) // self.s
        return block * self.s + (i - block * self.s) % self.s + 1

    def apply_set(self, ixs):
        return tuple(sorted(self.apply(i) for i in ixs))

    def cycles(self):
        moving = self.n - (1 if self.center else 0)
        out = [tuple(range(b + 1, b + self.s + 1)) for b in range(0, moving, self.s)]
        if self.center:
            out.append((self.n,))
        return out


IDENTITY = None  # convention: sym=None means the identity symmetry


def apply_to_literal(lit, sym: SFold):
    """Map a signed literal ((i,j,k), pol, kind) through the permutation and
    re-canonicalize; polarity composes with the canonicalization parity."""
    (i, j, k), pol, kind = lit
    if sym is None:
        return canonicalize(i, j, k, kind)[:1] + (pol,) + (kind,)
    key, p2, kind = canonicalize(sym.apply(i), sym.apply(j), sym.apply(k), kind)
    return key, pol * p2, kind


def orbit_of_index_set(ixs, sym: SFold | None):
    """All images {pi^t(S)} as sorted tuples."""
    s0 = tuple(sorted(ixs))
    if sym is None:
        return {s0}
    out, cur = {s0}, s0
    while True:
        cur = sym.apply_set(cur)
        if cur == s0:
            return out
        out.add(cur)


def is_lex_min_in_orbit(ixs, sym: SFold | None) -> bool:
    s0 = tuple(sorted(ixs))
    return s0 == min(orbit_of_index_set(s0, sym))


@dataclass
class LiteralClass:
    """An orbit of signed literals collapsed to one SAT variable.

    `members` maps canonical variable (key, kind) -> polarity relative to the
    representative. In the collinear regime polarities are always +1 and an
    A/B collision is recorded as FORCED_FALSE instead of CONTRADICTORY.
    """

    rep: tuple  # (key, kind)
    members: dict = field(default_factory=dict)
    status: str = FREE
    forced_collinear: list = field(default_factory=list)  # triples (collinear regime)


def _kind_rank(kind: str) -> int:
    return KINDS.index(kind)


def _lex_key(var):
    key, kind = var
    return (_kind_rank(kind), key)


class ClassTable:
    """Literal equivalence classes for one (n, sym, kinds, regime) choice.

    regime "general": only A variables; negation is the opposite orientation
    and classes carry +-1 polarities (a class holding a literal and its own
    negation is contradictory).
    regime "collinear": A/B/C variables with exactly-one semantics; orbits
    mix the A and B families and a class identifying A and B of the same
    triple is forced false (the triple must then be collinear).
    """

    def __init__(self, n: int, sym: SFold | None, regime: str = "general"):
        if regime not in ("general", "collinear"):
            raise ValueError(regime)
        self.n = n
        self.sym = sym
        self.regime = regime
        self._parent: dict = {}
        self._sign: dict = {}  # sign relative to parent (general regime)
        self._build()

    # union-find with sign tracking -------------------------------------
    def _find_signed(self, v):
        s = 1
        while self._parent[v] != v:
            s *= self._sign[v]
            v = self._parent[v]
        return v, s

    def _union(self, u, v, rel_sign):
        ru, su = self._find_signed(u)
        rv, sv = self._find_signed(v)
        if ru == rv:
            if su * sv != rel_sign:
                self._contradictions.add(ru)
            return
        # attach rv under ru; sign(rv->ru) must satisfy su = rel_sign * sv'
        self._parent[rv] = ru
        self._sign[rv] = su * rel_sign * sv
        if ru in self._contradictions or rv in self._contradictions:
            self._contradictions.discard(rv)
            self._contradictions.add(ru)

    # -------------------------------------------------------------------
    def _variables(self):
        kinds = (A,) if self.regime == "general" else KINDS
        for key in itertools.combinations(range(1, self.n + 1), 3):
            for kind in kinds:
                yield (key, kind)

    def _build(self):
        self._contradictions = set()
        for var in self._variables():
            self._parent[var] = var
            self._sign[var] = 1
        if self.sym is not None:
            for key, kind in list(self._parent):
                i, j, k = key
                if self.regime == "general":
                    key2, pol, _ = apply_to_literal((key, 1, kind), self.sym)
                    self._union((key, kind), (key2, kind), pol)
                else:
                    var2 = collinear_variable(
                        self.sym.apply(i), self.sym.apply(j), self.sym.apply(k), kind
                    )
                    self._union((key, kind), var2, 1)

        groups: dict = {}
        for var in self._parent:
            root, s = self._find_signed(var)
            groups.setdefault(root, []).append((var, s))
        self.classes: list[LiteralClass] = []
        self._lookup: dict = {}
        for root, mem in groups.items():
            rep = min((v for v, _ in mem), key=_lex_key)
            rep_sign = dict(mem)[rep]
            cls = LiteralClass(rep=rep)
            for v, s in mem:
                cls.members[v] = s * rep_sign  # polarity relative to rep
            if root in self._contradictions:
                cls.status = CONTRADICTORY
            if self.regime == "collinear":
                kinds_by_key: dict = {}
                for (key, kind), _ in cls.members.items():
                    kinds_by_key.setdefault(key, set()).add(kind)
                collided = [key for key, ks in kinds_by_key.items()
                            if A in ks and B in ks]
                if collided:
                    cls.status = FORCED_FALSE
                    cls.forced_collinear = sorted(collided)
            self.classes.append(cls)
            for v, s in cls.members.items():
                self._lookup[v] = (cls, s)
        self.classes.sort(key=lambda c: _lex_key(c.rep))

    # public lookups ----------------------------------------------------
    def lookup_variable(self, key, kind):
        """(LiteralClass, polarity of this variable relative to the rep)."""
        return self._lookup[(key, kind)]

    def lookup(self, i, j, k, kind=A):
        """Resolve an arbitrarily ordered literal to (class, polarity)."""
        if self.regime == "general":
            key, pol, kind = canonicalize(i, j, k, kind)
            cls, rel = self._lookup[(key, kind)]
            return cls, pol * rel
        var = collinear_variable(i, j, k, kind)
        cls, rel = self._lookup[var]
        return cls, rel

    def reps(self, kind=None):
        out = [c for c in self.classes if kind is None or c.rep[1] == kind]
        return out
