"""Local-search realization of general-position orientation assignments.

A pool of worker threads runs weighted-point simulated annealing: each
iteration picks a point proportionally to how many unsatisfied orientation
constraints it participates in, then tries moves of exponentially shrinking
radius, accepting any non-worsening move. Workers share a leaderboard of the
best states seen and restart from a perturbed leaderboard entry after
stagnating. The hot loops are numba-compiled and release the GIL, so plain
Python threads scale.

A run only reports success once the float pointset has been snapped to exact
rational coordinates and re-certified with exact arithmetic.
"""

from __future__ import annotations

import itertools
import math
import threading
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numba import njit

from .satbridge import OrientationAssignment
from .verify import certify, check_combinatorial_symmetry, snap_float_to_rational


@dataclass
class SearchParams:
    threads: int = 8
    top_k: int = 8
    pt_movements: int = 24
    min_radius: float = 1e-4
    max_radius: float = 0.5
    reset_radius: float = 0.005
    restart_threshold: int = 2000
    seed: int = 0
    budget: float = 60.0  # seconds

    def __post_init__(self):
        if not (0 < self.min_radius <= self.max_radius):
            raise ValueError("need 0 < min_radius <= max_radius")
        if self.top_k < 1 or self.threads < 1:
            raise ValueError("top_k and threads must be >= 1")


@dataclass
class RealizeResult:
    success: bool
    points: list | None  # exact rational coordinates on success
    float_points: np.ndarray  # best float state seen
    unsat: int
    elapsed: float


# ---------------------------------------------------------------------------
# RNG: xoshiro256** seeded through splitmix64
# ---------------------------------------------------------------------------

_U64 = np.uint64
_DOUBLE_SCALE = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True, nogil=True)
def _splitmix64(x):
    x = x + _U64(0x9E3779B97F4A7C15)
    z = x
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D49BBB133111EB)
    return x, z ^ (z >> _U64(31))


@njit(cache=True, nogil=True)
def _seed_state(seed, state):
    x = _U64(seed)
    for i in range(4):
        x, z = _splitmix64(x)
        state[i] = z


@njit(cache=True, nogil=True)
def _rotl(x, k):
    return (x << _U64(k)) | (x >> _U64(64 - k))


@njit(cache=True, nogil=True)
def _next_u64(state):
    result = _rotl(state[1] * _U64(5), 7) * _U64(9)
    t = state[1] << _U64(17)
    state[2] ^= state[0]
    state[3] ^= state[1]
    state[1] ^= state[2]
    state[0] ^= state[3]
    state[2] ^= t
    state[3] = _rotl(state[3], 45)
    return result


@njit(cache=True, nogil=True)
def _rand01(state):
    return float(_next_u64(state) >> _U64(11)) * _DOUBLE_SCALE


def make_rng_state(seed: int) -> np.ndarray:
    state = np.zeros(4, dtype=np.uint64)
    _seed_state(np.uint64(seed & (2 ** 64 - 1)), state)
    return state


class Xoshiro:
    """Thin wrapper so Python-level helpers can draw from a worker state."""

    def __init__(self, seed: int):
        self.state = make_rng_state(seed)

    def random(self) -> float:
        return _rand01(self.state)


# ---------------------------------------------------------------------------
# evaluation kernels
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _osign(ax, ay, bx, by, cx, cy):
    d = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if d > 0.0:
        return 1
    if d < 0.0:
        return -1
    return 0  # never matches a +-1 target: degeneracies count as unsat


@njit(cache=True, nogil=True)
def _eval_full(pts, tau):
    n = pts.shape[0]
    u = 0
    F = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                s = _osign(pts[i, 0], pts[i, 1], pts[j, 0], pts[j, 1],
                           pts[k, 0], pts[k, 1])
                if s != tau[i, j, k]:
                    u += 1
                    F[i] += 1
                    F[j] += 1
                    F[k] += 1
    return u, F


@njit(cache=True, nogil=True)
def _local_eval(pts, tau, i):
    n = pts.shape[0]
    Fi = np.zeros(n, dtype=np.int64)
    for j in range(n):
        if j == i:
            continue
        for k in range(j + 1, n):
            if k == i:
                continue
            a, b, c = i, j, k
            if a > b:
                a, b = b, a
            if b > c:
                b, c = c, b
            if a > b:
                a, b = b, a
            s = _osign(pts[a, 0], pts[a, 1], pts[b, 0], pts[b, 1],
                       pts[c, 0], pts[c, 1])
            if s != tau[a, b, c]:
                Fi[a] += 1
                Fi[b] += 1
                Fi[c] += 1
    return Fi


# chunk return codes
_DONE, _BOUNDARY, _RESTART, _STOPPED = 0, 1, 2, 3

# outer iterations per kernel call; workers surface to Python (leaderboard,
# budget check) this often
_CHUNK_ITERS = 256


@njit(cache=True, nogil=True)
def _local_count(pts, tau, i, limit):
    """Number of unsat triples containing i: the cheap reject path. Aborts
    with limit + 1 as soon as the count exceeds `limit`, since callers only
    need the exact value when it is within the acceptance bound."""
    n = pts.shape[0]
    cnt = 0
    for j in range(n):
        if j == i:
            continue
        for k in range(j + 1, n):
            if k == i:
                continue
            a, b, c = i, j, k
            if a > b:
                a, b = b, a
            if b > c:
                b, c = c, b
            if a > b:
                a, b = b, a
            s = _osign(pts[a, 0], pts[a, 1], pts[b, 0], pts[b, 1],
                       pts[c, 0], pts[c, 1])
            if s != tau[a, b, c]:
                cnt += 1
                if cnt > limit:
                    return cnt
    return cnt


@njit(cache=True, nogil=True)
def _local_eval_into(pts, tau, i, Fi):
    n = pts.shape[0]
    for j in range(n):
        Fi[j] = 0
    for j in range(n):
        if j == i:
            continue
        for k in range(j + 1, n):
            if k == i:
                continue
            a, b, c = i, j, k
            if a > b:
                a, b = b, a
            if b > c:
                b, c = c, b
            if a > b:
                a, b = b, a
            s = _osign(pts[a, 0], pts[a, 1], pts[b, 0], pts[b, 1],
                       pts[c, 0], pts[c, 1])
            if s != tau[a, b, c]:
                Fi[a] += 1
                Fi[b] += 1
                Fi[c] += 1


@njit(cache=True, nogil=True)
def _run_chunk(pts, tau, F, ubox, itbox, rng, stop,
               pt_movements, min_r, max_r, restart_threshold):
    n = pts.shape[0]
    buf_old = np.empty(n, dtype=np.int64)
    buf_new = np.empty(n, dtype=np.int64)
    for _ in range(_CHUNK_ITERS):
        if stop[0] != 0:
            return _STOPPED
        if ubox[0] == 0:
            return _DONE
        if itbox[0] > restart_threshold:
            return _RESTART
        # pick a point proportionally to (unsat count + 1)
        total = float(n)
        for j in range(n):
            total += F[j]
        r = _rand01(rng) * total
        i = n - 1
        acc = 0.0
        for j in range(n):
            acc += F[j] + 1.0
            if r < acc:
                i = j
                break
        fi_cur = F[i]
        px = pts[i, 0]
        py = pts[i, 1]
        for step in range(pt_movements + 1):
            rad = max_r / 2.0 ** step
            if rad < min_r:
                rad = min_r
            while True:
                dx = (2.0 * _rand01(rng) - 1.0) * rad
                dy = (2.0 * _rand01(rng) - 1.0) * rad
                if dx * dx + dy * dy <= rad * rad:
                    break
            pts[i, 0] = px + dx
            pts[i, 1] = py + dy
            fi_new = _local_count(pts, tau, i, fi_cur)
            if fi_new <= fi_cur:
                # accepted: now compute the per-point deltas
                nx = pts[i, 0]
                ny = pts[i, 1]
                pts[i, 0] = px
                pts[i, 1] = py
                _local_eval_into(pts, tau, i, buf_old)
                pts[i, 0] = nx
                pts[i, 1] = ny
                _local_eval_into(pts, tau, i, buf_new)
                for j in range(n):
                    F[j] += buf_new[j] - buf_old[j]
                if fi_new < fi_cur:
                    ubox[0] -= fi_cur - fi_new
                    itbox[0] = 0
                fi_cur = fi_new
                px = nx
                py = ny
                if ubox[0] == 0:
                    return _DONE
            else:
                pts[i, 0] = px
                pts[i, 1] = py
        itbox[0] += 1
    return _BOUNDARY


@njit(cache=True, nogil=True)
def _set_orbit(pts, members, cosv, sinv, fi, x, y):
    for t in range(members.shape[1]):
        pts[members[fi, t], 0] = cosv[t] * x - sinv[t] * y
        pts[members[fi, t], 1] = sinv[t] * x + cosv[t] * y


@njit(cache=True, nogil=True)
def _run_chunk_sym(pts, tau, ubox, itbox, rng, stop,
                   pt_movements, min_r, max_r, restart_threshold,
                   members, cosv, sinv):
    k = members.shape[0]
    for _ in range(_CHUNK_ITERS):
        if stop[0] != 0:
            return _STOPPED
        if ubox[0] == 0:
            return _DONE
        if itbox[0] > restart_threshold:
            return _RESTART
        u0, F = _eval_full(pts, tau)
        ubox[0] = u0
        if u0 == 0:
            return _DONE
        total = float(k)
        W = np.zeros(k, dtype=np.int64)
        for fi in range(k):
            for t in range(members.shape[1]):
                W[fi] += F[members[fi, t]]
            total += W[fi]
        r = _rand01(rng) * total
        fi = k - 1
        acc = 0.0
        for j in range(k):
            acc += W[j] + 1.0
            if r < acc:
                fi = j
                break
        rep = members[fi, 0]
        bx = pts[rep, 0]
        by = pts[rep, 1]
        ucur = u0
        for step in range(pt_movements + 1):
            rad = max_r / 2.0 ** step
            if rad < min_r:
                rad = min_r
            while True:
                dx = (2.0 * _rand01(rng) - 1.0) * rad
                dy = (2.0 * _rand01(rng) - 1.0) * rad
                if dx * dx + dy * dy <= rad * rad:
                    break
            _set_orbit(pts, members, cosv, sinv, fi, bx + dx, by + dy)
            u2, _ = _eval_full(pts, tau)
            if u2 <= ucur:
                if u2 < ucur:
                    itbox[0] = 0
                ucur = u2
                bx = bx + dx
                by = by + dy
                ubox[0] = u2
                if u2 == 0:
                    return _DONE
            else:
                _set_orbit(pts, members, cosv, sinv, fi, bx, by)
        itbox[0] += 1
    return _BOUNDARY


# ---------------------------------------------------------------------------
# Python-level API
# ---------------------------------------------------------------------------

def eval_assignment(points, tau):
    """(u, F) for a float pointset against a general-position assignment."""
    pts, tau3 = _as_arrays(points, tau)
    u, F = _eval_full(pts, tau3)
    return int(u), F


def local_eval(points, tau, i):
    """Per-point unsat counts restricted to triples containing point i
    (1-based)."""
    pts, tau3 = _as_arrays(points, tau)
    return _local_eval(pts, tau3, i - 1)


def weighted_sample(items, weights, rng):
    """items[i] with probability (weights[i]+1) / sum(weights[j]+1)."""
    if len(items) == 0 or len(items) != len(weights):
        raise ValueError("need equally many items and nonnegative weights")
    total = sum(weights) + len(weights)
    r = rng.random() * total
    acc = 0.0
    for item, w in zip(items, weights):
        acc += w + 1
        if r < acc:
            return item
    return items[-1]


def _as_arrays(points, tau):
    if isinstance(points, np.ndarray):
        pts = np.asarray(points, dtype=np.float64)
    else:
        pts = np.array([(float(x), float(y)) for x, y in points],
                       dtype=np.float64)
    return pts, _tau_array(tau, pts.shape[0])


def _tau_array(tau: OrientationAssignment, n: int) -> np.ndarray:
    if tau.n != n:
        raise ValueError("assignment size does not match pointset")
    expected = math.comb(n, 3)
    if len(tau.values) != expected:
        raise ValueError("assignment must be total")
    arr = np.zeros((n, n, n), dtype=np.int8)
    for (i, j, k), v in tau.values.items():
        if v == 0:
            raise ValueError("collinear targets unsupported")
        arr[i - 1, j - 1, k - 1] = v
    return arr


class Leaderboard:
    """Top-k (unsat, pointset) entries shared across workers."""

    def __init__(self, top_k: int):
        self.top_k = top_k
        self._lock = threading.Lock()
        self.entries: list[tuple[int, np.ndarray]] = []

    def broadcast(self, pts: np.ndarray, u: int):
        with self._lock:
            self.entries.append((u, pts.copy()))
            self.entries.sort(key=lambda e: e[0])
            del self.entries[self.top_k:]

    def best(self):
        with self._lock:
            return self.entries[0] if self.entries else None

    def sample(self, rng):
        with self._lock:
            if not self.entries:
                return None
            worst = max(u for u, _ in self.entries)
            sols = [pts for _, pts in self.entries]
            weights = [worst - u for u, _ in self.entries]
        return weighted_sample(sols, weights, rng)


def _symmetry_arrays(sym, n):
    """(members, cosv, sinv): orbit index table and the rotation applied to
    each orbit slot."""
    cycles = [c for c in sym.cycles() if len(c) == sym.s]
    members = np.array([[c[t] - 1 for t in range(sym.s)] for c in cycles],
                       dtype=np.int64)
    angles = [2.0 * math.pi * t / sym.s for t in range(sym.s)]
    cosv = np.array([math.cos(a) for a in angles])
    sinv = np.array([math.sin(a) for a in angles])
    return members, cosv, sinv


def _certify_candidate(pts: np.ndarray, tau: OrientationAssignment):
    """Exact-arithmetic confirmation of a float u=0 state; returns exact
    coordinates or None."""
    floats = [(float(x), float(y)) for x, y in pts]
    for max_den in (10 ** 3, 10 ** 6, None):
        if max_den is None:
            exact = [(Fraction(x), Fraction(y)) for x, y in floats]
        else:
            exact = snap_float_to_rational(floats, max_den)
        if len(set(exact)) != len(exact):
            continue
        if certify(exact, tau).ok:
            return exact
    return None


def realize(tau: OrientationAssignment, params: SearchParams | None = None,
            sym=None) -> RealizeResult:
    params = params or SearchParams()
    n = tau.n
    tau3 = _tau_array(tau, n)
    if sym is not None and not check_combinatorial_symmetry(tau, sym):
        raise ValueError("assignment is not invariant under the given symmetry")
    sym_arrays = _symmetry_arrays(sym, n) if sym is not None else None

    board = Leaderboard(params.top_k)
    stop = np.zeros(1, dtype=np.int64)
    deadline = time.monotonic() + params.budget
    found: dict = {}
    found_lock = threading.Lock()

    def worker(tid: int):
        rng = make_rng_state(params.seed ^ tid)
        pyrng = Xoshiro((params.seed ^ tid) + 0x5DEECE66D)
        pts = np.empty((n, 2))
        ubox = np.zeros(1, dtype=np.int64)
        itbox = np.zeros(1, dtype=np.int64)

        def fresh_start():
            if sym_arrays is None:
                for i in range(n):
                    pts[i, 0] = _rand01(rng)
                    pts[i, 1] = _rand01(rng)
            else:
                members, cosv, sinv = sym_arrays
                pts[:] = 0.0  # pins the center, if present, at the origin
                for fi in range(members.shape[0]):
                    _set_orbit(pts, members, cosv, sinv, fi,
                               _rand01(rng) - 0.5, _rand01(rng) - 0.5)
            u, F = _eval_full(pts, tau3)
            ubox[0] = u
            itbox[0] = 0
            return F

        def restart_from(entry, F):
            rr = params.reset_radius
            if sym_arrays is None:
                for i in range(n):
                    pts[i, 0] = entry[i, 0] + (2 * _rand01(rng) - 1) * rr
                    pts[i, 1] = entry[i, 1] + (2 * _rand01(rng) - 1) * rr
            else:
                members, cosv, sinv = sym_arrays
                for fi in range(members.shape[0]):
                    rep = members[fi, 0]
                    _set_orbit(pts, members, cosv, sinv, fi,
                               entry[rep, 0] + (2 * _rand01(rng) - 1) * rr,
                               entry[rep, 1] + (2 * _rand01(rng) - 1) * rr)
            u, F2 = _eval_full(pts, tau3)
            ubox[0] = u
            itbox[0] = 0
            return F2

        F = fresh_start()
        best_seen = int(ubox[0]) + 1
        while stop[0] == 0 and time.monotonic() < deadline:
            if sym_arrays is None:
                code = _run_chunk(pts, tau3, F, ubox, itbox, rng, stop,
                                  params.pt_movements, params.min_radius,
                                  params.max_radius, params.restart_threshold)
            else:
                members, cosv, sinv = sym_arrays
                code = _run_chunk_sym(pts, tau3, ubox, itbox, rng, stop,
                                      params.pt_movements, params.min_radius,
                                      params.max_radius,
                                      params.restart_threshold,
                                      members, cosv, sinv)
            if 0 < ubox[0] < best_seen:
                best_seen = int(ubox[0])
                board.broadcast(pts, best_seen)
            if code == _DONE:
                exact = _certify_candidate(pts, tau)
                if exact is not None:
                    with found_lock:
                        if "points" not in found:
                            found["points"] = exact
                            found["floats"] = pts.copy()
                    stop[0] = 1
                    return
                # float-zero state that does not survive exact checking:
                # keep searching from a perturbed copy
                F = restart_from(pts.copy(), F)
            elif code == _RESTART:
                entry = board.sample(pyrng)
                if entry is None:
                    F = fresh_start()
                else:
                    F = restart_from(entry, F)
            elif code == _STOPPED:
                return
        board.broadcast(pts, int(ubox[0]))

    t0 = time.monotonic()
    if params.threads == 1:
        worker(0)
    else:
        threads = [threading.Thread(target=worker, args=(t,))
                   for t in range(params.threads)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
    elapsed = time.monotonic() - t0

    if "points" in found:
        return RealizeResult(True, found["points"], found["floats"], 0,
                             elapsed)
    best = board.best()
    if best is None:
        return RealizeResult(False, None, np.empty((0, 2)), -1, elapsed)
    return RealizeResult(False, None, best[1], best[0], elapsed)
