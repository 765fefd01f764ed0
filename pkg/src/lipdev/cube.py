"""D(x) on the discrete cube {0,1}^n with Hamming distance and uniform measure.

Vertices are the integers ``0 .. 2**n - 1``; vertex ``v`` is the point with
label ``format(v, f"0{n}b")`` in :func:`lipdev.space.cube_space`.  Sets are
initial segments of a Hamming-weight-major order.  Within one weight level
the order is either

* ``"lex"``: ascending label strings (ascending ``v``), or
* ``"revlex"``: descending label strings (descending ``v``).

``revlex`` is Harper's simplicial order read on label strings (a set of
coordinates listed by its first position).  :func:`select_tiebreak` rechecks
the choice against the brute-force profile; ``lex`` fails at n = 4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .space import SpaceError, as_fraction

MAX_N = 20
TIEBREAKS = ("lex", "revlex")
# frozen after the extremality check in select_tiebreak()
TIEBREAK = "revlex"

_INT64_SAFE = 2**62


def _check_n(n: int, max_n: int = MAX_N) -> None:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= max_n:
        raise SpaceError(f"cube dimension must be an integer in 1..{max_n}, got {n!r}")


@dataclass(frozen=True, eq=False)
class CubeOrder:
    n: int
    tiebreak: str
    order: np.ndarray  # position -> vertex
    rank: np.ndarray  # vertex -> position

    def segment(self, t: int) -> list[int]:
        return [int(v) for v in self.order[:t]]

    def segment_bits(self, t: int) -> int:
        """Initial segment of size t as a bit vector over cube_space(n) points."""
        return sum(1 << v for v in self.segment(t))


@lru_cache(maxsize=None)
def build_order(n: int, tiebreak: str = TIEBREAK, max_n: int = MAX_N) -> CubeOrder:
    _check_n(n, max_n)
    if tiebreak not in TIEBREAKS:
        raise SpaceError(f"tiebreak must be one of {TIEBREAKS}, got {tiebreak!r}")
    v = np.arange(1 << n, dtype=np.int64)
    weight = np.bitwise_count(v)
    secondary = v if tiebreak == "lex" else -v
    order = np.lexsort((secondary, weight))
    rank = np.empty_like(order)
    rank[order] = np.arange(1 << n)
    order.setflags(write=False)
    rank.setflags(write=False)
    return CubeOrder(n, tiebreak, order, rank)


@lru_cache(maxsize=None)
def neighborhood_rank_table(order: CubeOrder) -> np.ndarray:
    """``N[t]`` = size of the closed 1-neighborhood of the first t vertices.

    Index 0 is unused (``N[0] = 0``).  Valid as a neighborhood size only when
    1-neighborhoods of initial segments are again initial segments.
    """
    n, rank = order.n, order.rank
    v = np.arange(1 << n, dtype=np.int64)
    reach = rank.copy()
    for i in range(n):
        np.maximum(reach, rank[v ^ (1 << i)], out=reach)
    N = np.zeros((1 << n) + 1, dtype=np.int64)
    N[1:] = 1 + np.maximum.accumulate(reach[order.order])
    N.setflags(write=False)
    return N


@dataclass(frozen=True, eq=False)
class _Tables:
    n: int
    iterates: np.ndarray  # iterates[h, t] = N applied h times to t
    mean_num: np.ndarray  # mean_num[t] = 2**n * m(t)


@lru_cache(maxsize=8)
def _tables(n: int, tiebreak: str = TIEBREAK) -> _Tables:
    N = neighborhood_rank_table(build_order(n, tiebreak))
    its = np.empty((n + 1, len(N)), dtype=np.int64)
    its[0] = np.arange(len(N))
    for h in range(n):
        its[h + 1] = N[its[h]]
    mean_num = ((1 << n) - its).sum(axis=0)
    return _Tables(n, its, mean_num)


def _check_t(n: int, t: int) -> None:
    if not 1 <= t <= 1 << n:
        raise SpaceError(f"segment size must lie in 1..{1 << n}, got {t}")


def segment_neighborhood_size(n: int, t: int, h: int, tiebreak: str = TIEBREAK) -> int:
    _check_n(n)
    _check_t(n, t)
    return int(_tables(n, tiebreak).iterates[min(h, n), t])


def mean_dist_segment(n: int, t: int, tiebreak: str = TIEBREAK) -> Fraction:
    """Mean Hamming distance to the first t vertices: sum_h (1 - N^h(t)/2^n)."""
    _check_n(n)
    _check_t(n, t)
    return Fraction(int(_tables(n, tiebreak).mean_num[t]), 1 << n)


def deviation_segment(n: int, t: int, x, tiebreak: str = TIEBREAK) -> Fraction:
    _check_n(n)
    _check_t(n, t)
    x = as_fraction(x, "x")
    slack = mean_dist_segment(n, t, tiebreak) - x
    if slack < 0:
        return Fraction(0)
    h = min(math.floor(slack), n)
    return Fraction(int(_tables(n, tiebreak).iterates[h, t]), 1 << n)


@dataclass(frozen=True)
class CubeWitness:
    value: Fraction
    t: int
    mean_dist: Fraction

    def describe(self) -> str:
        m = self.mean_dist
        return f"t={self.t} m={m.numerator}" + ("" if m.denominator == 1 else f"/{m.denominator}")


def D_cube(n: int, x, tiebreak: str = TIEBREAK) -> CubeWitness:
    """Exact D(x) on C_n: best initial segment, smallest size on ties."""
    _check_n(n)
    x = as_fraction(x, "x")
    size = 1 << n
    if x <= 0:
        return CubeWitness(Fraction(1), size, Fraction(0))
    tab = _tables(n, tiebreak)
    p, q = x.numerator, x.denominator
    mean = tab.mean_num[1:]
    if (n + 1) * size * q + p * size >= _INT64_SAFE:
        mean = mean.astype(object)
    excess = mean * q - p * size
    feasible = excess >= 0
    if not feasible.any():
        return CubeWitness(Fraction(0), 1, Fraction(int(tab.mean_num[1]), size))
    h = np.minimum(np.where(feasible, excess, 0) // (q * size), n).astype(np.int64)
    t = np.arange(1, size + 1)
    vals = np.where(feasible, tab.iterates[h, t], 0)
    best = int(np.argmax(vals))
    return CubeWitness(Fraction(int(vals[best]), size), best + 1, Fraction(int(tab.mean_num[best + 1]), size))


def mcdiarmid_bound(n: int, x) -> float:
    """exp(-2 x^2 / n); the trivial bound 1 for x <= 0."""
    x = float(x)
    return 1.0 if x <= 0 else math.exp(-2.0 * x * x / n)


def select_tiebreak(dims=(3, 4)) -> dict[str, bool]:
    """Which tie-breaks make every initial segment a profile minimizer at every radius."""
    from .oracle import iso_profile
    from .space import cube_space

    verdict = {}
    for tb in TIEBREAKS:
        ok = True
        for n in dims:
            prof = iso_profile(cube_space(n))
            for k in range(1, (1 << n) + 1):
                for h in range(n + 1):
                    if Fraction(segment_neighborhood_size(n, k, h, tb), 1 << n) != prof.value(k, h):
                        ok = False
        verdict[tb] = ok
    return verdict
