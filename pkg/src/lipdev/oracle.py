"""Exhaustive brute force over all nonempty subsets of a small finite space.

Everything is exact: distances and weights are scaled to integers (see
:attr:`FiniteSpace.int_dist`) and all comparisons happen on integers.  Ties
are broken towards the lowest bit-vector value, so results never depend on
the number of workers.
"""
from __future__ import annotations

import bisect
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .space import (
    CapExceededError,
    FiniteSpace,
    as_fraction,
    deviation_of_function,
    dist_to_set,
    from_matrix,
)

DEFAULT_CAP = 16
_INT64_SAFE = 2**62


def _widen(arr: np.ndarray, bound: int) -> np.ndarray:
    if bound >= _INT64_SAFE and arr.dtype != object:
        return arr.astype(object)
    return arr


def _check_cap(space: FiniteSpace, cap: int) -> None:
    if len(space) > cap:
        raise CapExceededError(
            f"{len(space)} points means {2 ** len(space) - 1} subsets; enumeration cap is {cap} points"
        )


class _Tables:
    """Per-subset distance rows d(S, .), measures mu(S) and mean distances."""

    def __init__(self, space: FiniteSpace):
        n = len(space)
        D = space.int_dist
        w = space.int_weight
        top = int(D.max()) + 1
        table = np.empty((1 << n, n), dtype=D.dtype)
        table[0] = top
        meas = np.zeros(1 << n, dtype=w.dtype)
        for i in range(n):
            lo, hi = 1 << i, 1 << (i + 1)
            table[lo:hi] = np.minimum(table[:lo], D[i])
            meas[lo:hi] = meas[:lo] + w[i]
        self.space = space
        self.dist = table
        self.meas = meas
        self.weight = w
        self.maxd = top
        mean = table @ _widen(w, top * space.weight_scale)
        mean[0] = 0
        # mean distance scaled by dist_scale * weight_scale
        self.mean = mean


_cache: dict[int, tuple[FiniteSpace, _Tables]] = {}


def _tables(space: FiniteSpace) -> _Tables:
    hit = _cache.get(id(space))
    if hit is not None and hit[0] is space:
        return hit[1]
    if len(_cache) > 8:
        _cache.clear()
    t = _Tables(space)
    _cache[id(space)] = (space, t)
    return t


def _chunks(lo: int, hi: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, workers)
    step = -(-(hi - lo) // workers)
    return [(a, min(a + step, hi)) for a in range(lo, hi, step)]


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def bits_string(bits: int, size: int) -> str:
    """Membership string: character i is '1' when point i is in the set."""
    return "".join("1" if bits >> i & 1 else "0" for i in range(size))


# -- deviation supremum ------------------------------------------------------


@dataclass(frozen=True)
class ExtremalWitness:
    value: Fraction
    argmax: int
    mean_dist_at_argmax: Fraction

    def describe(self, space: FiniteSpace) -> str:
        return "A={" + " ".join(space.member_labels(self.argmax)) + "} m=" + _q(self.mean_dist_at_argmax)


def _q(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def deviation_values(space: FiniteSpace, x, lo: int = 1, hi: Optional[int] = None) -> np.ndarray:
    """Scaled deviation functional for every subset in ``[lo, hi)``.

    Entry ``S - lo`` equals ``weight_scale * mu{u : d(S, u) <= m(S) - x}``.
    """
    x = as_fraction(x, "x")
    t = _tables(space)
    hi = len(t.meas) if hi is None else hi
    Lw, Ld = space.weight_scale, space.dist_scale
    p, q = x.numerator, x.denominator
    bound = t.maxd * Lw * q + abs(p) * Ld * Lw
    dist = _widen(t.dist[lo:hi], bound)
    slack = _widen(t.mean[lo:hi], bound) * q - p * Ld * Lw
    event = dist * (Lw * q) <= slack[:, None]
    return event.astype(t.weight.dtype) @ t.weight


def exact_deviation_sup(space: FiniteSpace, x, cap: int = DEFAULT_CAP, workers: int = 1) -> ExtremalWitness:
    """D(x): the maximum of the deviation functional over all nonempty sets."""
    _check_cap(space, cap)
    x = as_fraction(x, "x")
    if x <= 0:
        return ExtremalWitness(Fraction(1), space.full, Fraction(0))
    t = _tables(space)

    def best(rng):
        a, b = rng
        vals = deviation_values(space, x, a, b)
        i = int(np.argmax(vals))
        return int(vals[i]), a + i

    parts = _map(best, _chunks(1, len(t.meas), workers), workers)
    value, bits = min(parts, key=lambda vb: (-vb[0], vb[1]))
    return ExtremalWitness(
        Fraction(value, space.weight_scale),
        bits,
        Fraction(int(t.mean[bits]), space.dist_scale * space.weight_scale),
    )


# -- isoperimetric profile ---------------------------------------------------


@dataclass
class ProfileTable:
    """Minimum of mu(A^h) over mu(A) >= t, for each achievable t and radius h.

    Row ``k`` (1-based) corresponds to ``thresholds[k-1]``; for a uniform
    measure that is ``k / |V|``, i.e. sets of cardinality at least ``k``.
    """

    size: int
    thresholds: list[Fraction]
    radii: list[Fraction]
    values: list[list[Fraction]]
    witnesses: list[list[int]]

    def value(self, k: int, h) -> Fraction:
        return self.values[k - 1][self.radii.index(as_fraction(h))]

    def witness(self, k: int, h) -> int:
        return self.witnesses[k - 1][self.radii.index(as_fraction(h))]

    def rows(self):
        for k, t in enumerate(self.thresholds, start=1):
            for j, h in enumerate(self.radii):
                yield {
                    "k": k,
                    "t": _q(t),
                    "h": _q(h),
                    "min_measure": _q(self.values[k - 1][j]),
                    "witness_bits": bits_string(self.witnesses[k - 1][j], self.size),
                }


def _neighborhood_measures(t: _Tables, h_int: int) -> np.ndarray:
    nb = (t.dist <= h_int).astype(t.weight.dtype) @ t.weight
    nb[0] = 0
    return nb


def iso_profile(space: FiniteSpace, cap: int = DEFAULT_CAP, workers: int = 1) -> ProfileTable:
    _check_cap(space, cap)
    t = _tables(space)
    n = len(space)
    Ld, Lw = space.dist_scale, space.weight_scale
    meas = t.meas[1:]
    idx = np.arange(1, 1 << n)
    order = np.array(sorted(range(len(meas)), key=lambda i: -int(meas[i])))
    ascending = sorted(int(v) for v in meas)
    thresholds = sorted(set(ascending))
    # number of subsets with measure >= threshold
    counts = [len(ascending) - bisect.bisect_left(ascending, th) for th in thresholds]
    radii = list(space.radii)

    def column(h: Fraction):
        nb = _neighborhood_measures(t, int(h * Ld))[1:]
        key = _widen(nb, Lw << n) * (1 << n) + idx
        running = np.minimum.accumulate(key[order])
        out = []
        for c in counts:
            best = int(running[c - 1])
            out.append((Fraction(best >> n, Lw), best & ((1 << n) - 1)))
        return out

    cols = _map(column, radii, workers)
    values = [[cols[j][k][0] for j in range(len(radii))] for k in range(len(thresholds))]
    witnesses = [[cols[j][k][1] for j in range(len(radii))] for k in range(len(thresholds))]
    return ProfileTable(n, [Fraction(th, Lw) for th in thresholds], radii, values, witnesses)


@dataclass
class IsoperimetricVerdict:
    is_isoperimetric: bool
    witnesses: list[tuple[Fraction, int]] = field(default_factory=list)
    counterexample: Optional[dict] = None

    def to_json(self, space: FiniteSpace) -> dict:
        out = {
            "is_isoperimetric": self.is_isoperimetric,
            "witnesses": [{"t": _q(th), "set": space.member_labels(b)} for th, b in self.witnesses],
        }
        if self.counterexample is not None:
            ce = dict(self.counterexample)
            for key in ("t", "h1", "h2"):
                ce[key] = _q(ce[key])
            for key in ("set_h1", "set_h2"):
                ce[key] = space.member_labels(ce[key])
            out["counterexample"] = ce
        return out


def is_isoperimetric(space: FiniteSpace, cap: int = DEFAULT_CAP, profile: Optional[ProfileTable] = None) -> IsoperimetricVerdict:
    """Does every threshold admit one set minimizing mu(A^h) for all h at once?"""
    _check_cap(space, cap)
    profile = profile or iso_profile(space, cap)
    t = _tables(space)
    n = len(space)
    Ld, Lw = space.dist_scale, space.weight_scale
    nbs = np.stack([_neighborhood_measures(t, int(h * Ld))[1:] for h in profile.radii])
    meas = t.meas[1:]

    # subsets grouped by their full neighborhood-measure vector, ascending bits
    groups: dict[tuple, list[int]] = {}
    for i, row in enumerate(nbs.T.tolist()):
        groups.setdefault(tuple(row), []).append(i)

    witnesses = []
    for k, th in enumerate(profile.thresholds):
        target = tuple(int(v * Lw) for v in profile.values[k])
        th_int = int(th * Lw)
        found = next((i + 1 for i in groups.get(target, ()) if meas[i] >= th_int), None)
        if found is None:
            return IsoperimetricVerdict(False, witnesses, _counterexample(profile, nbs, meas, k, th_int, Lw))
        witnesses.append((th, found))
    return IsoperimetricVerdict(True, witnesses)


def _counterexample(profile: ProfileTable, nbs, meas, k: int, th_int: int, Lw: int) -> dict:
    alive = meas >= th_int
    prev = None
    for j, h in enumerate(profile.radii):
        target = int(profile.values[k][j] * Lw)
        nxt = alive & (nbs[j] == target)
        if not nxt.any():
            return {
                "t": profile.thresholds[k],
                "h1": profile.radii[prev],
                "h2": h,
                "set_h1": int(np.flatnonzero(alive)[0]) + 1,
                "set_h2": profile.witnesses[k][j],
            }
        alive, prev = nxt, j
    raise AssertionError("threshold reported as failing but every radius is attainable")


# -- Lipschitz sampling check ------------------------------------------------


@dataclass
class LowerBoundReport:
    x: Fraction
    trials: int
    oracle_value: Fraction
    max_sampled: Optional[Fraction]
    exceed_count: int
    lipschitz_ok: bool
    witness_attains: bool

    @property
    def passed(self) -> bool:
        return self.exceed_count == 0 and self.lipschitz_ok and self.witness_attains


def sample_lipschitz_batch(space: FiniteSpace, count: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """``count`` random functions min_i(c_i + d(a_i, .)) as integers over a common scale.

    Returns ``(values, scale)`` with ``values[j, u] / scale`` the j-th function at u.
    """
    D = space.int_dist
    n = len(space)
    scale = 4 * space.dist_scale
    span = 4 * int(D.max())
    active = rng.random((count, n)) < rng.random((count, 1))
    active[np.arange(count), rng.integers(0, n, count)] = True
    offsets = rng.integers(-span, span + 1, (count, n))
    big = 8 * span + 1
    cand = offsets[:, :, None] + 4 * D.astype(np.int64)[None, :, :]
    cand = np.where(active[:, :, None], cand, big)
    return cand.min(axis=1), scale


def _batch_deviation(vals: np.ndarray, w: np.ndarray, Lw: int, scale: int, x: Fraction) -> np.ndarray:
    p, q = x.numerator, x.denominator
    vals = _widen(vals, int(np.abs(vals).max(initial=0)) * Lw * q * 2 + abs(p) * scale * Lw)
    mean = vals @ w
    event = vals * (Lw * q) - (mean * q)[:, None] >= p * scale * Lw
    return event.astype(w.dtype) @ w


def check_sampling_lower(space: FiniteSpace, x, trials: int, seed: int = 0, cap: int = DEFAULT_CAP) -> LowerBoundReport:
    """Random 1-Lipschitz functions (and their negations) never beat the oracle."""
    x = as_fraction(x, "x")
    wit = exact_deviation_sup(space, x, cap)
    target = wit.value * space.weight_scale
    g = [-d for d in dist_to_set(space, wit.argmax)]
    attains = deviation_of_function(space, g, x) == wit.value
    if trials <= 0:
        return LowerBoundReport(x, 0, wit.value, None, 0, True, attains)
    rng = np.random.default_rng(seed)
    vals, scale = sample_lipschitz_batch(space, trials, rng)
    D4 = 4 * space.int_dist.astype(np.int64)
    lip_ok = bool((np.abs(vals[:, :, None] - vals[:, None, :]) <= D4[None]).all())
    w = space.int_weight
    dev = np.concatenate([
        _batch_deviation(vals, w, space.weight_scale, scale, x),
        _batch_deviation(-vals, w, space.weight_scale, scale, x),
    ])
    top = int(dev.max())
    return LowerBoundReport(
        x, trials, wit.value, Fraction(top, space.weight_scale), int(np.count_nonzero(dev > target)), lip_ok, attains
    )


# -- random metric spaces ----------------------------------------------------


def random_metric_space(n_points: int, rng: random.Random, max_dist: int = 10, max_weight: int = 10) -> FiniteSpace:
    """Random integer distances repaired by shortest-path closure; random positive weights."""
    d = [[0] * n_points for _ in range(n_points)]
    for i in range(n_points):
        for j in range(i + 1, n_points):
            d[i][j] = d[j][i] = rng.randint(1, max_dist)
    for k in range(n_points):
        for i in range(n_points):
            for j in range(n_points):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    raw = [rng.randint(1, max_weight) for _ in range(n_points)]
    total = sum(raw)
    return from_matrix([f"p{i}" for i in range(n_points)], d, [Fraction(r, total) for r in raw])
