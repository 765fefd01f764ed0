"""Finite probability metric spaces and the exact functionals built on them.

Subsets of a space are plain Python ints used as bit vectors: bit ``i`` set
means point ``i`` belongs to the set.  Every value returned here is an exact
:class:`fractions.Fraction`.
"""
from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np

# Default point cap for product constructions (the distance table is |V|^2).
POWER_CAP = 256

_INT64_SAFE = 2**62


class SpaceError(ValueError):
    """Invalid space data: a violated metric or measure axiom, or bad input."""


class CapExceededError(RuntimeError):
    """An enumeration would exceed its configured size cap."""


def as_fraction(value, where: str = "value") -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise SpaceError(f"{where}: expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise SpaceError(f"{where}: non-finite number {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise SpaceError(f"{where}: cannot parse {value!r} as a rational") from None
    raise SpaceError(f"{where}: expected a rational, got {type(value).__name__}")


def _lcm_of_denominators(values: Iterable[Fraction]) -> int:
    return reduce(math.lcm, (v.denominator for v in values), 1)


def exact_array(values, bound: int) -> np.ndarray:
    """Integer array that is int64 when ``bound`` is safely representable."""
    dtype = np.int64 if bound < _INT64_SAFE else object
    arr = np.array(values, dtype=object)
    return arr.astype(dtype) if dtype is np.int64 else arr


@dataclass(frozen=True)
class FiniteSpace:
    labels: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]
    weight: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << len(self.labels)) - 1

    @cached_property
    def dist_scale(self) -> int:
        return _lcm_of_denominators(itertools.chain.from_iterable(self.dist))

    @cached_property
    def weight_scale(self) -> int:
        return _lcm_of_denominators(self.weight)

    @cached_property
    def int_dist(self) -> np.ndarray:
        """Distances times ``dist_scale`` as an exact integer matrix."""
        s = self.dist_scale
        rows = [[int(d * s) for d in row] for row in self.dist]
        top = max((max(r) for r in rows), default=0)
        return exact_array(rows, top * len(self) * 4 + 1)

    @cached_property
    def int_weight(self) -> np.ndarray:
        """Weights times ``weight_scale``; sums to ``weight_scale``."""
        s = self.weight_scale
        return exact_array([int(w * s) for w in self.weight], s + 1)

    @cached_property
    def diameter(self) -> Fraction:
        return max(itertools.chain.from_iterable(self.dist))

    @cached_property
    def radii(self) -> tuple[Fraction, ...]:
        """Sorted distinct pairwise distances, including 0."""
        return tuple(sorted(set(itertools.chain.from_iterable(self.dist))))

    @cached_property
    def is_uniform(self) -> bool:
        return len(set(self.weight)) == 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise SpaceError(f"unknown point label {label!r}") from None

    def subset(self, items: Iterable) -> int:
        """Bit vector for a collection of labels or point indices."""
        bits = 0
        for item in items:
            i = self.index(item) if isinstance(item, str) else int(item)
            if not 0 <= i < len(self):
                raise SpaceError(f"point index {i} out of range")
            bits |= 1 << i
        return bits

    def members(self, bits: int) -> list[int]:
        return [i for i in range(len(self)) if bits >> i & 1]

    def member_labels(self, bits: int) -> list[str]:
        return [self.labels[i] for i in self.members(bits)]

    def measure(self, bits: int) -> Fraction:
        return sum((self.weight[i] for i in self.members(bits)), Fraction(0))

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "dist": [[_fmt(d) for d in row] for row in self.dist],
            "weight": [_fmt(w) for w in self.weight],
        }


def _fmt(q: Fraction):
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def from_matrix(labels: Sequence, dist: Sequence[Sequence], weight: Sequence | None = None) -> FiniteSpace:
    """Validate and build a finite probability metric space.

    ``weight`` defaults to the uniform measure.  Raises :class:`SpaceError`
    naming the first violated axiom.
    """
    labels = tuple(str(l) for l in labels)
    n = len(labels)
    if n == 0:
        raise SpaceError("space must have at least one point")
    if len(set(labels)) != n:
        raise SpaceError("point labels must be distinct")
    if len(dist) != n or any(len(row) != n for row in dist):
        raise SpaceError(f"dist must be a {n}x{n} matrix")
    d = tuple(tuple(as_fraction(v, f"dist[{i}][{j}]") for j, v in enumerate(row)) for i, row in enumerate(dist))
    if weight is None:
        w = (Fraction(1, n),) * n
    else:
        if len(weight) != n:
            raise SpaceError(f"weight must have {n} entries, got {len(weight)}")
        w = tuple(as_fraction(v, f"weight[{i}]") for i, v in enumerate(weight))

    for i in range(n):
        if d[i][i] != 0:
            raise SpaceError(f"dist[{i}][{i}] = {d[i][i]} but must be 0")
        for j in range(i + 1, n):
            if d[i][j] != d[j][i]:
                raise SpaceError(f"asymmetry: dist[{i}][{j}] = {d[i][j]} != dist[{j}][{i}] = {d[j][i]}")
            if d[i][j] <= 0:
                raise SpaceError(f"dist[{i}][{j}] = {d[i][j]}: distinct points need positive distance")
    for i, wi in enumerate(w):
        if wi < 0:
            raise SpaceError(f"weight[{i}] = {wi} is negative")
    total = sum(w, Fraction(0))
    if total != 1:
        raise SpaceError(f"weights sum to {total}, not 1")

    space = FiniteSpace(labels, d, w)
    _check_triangle(space)
    return space


def _check_triangle(space: FiniteSpace) -> None:
    D = space.int_dist
    for k in range(len(space)):
        bad = D > D[:, k : k + 1] + D[k : k + 1, :]
        if bad.any():
            i, j = (int(v) for v in np.argwhere(bad)[0])
            raise SpaceError(
                f"triangle violation at (i,j,k)=({i},{j},{k}): "
                f"dist[{i}][{j}] = {space.dist[i][j]} > {space.dist[i][k]} + {space.dist[k][j]}"
            )


# -- file format -------------------------------------------------------------


def loads_space(text: str) -> FiniteSpace:
    """Parse the JSON space format; decimals are read as exact rationals."""
    try:
        obj = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise SpaceError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise SpaceError("space file must contain a JSON object")
    missing = {"labels", "dist"} - obj.keys()
    if missing:
        raise SpaceError(f"space file missing key(s): {', '.join(sorted(missing))}")
    return from_matrix(obj["labels"], obj["dist"], obj.get("weight"))


def load_space(path) -> FiniteSpace:
    with open(path) as fh:
        text = fh.read()
    try:
        return loads_space(text)
    except SpaceError as exc:
        raise SpaceError(f"{path}: {exc}") from None


def dumps_space(space: FiniteSpace) -> str:
    return json.dumps(space.to_json(), indent=1)


# -- built-in spaces ---------------------------------------------------------


def two_point() -> FiniteSpace:
    return from_matrix(["0", "1"], [[0, 1], [1, 0]])


def path_space(k: int) -> FiniteSpace:
    return from_matrix([str(i) for i in range(k)], [[abs(i - j) for j in range(k)] for i in range(k)])


def cycle_space(k: int, scale: Fraction | int = 1) -> FiniteSpace:
    """``k`` equally weighted points on a cycle; distance is ``scale`` times hop count."""
    scale = Fraction(scale)
    return from_matrix(
        [str(i) for i in range(k)],
        [[scale * min(abs(i - j), k - abs(i - j)) for j in range(k)] for i in range(k)],
    )


def diamond() -> FiniteSpace:
    """The diamond graph (K4 minus the edge c-d) with path distance."""
    return from_matrix(
        ["a", "b", "c", "d"],
        [[0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 2], [1, 1, 2, 0]],
    )


def hamming_power(base: FiniteSpace, n: int, mode: str = "count", cap: int = POWER_CAP) -> FiniteSpace:
    """n-fold product of ``base`` with the product measure.

    ``mode="count"`` counts differing coordinates (Hamming distance);
    ``mode="sum"`` adds the base distances coordinate-wise.
    """
    if n < 1:
        raise SpaceError("power exponent must be a positive integer")
    if mode not in ("count", "sum"):
        raise SpaceError(f"unknown power mode {mode!r}")
    size = len(base) ** n
    if size > cap:
        raise CapExceededError(f"{len(base)}^{n} = {size} points exceeds the cap of {cap}")
    tuples = list(itertools.product(range(len(base)), repeat=n))
    sep = "" if all(len(l) == 1 for l in base.labels) else "."
    labels = [sep.join(base.labels[c] for c in t) for t in tuples]
    bd = base.dist
    if mode == "count":
        dist = [[sum(a != b for a, b in zip(s, t)) for t in tuples] for s in tuples]
    else:
        dist = [[sum((bd[a][b] for a, b in zip(s, t)), Fraction(0)) for t in tuples] for s in tuples]
    weight = [math.prod(base.weight[c] for c in t) for t in tuples]
    return from_matrix(labels, dist, weight)


def cube_space(n: int) -> FiniteSpace:
    """C_n = {0,1}^n; point index v has label ``format(v, '0nb')``."""
    return hamming_power(two_point(), n)


# -- functionals -------------------------------------------------------------


def _nonempty(space: FiniteSpace, bits: int) -> None:
    if bits <= 0:
        raise SpaceError("the set A must be nonempty")
    if bits > space.full:
        raise SpaceError("subset has bits beyond the space's points")


def dist_to_set(space: FiniteSpace, A: int) -> list[Fraction]:
    """d(A, u) for every point u."""
    _nonempty(space, A)
    rows = [space.dist[a] for a in space.members(A)]
    return [min(col) for col in zip(*rows)]


def mean_dist(space: FiniteSpace, A: int) -> Fraction:
    return sum((w * d for w, d in zip(space.weight, dist_to_set(space, A))), Fraction(0))


def mean_dist_by_layers(space: FiniteSpace, A: int) -> Fraction:
    """Mean distance to A as the layer-cake sum of (1 - mu(A^h)) over jump gaps."""
    levels = sorted(set(dist_to_set(space, A)))
    total = Fraction(0)
    for lo, hi in zip(levels, levels[1:]):
        total += (hi - lo) * (1 - space.measure(neighborhood(space, A, lo)))
    return total


def neighborhood(space: FiniteSpace, A: int, h) -> int:
    """A^h = {u : d(u, A) <= h} as a bit vector."""
    h = as_fraction(h, "h")
    if h < 0:
        raise SpaceError("radius h must be nonnegative")
    d = dist_to_set(space, A)
    return sum(1 << u for u, du in enumerate(d) if du <= h)


def deviation_functional(space: FiniteSpace, A: int, x) -> Fraction:
    """mu{g - E g >= x} for g = -d(A, .), i.e. mu{u : d(A, u) <= m(A) - x}."""
    x = as_fraction(x, "x")
    d = dist_to_set(space, A)
    slack = sum((w * du for w, du in zip(space.weight, d)), Fraction(0)) - x
    return sum((w for w, du in zip(space.weight, d) if du <= slack), Fraction(0))


def expectation(space: FiniteSpace, f: Sequence) -> Fraction:
    _check_len(space, f)
    return sum((w * as_fraction(v) for w, v in zip(space.weight, f)), Fraction(0))


def is_lipschitz(space: FiniteSpace, f: Sequence) -> bool:
    _check_len(space, f)
    vals = [as_fraction(v) for v in f]
    n = len(space)
    return all(abs(vals[i] - vals[j]) <= space.dist[i][j] for i in range(n) for j in range(i + 1, n))


def deviation_of_function(space: FiniteSpace, f: Sequence, x) -> Fraction:
    """mu{f - E f >= x}."""
    x = as_fraction(x, "x")
    vals = [as_fraction(v) for v in f]
    cut = expectation(space, vals) + x
    return sum((w for w, v in zip(space.weight, vals) if v >= cut), Fraction(0))


def _check_len(space: FiniteSpace, f: Sequence) -> None:
    if len(f) != len(space):
        raise SpaceError(f"function has {len(f)} values for a {len(space)}-point space")


def sample_lipschitz(space: FiniteSpace, anchors=None, seed=None) -> list[Fraction]:
    """f(u) = min_i (c_i + d(a_i, u)), which is 1-Lipschitz for any anchors.

    ``anchors`` is a list of ``(point, offset)`` pairs (point as index or
    label).  When omitted, a random nonempty anchor set is drawn from ``seed``.
    """
    if anchors is None:
        rng = random.Random(seed)
        n = len(space)
        denom = 4 * space.dist_scale
        span = int(space.diameter * denom)
        k = rng.randint(1, n)
        anchors = [(p, Fraction(rng.randint(-span, span), denom)) for p in rng.sample(range(n), k)]
    if not anchors:
        raise SpaceError("sample_lipschitz needs at least one anchor")
    resolved = [(space.index(p) if isinstance(p, str) else int(p), as_fraction(c, "offset")) for p, c in anchors]
    return [min(c + space.dist[a][u] for a, c in resolved) for u in range(len(space))]
