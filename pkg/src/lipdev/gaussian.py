"""D(x) for standard Gaussian space (R^n, Euclidean distance, gamma_n).

Half-spaces ``{u : <u, e> <= a}`` are extremal.  The distance to such a
half-space is ``(<u, e> - a)_+``, whose law does not depend on n or e, so the
whole computation is one-dimensional:

* mean distance ``m(a) = E (Z - a)_+ = phi(a) - a (1 - Phi(a))``;
* deviation event for threshold a is ``{<u, e> <= a + m(a) - x}``, whose
  measure increases with a while ``m(a) >= x``;
* hence the optimum solves ``m(a*) = x`` and ``D(x) = Phi(a*)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
DEFAULT_TOL = 1e-12


def pdf(a: float) -> float:
    return INV_SQRT_2PI * math.exp(-0.5 * a * a)


def cdf(a: float) -> float:
    return 0.5 * math.erfc(-a / SQRT2)


def sf(a: float) -> float:
    """Upper tail 1 - Phi(a), accurate for large a."""
    return 0.5 * math.erfc(a / SQRT2)


def partial_expectation(a: float) -> float:
    """m(a) = E (Z - a)_+ for standard normal Z."""
    a = float(a)
    if not math.isfinite(a):
        raise ValueError(f"threshold must be finite, got {a}")
    return pdf(a) - a * sf(a)


def solve_threshold(x: float, tol: float = DEFAULT_TOL) -> float:
    """The unique a with m(a) = x, for x > 0."""
    x = float(x)
    if not x > 0:
        raise ValueError(f"solve_threshold needs x > 0, got {x}")
    lo, hi = -x - 10.0, 10.0
    while partial_expectation(lo) < x:
        lo = 2.0 * lo - 1.0
    while partial_expectation(hi) > x:
        hi = 2.0 * hi + 1.0
    # m is decreasing: m(lo) >= x >= m(hi)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        gap = partial_expectation(mid) - x
        if abs(gap) <= 0.01 * tol:
            break
        if gap > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * math.ulp(mid):
            break
    a = 0.5 * (lo + hi)
    for _ in range(3):
        slope = sf(a)
        if slope <= 0:
            break
        step = (partial_expectation(a) - x) / slope
        nxt = a + step
        if not lo <= nxt <= hi:
            break
        a = nxt
    return a


@dataclass(frozen=True)
class HalfSpaceWitness:
    value: float
    a: float | None

    def describe(self) -> str:
        return "a=inf" if self.a is None else f"a={self.a:.12g}"


def D_gauss(x: float, tol: float = DEFAULT_TOL) -> HalfSpaceWitness:
    x = float(x)
    if x <= 0:
        return HalfSpaceWitness(1.0, None)
    a = solve_threshold(x, tol)
    return HalfSpaceWitness(cdf(a), a)


def gauss_tail_bound(x: float) -> float:
    """exp(-x^2/2); the trivial bound 1 for x <= 0."""
    x = float(x)
    return 1.0 if x <= 0 else math.exp(-0.5 * x * x)


def objective(a: float, x: float) -> float:
    """Deviation functional of the half-space with threshold a."""
    slack = partial_expectation(a) - x
    return cdf(a + slack) if slack >= 0 else 0.0


@dataclass
class GridReport:
    x: float
    a_star: float
    D: float
    grid_max: float
    grid_argmax: float
    points: int

    @property
    def passed(self) -> bool:
        return self.grid_max <= self.D + 1e-9 and self.D - self.grid_max <= 1e-6


def default_grid(a_star: float) -> np.ndarray:
    """Step 1e-3 over a wide window plus step 1e-6 within 2e-3 of a*."""
    coarse = np.arange(a_star - 8.0, a_star + 8.0, 1e-3)
    centre = round(a_star, 3)
    fine = centre + np.arange(-2000, 2001) * 1e-6
    return np.union1d(coarse, fine)


def grid_check(x: float, grid=None) -> GridReport:
    """Scan half-space thresholds: none may beat Phi(a*), the nearest must approach it."""
    w = D_gauss(x)
    grid = default_grid(w.a) if grid is None else np.asarray(grid, dtype=float)
    vals = np.array([objective(float(a), x) for a in grid])
    i = int(np.argmax(vals))
    return GridReport(float(x), w.a, w.value, float(vals[i]), float(grid[i]), len(grid))


@dataclass
class MonteCarloReport:
    x: float
    a_star: float
    samples: int
    event_freq: float
    expected: float
    sigma: float
    mean_dist: float
    mean_dist_se: float

    @property
    def passed(self) -> bool:
        return (
            abs(self.event_freq - self.expected) <= 3 * self.sigma
            and abs(self.mean_dist - self.x) <= 3 * self.mean_dist_se
        )


def monte_carlo_check(x: float, samples: int = 10**6, seed: int = 0, dim: int = 2) -> MonteCarloReport:
    """Sample gamma_dim and a random half-space direction; compare with Phi(a*) and m(a*) = x."""
    rng = np.random.default_rng(seed)
    a = solve_threshold(x)
    e = rng.standard_normal(dim)
    e /= np.linalg.norm(e)
    proj = rng.standard_normal((samples, dim)) @ e
    dist = np.maximum(proj - a, 0.0)
    p = cdf(a)
    return MonteCarloReport(
        float(x),
        a,
        samples,
        float(np.mean(proj <= a)),
        p,
        math.sqrt(p * (1 - p) / samples),
        float(dist.mean()),
        float(dist.std(ddof=1) / math.sqrt(samples)),
    )
