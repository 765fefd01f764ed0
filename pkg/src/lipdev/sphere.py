"""D(x) on the unit sphere S^{n-1} with geodesic distance and normalized Haar measure.

Geodesic caps ``C_theta`` around a pole are extremal and ``C_theta^h =
C_{min(theta + h, pi)}``, so with ``F(theta) = mu(C_theta)`` the mean
distance to a cap is ``m(theta) = int_theta^pi (1 - F(s)) ds`` and, as in
the Gaussian case, the optimum solves ``m(theta*) = x`` with
``D(x) = F(theta*)``.

``F`` itself is a ratio of sin-power integrals.  Each dimension keeps a
Chebyshev interpolant of ``F`` (and of ``m``) built once from adaptive
Simpson values, so repeated evaluations of ``m`` stay cheap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Chebyshev

from .quadrature import adaptive_simpson

PI = math.pi
CAP_TOL = 1e-10
ROOT_TOL = 1e-12
MAX_DEGREE = 4096


def _check(n: int, theta: float | None = None) -> None:
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"ambient dimension n must be an integer >= 2, got {n!r}")
    if theta is not None and not 0.0 <= theta <= PI:
        raise ValueError(f"cap angle must lie in [0, pi], got {theta}")


def _density(n: int):
    k = n - 2
    if k == 0:
        return lambda t: 1.0
    return lambda t: math.sin(t) ** k


@lru_cache(maxsize=None)
def _normalizer(n: int) -> float:
    return adaptive_simpson(_density(n), 0.0, PI, eps=1e-14)


def cap_measure(n: int, theta: float) -> float:
    """mu(C_theta) by direct adaptive Simpson quadrature."""
    _check(n, theta)
    z = _normalizer(n)
    return adaptive_simpson(_density(n), 0.0, theta, eps=CAP_TOL * z) / z


class _CapCache:
    """Chebyshev interpolants of F and m on [0, pi] for one dimension."""

    def __init__(self, n: int):
        self.n = n
        dens = _density(n)
        z = _normalizer(n)
        deg = 32
        while True:
            nodes = np.sort(np.polynomial.chebyshev.chebpts1(deg + 1) * (PI / 2) + PI / 2)
            edges = np.concatenate([[0.0], nodes])
            pieces = [adaptive_simpson(dens, a, b, eps=1e-15) for a, b in zip(edges[:-1], edges[1:])]
            F = Chebyshev.fit(nodes, np.cumsum(pieces) / z, deg, domain=[0, PI])
            if np.max(np.abs(F.coef[-4:])) < 1e-14 or deg >= MAX_DEGREE:
                break
            deg *= 2
        self.F = F
        one_minus_F = lambda s: 1.0 - float(F(s))
        tail_edges = np.concatenate([nodes, [PI]])
        pieces = [adaptive_simpson(one_minus_F, a, b, eps=1e-15) for a, b in zip(tail_edges[:-1], tail_edges[1:])]
        m_nodes = np.cumsum(pieces[::-1])[::-1]
        self.m = Chebyshev.fit(nodes, m_nodes, deg, domain=[0, PI])
        self.one_minus_F = one_minus_F


@lru_cache(maxsize=None)
def _cache(n: int) -> _CapCache:
    return _CapCache(n)


def cap_mean_dist(n: int, theta: float) -> float:
    """m(theta) = int_theta^pi (1 - mu(C_s)) ds, outer adaptive Simpson over the cached F."""
    _check(n, theta)
    return adaptive_simpson(_cache(n).one_minus_F, theta, PI, eps=1e-13)


def mean_dist_to_point(n: int) -> float:
    return cap_mean_dist(n, 0.0)


def solve_cap_angle(n: int, x: float, tol: float = ROOT_TOL) -> float:
    """theta* in [0, pi] with m(theta*) = x, for 0 < x <= m(0)."""
    _check(n)
    c = _cache(n)
    lo, hi = 0.0, PI
    # bisection on the interpolated m (decreasing), then Newton on the quadrature m
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if float(c.m(mid)) > x:
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    for _ in range(4):
        gap = cap_mean_dist(n, theta) - x
        slope = c.one_minus_F(theta)
        if abs(gap) <= tol or slope <= 0:
            break
        theta = min(max(theta + gap / slope, 0.0), PI)
    return theta


@dataclass(frozen=True)
class CapWitness:
    value: float
    theta: float | None
    note: str = ""

    def describe(self) -> str:
        if self.theta is None:
            return self.note
        return f"theta={self.theta:.12g}" + (f" {self.note}" if self.note else "")


def D_sphere(n: int, x: float, tol: float = ROOT_TOL) -> CapWitness:
    _check(n)
    x = float(x)
    if x <= 0:
        return CapWitness(1.0, PI)
    m0 = mean_dist_to_point(n)
    if x > m0:
        return CapWitness(0.0, None, "infeasible: x exceeds the mean distance to a point")
    theta = solve_cap_angle(n, x, tol)
    return CapWitness(cap_measure(n, theta), theta)


# -- closed forms for n = 2 (circle) and n = 3 ---------------------------------


def closed_form_mean_dist(n: int, theta: float) -> float:
    if n == 2:
        return (PI - theta) ** 2 / (2 * PI)
    if n == 3:
        return (PI - theta - math.sin(theta)) / 2
    raise ValueError("closed forms exist only for n in {2, 3}")


def closed_form_D(n: int, x: float) -> float:
    """Reference value from the analytic cap measure and mean distance."""
    x = float(x)
    if x <= 0:
        return 1.0
    if x > PI / 2:
        return 0.0
    if n == 2:
        return 1.0 - math.sqrt(2 * x / PI)
    if n == 3:
        lo, hi = 0.0, PI
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if closed_form_mean_dist(3, mid) > x:
                lo = mid
            else:
                hi = mid
        return (1 - math.cos(0.5 * (lo + hi))) / 2
    raise ValueError("closed forms exist only for n in {2, 3}")
