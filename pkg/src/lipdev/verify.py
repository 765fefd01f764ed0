"""Cross-checks between the specialised engines and the brute-force oracle.

Each check returns a :class:`CheckResult`.  Reports contain no timings or
other run-dependent data, so identical arguments give identical reports.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import cube, gaussian, sphere
from .oracle import check_sampling_lower, exact_deviation_sup, is_isoperimetric, iso_profile, random_metric_space
from .space import FiniteSpace, cube_space, cycle_space, deviation_functional, mean_dist, neighborhood


@dataclass
class CheckResult:
    name: str
    passed: Optional[bool]  # None marks an informational entry
    detail: str
    counterexample: Optional[dict] = field(default=None)

    @property
    def status(self) -> str:
        return {True: "PASS", False: "FAIL", None: "INFO"}[self.passed]


def _q(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def cube_grid(n: int) -> list[Fraction]:
    return [Fraction(k, 8) for k in range(8 * n + 1)]


def check_cube_vs_oracle(dims=(1, 2, 3, 4), workers: int = 1) -> CheckResult:
    count = 0
    for n in dims:
        space = cube_space(n)
        for x in cube_grid(n):
            exact = cube.D_cube(n, x).value
            brute = exact_deviation_sup(space, x, workers=workers).value
            count += 1
            if exact != brute:
                return CheckResult(
                    "cube_vs_oracle", False, f"n={n} x={_q(x)}",
                    {"n": n, "x": _q(x), "D_cube": _q(exact), "oracle": _q(brute)},
                )
    return CheckResult("cube_vs_oracle", True, f"D_cube equals the oracle at {count} (n, x) pairs, n in {list(dims)}")


def check_harper(dims=(1, 2, 3, 4), workers: int = 1) -> CheckResult:
    """Initial segments attain the profile minimum at every (k, h); the chosen tie-break is the one that does."""
    cells = 0
    for n in dims:
        prof = iso_profile(cube_space(n), workers=workers)
        for k in range(1, (1 << n) + 1):
            for h in range(n + 1):
                seg = Fraction(cube.segment_neighborhood_size(n, k, h), 1 << n)
                cells += 1
                if seg != prof.value(k, h):
                    return CheckResult(
                        "harper_extremality", False, f"n={n} k={k} h={h}",
                        {"n": n, "k": k, "h": h, "segment": _q(seg), "profile_min": _q(prof.value(k, h))},
                    )
    verdict = cube.select_tiebreak()
    ok = verdict[cube.TIEBREAK]
    detail = f"{cells} (k, h) cells; tie-break {cube.TIEBREAK!r}; checks at n=3,4: " + ", ".join(
        f"{tb}={'pass' if v else 'fail'}" for tb, v in verdict.items()
    )
    return CheckResult("harper_extremality", ok, detail)


def check_segment_neighborhoods(dims=(1, 2, 3, 4)) -> CheckResult:
    """segment(t)^h computed generically equals segment(N^h(t))."""
    for n in dims:
        space = cube_space(n)
        order = cube.build_order(n)
        for t in range(1, (1 << n) + 1):
            A = order.segment_bits(t)
            for h in range(n + 1):
                expect = order.segment_bits(cube.segment_neighborhood_size(n, t, h))
                if neighborhood(space, A, h) != expect:
                    return CheckResult("segment_neighborhoods", False, f"n={n} t={t} h={h}", {"n": n, "t": t, "h": h})
            if mean_dist(space, A) != cube.mean_dist_segment(n, t):
                return CheckResult("segment_neighborhoods", False, f"mean distance differs at n={n} t={t}")
    return CheckResult("segment_neighborhoods", True, f"rank-table neighborhoods and means match direct computation, n in {list(dims)}")


def check_cube_isoperimetric(dims=(1, 2, 3, 4)) -> CheckResult:
    """C_n is isoperimetric, and its h-independent minimizers reproduce D(x)."""
    for n in dims:
        space = cube_space(n)
        verdict = is_isoperimetric(space)
        if not verdict.is_isoperimetric:
            return CheckResult("cube_isoperimetric", False, f"C_{n} reported non-isoperimetric", verdict.to_json(space))
        for x in cube_grid(n):
            best = max(deviation_functional(space, A, x) for _, A in verdict.witnesses)
            if best != exact_deviation_sup(space, x).value:
                return CheckResult("cube_isoperimetric", False, f"witness family misses D at n={n} x={_q(x)}")
    return CheckResult("cube_isoperimetric", True, f"C_n isoperimetric and witness sets attain D(x), n in {list(dims)}")


def random_spaces(count: int = 20, max_points: int = 10, seed: int = 0) -> list[FiniteSpace]:
    rng = random.Random(seed)
    return [random_metric_space(rng.randint(2, max_points), rng) for _ in range(count)]


def x_grid(space: FiniteSpace, points: int = 8) -> list[Fraction]:
    """``points`` levels from 0 up to the largest mean distance to a singleton."""
    top = max(mean_dist(space, 1 << i) for i in range(len(space)))
    return [top * j / (points - 1) for j in range(points)]


def check_lipschitz_sampling(spaces: int = 20, max_points: int = 10, trials: int = 10_000, seed: int = 0, workers: int = 1) -> CheckResult:
    runs = 0
    worst = Fraction(0)
    for s_idx, space in enumerate(random_spaces(spaces, max_points, seed)):
        for j, x in enumerate(x_grid(space)):
            rep = check_sampling_lower(space, x, trials, seed=seed * 1_000_003 + s_idx * 101 + j)
            runs += 1
            if not rep.passed:
                return CheckResult(
                    "lipschitz_sampling", False, f"space #{s_idx} x={_q(x)}",
                    {"space": space.to_json(), "x": _q(x), "oracle": _q(rep.oracle_value),
                     "max_sampled": _q(rep.max_sampled) if rep.max_sampled is not None else None,
                     "exceed_count": rep.exceed_count, "witness_attains": rep.witness_attains},
                )
            if rep.max_sampled is not None:
                worst = max(worst, rep.max_sampled - rep.oracle_value)
    return CheckResult(
        "lipschitz_sampling", True,
        f"{runs} (space, x) pairs, {trials} samples each (plus negations); no sample beats the oracle; "
        f"-d(argmax, .) attains it; max sampled - oracle = {_q(worst)}",
    )


def check_gaussian(seed: int = 0, samples: int = 10**6) -> CheckResult:
    issues = []
    m0 = gaussian.partial_expectation(0.0)
    if abs(m0 - 1 / math.sqrt(2 * math.pi)) > 1e-12:
        issues.append(f"m(0)={m0!r}")
    half = gaussian.D_gauss(1 / math.sqrt(2 * math.pi)).value
    if abs(half - 0.5) > 1e-10:
        issues.append(f"D(1/sqrt(2pi))={half!r}")
    for x in (0.1, 0.5, 1.0, 2.0):
        rep = gaussian.grid_check(x)
        if not rep.passed:
            issues.append(f"grid_check x={x}: grid max {rep.grid_max!r} vs D {rep.D!r}")
    mc = gaussian.monte_carlo_check(1.0, samples=samples, seed=seed)
    if not mc.passed:
        issues.append(f"monte carlo: freq {mc.event_freq} vs {mc.expected} (sigma {mc.sigma})")
    for x in (1e-4, 1e-3, 0.01, 0.1, 1.0, 10.0):
        a = gaussian.solve_threshold(x)
        if abs(gaussian.partial_expectation(a) - x) > gaussian.DEFAULT_TOL:
            issues.append(f"round trip x={x}")
    if issues:
        return CheckResult("gaussian_closed_structure", False, "; ".join(issues))
    return CheckResult(
        "gaussian_closed_structure", True,
        f"m(0), D(1/sqrt(2pi))=1/2, grid checks at x in (0.1, 0.5, 1, 2), Monte Carlo within "
        f"{abs(mc.event_freq - mc.expected) / mc.sigma:.2f} sigma",
    )


def sphere_grid(points: int = 20) -> list[Fraction]:
    """x / pi for ``points`` equispaced levels strictly inside (0, pi/2)."""
    return [Fraction(j, 2 * (points + 1)) for j in range(1, points + 1)]


def check_sphere(cycle_points: int = 12, workers: int = 1) -> CheckResult:
    issues = []
    grid = sphere_grid()
    err2 = max(abs(sphere.D_sphere(2, math.pi * r).value - (1 - math.sqrt(2 * float(r)))) for r in grid)
    if err2 > 1e-9:
        issues.append(f"circle closed form error {err2:.3g}")
    err3m = max(abs(sphere.cap_mean_dist(3, th) - sphere.closed_form_mean_dist(3, th)) for th in _angles())
    err3 = max(abs(sphere.D_sphere(3, math.pi * r).value - sphere.closed_form_D(3, math.pi * r)) for r in grid)
    if max(err3m, err3) > 1e-9:
        issues.append(f"n=3 quadrature vs analytic error {max(err3m, err3):.3g}")
    # cycle with arc length in units of pi, so x = pi * r is queried at r
    cyc = cycle_space(cycle_points, Fraction(2, cycle_points))
    gap = max(
        abs(float(exact_deviation_sup(cyc, r, workers=workers).value) - sphere.D_sphere(2, math.pi * r).value)
        for r in grid
    )
    if gap > 0.15:
        issues.append(f"{cycle_points}-cycle gap {gap:.4f}")
    detail = f"circle err {err2:.2e}, n=3 err {max(err3m, err3):.2e}, {cycle_points}-cycle max gap {gap:.4f}"
    return CheckResult("sphere_closed_forms", not issues, "; ".join(issues) or detail)


def _angles(count: int = 64) -> list[float]:
    return [math.pi * i / count for i in range(count + 1)]


def check_domination(max_n: int = 10) -> CheckResult:
    for n in range(1, max_n + 1):
        for k in range(0, 2 * n + 5):
            x = Fraction(k, 4)
            d = cube.D_cube(n, x).value
            if d > cube.mcdiarmid_bound(n, x):
                return CheckResult("domination", False, f"cube n={n} x={_q(x)}")
    for x in (0.5, 1.0, 2.0, 4.0):
        if gaussian.D_gauss(x).value > gaussian.gauss_tail_bound(x) + 1e-12:
            return CheckResult("domination", False, f"gauss x={x}")
    return CheckResult("domination", True, f"D_cube <= exp(-2x^2/n) for n <= {max_n} (x step 1/4); D_gauss <= exp(-x^2/2)")


def check_boundaries(max_n: int = 10, seed: int = 0) -> CheckResult:
    issues = []
    for n in range(1, max_n + 1):
        for x in (Fraction(0), Fraction(-1, 3), Fraction(-n)):
            if cube.D_cube(n, x).value != 1:
                issues.append(f"cube n={n} x={_q(x)} not 1")
        above = Fraction(n, 2) + Fraction(1, 64)
        if cube.D_cube(n, above).value != 0 or cube.D_cube(n, Fraction(n, 2)).value == 0:
            issues.append(f"cube n={n} support edge")
        sweep = [cube.D_cube(n, Fraction(k, 8)).value for k in range(-8, 4 * n + 9)]
        if any(b > a for a, b in zip(sweep, sweep[1:])):
            issues.append(f"cube n={n} sweep not monotone")
    gs = [gaussian.D_gauss(x / 10).value for x in range(-10, 61)]
    if gs[0] != 1.0 or gs[10] != 1.0 or any(b > a for a, b in zip(gs, gs[1:])):
        issues.append("gauss sweep")
    for n in (2, 3, 5):
        ss = [sphere.D_sphere(n, x / 20).value for x in range(-5, 40)]
        if ss[0] != 1.0 or ss[5] != 1.0 or ss[-1] != 0.0 or any(b > a for a, b in zip(ss, ss[1:])):
            issues.append(f"sphere n={n} sweep")
    for space in random_spaces(5, 8, seed):
        grid = [Fraction(-1)] + x_grid(space) + [x_grid(space)[-1] + 1]
        vals = [exact_deviation_sup(space, x).value for x in grid]
        if vals[0] != 1 or vals[1] != 1 or vals[-1] != 0 or any(b > a for a, b in zip(vals, vals[1:])):
            issues.append("oracle sweep on a random space")
    return CheckResult("boundary_laws", not issues, "; ".join(issues) or "D=1 for x<=0, D_cube=0 beyond n/2, all sweeps non-increasing")


def isoperimetric_report(name: str, space: FiniteSpace, cap: int) -> CheckResult:
    verdict = is_isoperimetric(space, cap)
    word = "isoperimetric" if verdict.is_isoperimetric else "not isoperimetric"
    return CheckResult(f"isoperimetric[{name}]", None, f"{len(space)} points: {word}", verdict.to_json(space))


def run_all(trials: int = 10_000, seed: int = 0, workers: int = 1) -> list[CheckResult]:
    return [
        check_cube_vs_oracle(workers=workers),
        check_harper(workers=workers),
        check_segment_neighborhoods(),
        check_cube_isoperimetric(),
        check_lipschitz_sampling(trials=trials, seed=seed, workers=workers),
        check_gaussian(seed=seed),
        check_sphere(workers=workers),
        check_domination(),
        check_boundaries(seed=seed),
    ]
