import math
from fractions import Fraction as F

import numpy as np
import pytest

from lipdev import sphere as s
from lipdev.oracle import exact_deviation_sup
from lipdev.space import cycle_space

ANGLES = np.linspace(0, math.pi, 41)


def test_cap_measure_examples():
    for n in (2, 3, 5, 12):
        assert s.cap_measure(n, math.pi) == pytest.approx(1.0, abs=1e-10)
        assert s.cap_measure(n, 0.0) == 0.0
    for th in ANGLES:
        assert s.cap_measure(2, th) == pytest.approx(th / math.pi, abs=1e-10)
        assert s.cap_measure(3, th) == pytest.approx((1 - math.cos(th)) / 2, abs=1e-10)


def test_cap_measure_beta_identity():
    # sin^(n-2) integrates to a regularized incomplete beta function
    from scipy.special import betainc

    for n in (4, 7, 20):
        for th in (0.3, 1.0, 2.0, 2.9):
            u = math.sin(th / 2) ** 2
            assert s.cap_measure(n, th) == pytest.approx(betainc((n - 1) / 2, (n - 1) / 2, u), abs=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4, 9])
def test_cap_measure_monotone_and_antipodal(n):
    vals = [s.cap_measure(n, th) for th in ANGLES]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    for th in ANGLES:
        assert s.cap_measure(n, th) + s.cap_measure(n, math.pi - th) == pytest.approx(1.0, abs=1e-10)


def test_cap_mean_dist_closed_forms():
    for th in ANGLES:
        assert s.cap_mean_dist(2, th) == pytest.approx((math.pi - th) ** 2 / (2 * math.pi), abs=1e-10)
        assert s.cap_mean_dist(3, th) == pytest.approx((math.pi - th - math.sin(th)) / 2, abs=1e-10)
    assert s.cap_mean_dist(5, math.pi) == 0.0


@pytest.mark.parametrize("n", [2, 3, 6, 30])
def test_cap_mean_dist_derivative(n):
    h = 1e-5
    for th in np.linspace(0.1, 3.0, 15):
        fd = (s.cap_mean_dist(n, th + h) - s.cap_mean_dist(n, th - h)) / (2 * h)
        assert fd == pytest.approx(-(1 - s.cap_measure(n, th)), abs=1e-6)
    assert s.mean_dist_to_point(n) == pytest.approx(math.pi / 2, abs=1e-12)


def test_D_sphere_examples():
    for n in (2, 3, 8):
        assert s.D_sphere(n, 0).value == 1.0
        assert s.D_sphere(n, 2.0).value == 0.0
    assert s.D_sphere(2, math.pi / 8).value == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(ValueError):
        s.D_sphere(1, 0.5)


def test_circle_closed_form():
    for x in np.linspace(0.01, math.pi / 2 - 0.01, 25):
        assert s.D_sphere(2, x).value == pytest.approx(1 - math.sqrt(2 * x / math.pi), abs=1e-9)


def test_n3_quadrature_vs_analytic():
    for x in np.linspace(0.02, 1.55, 20):
        w = s.D_sphere(3, x)
        assert w.value == pytest.approx(s.closed_form_D(3, x), abs=1e-9)
        assert s.cap_mean_dist(3, w.theta) == pytest.approx(x, abs=1e-11)


@pytest.mark.parametrize("n", [2, 3, 10])
def test_D_sphere_monotone(n):
    vals = [s.D_sphere(n, x).value for x in np.linspace(-0.2, 1.7, 60)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] == 0.0


def test_higher_dimensions_concentrate():
    # larger n concentrates more: D decreases with n at fixed x
    vals = [s.D_sphere(n, 0.3).value for n in (2, 3, 5, 10, 40)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_cycle_converges_to_circle():
    grid = [F(j, 42) for j in range(1, 21)]
    gaps = {}
    for k in (8, 12, 16):
        cyc = cycle_space(k, F(2, k))
        gaps[k] = max(abs(float(exact_deviation_sup(cyc, r).value) - s.D_sphere(2, math.pi * r).value) for r in grid)
    assert gaps[16] < gaps[12] < gaps[8] < 0.15
    assert gaps[12] * 12 < 1.5
