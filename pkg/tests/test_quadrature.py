import math

import pytest

from lipdev.quadrature import QuadratureError, adaptive_simpson


@pytest.mark.parametrize(
    "f, a, b, exact",
    [
        (lambda t: t**3 - 2 * t, 0.0, 2.0, 0.0),
        (math.sin, 0.0, math.pi, 2.0),
        (math.exp, -1.0, 1.0, math.e - 1 / math.e),
        (lambda t: math.sin(t) ** 20, 0.0, math.pi, math.pi * math.comb(20, 10) / 2**20),
        (lambda t: math.exp(-((t - 7.3) ** 2) * 50), 0.0, 40.0, math.sqrt(math.pi / 50)),
    ],
)
def test_known_integrals(f, a, b, exact):
    assert adaptive_simpson(f, a, b, eps=1e-12) == pytest.approx(exact, abs=1e-10)


def test_orientation_and_empty_interval():
    assert adaptive_simpson(math.cos, 1.0, 1.0) == 0.0
    assert adaptive_simpson(math.cos, 1.0, 0.0, eps=1e-12) == pytest.approx(-math.sin(1.0), abs=1e-11)


def test_divergence_reported():
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda t: 1 / t if t else float("inf"), 0.0, 1.0, max_depth=20)
