"""Adaptive Simpson quadrature."""
from __future__ import annotations

import math
from typing import Callable


class QuadratureError(ArithmeticError):
    pass


def adaptive_simpson(
    f: Callable[[float], float], a: float, b: float, eps: float = 1e-10, max_depth: int = 50, min_depth: int = 4
) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``eps``.

    Classical recursive bisection with the Richardson correction
    ``(S2 - S1) / 15``.  The first ``min_depth`` levels are always split, so
    a peak missed by the initial five samples cannot be accepted as zero.
    Raises :class:`QuadratureError` if ``max_depth`` is reached without
    meeting the tolerance.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, eps, max_depth, min_depth)
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _refine(f, a, b, fa, fm, fb, whole, eps, max_depth, min_depth)


def _refine(f, a, b, fa, fm, fb, whole, eps, depth, forced):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if forced <= 0 and abs(delta) <= 15.0 * eps:
        return left + right + delta / 15.0
    if depth <= 0 or not math.isfinite(delta):
        raise QuadratureError(f"adaptive Simpson did not converge on [{a}, {b}]")
    return _refine(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1, forced - 1) + _refine(
        f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1, forced - 1
    )
