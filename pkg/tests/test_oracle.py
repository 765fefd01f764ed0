import random
from fractions import Fraction as F

import pytest

from lipdev.oracle import (
    check_sampling_lower,
    deviation_values,
    exact_deviation_sup,
    is_isoperimetric,
    iso_profile,
    random_metric_space,
)
from lipdev.space import (
    CapExceededError,
    cube_space,
    cycle_space,
    deviation_functional,
    diamond,
    dist_to_set,
    deviation_of_function,
    from_matrix,
    hamming_power,
    mean_dist,
    neighborhood,
    two_point,
)


def slow_sup(space, x):
    """Reference D(x): Fraction arithmetic over every nonempty subset, no numpy."""
    return max(deviation_functional(space, A, x) for A in range(1, space.full + 1))


def slow_profile(space, t, h):
    return min(
        space.measure(neighborhood(space, A, h)) for A in range(1, space.full + 1) if space.measure(A) >= t
    )


@pytest.fixture(scope="module")
def small_spaces():
    rng = random.Random(11)
    return [random_metric_space(rng.randint(1, 6), rng) for _ in range(12)] + [cube_space(2), diamond()]


def test_vectorized_functional_matches_fraction_path(small_spaces):
    for space in small_spaces:
        for x in (F(-1), F(0), F(1, 3), F(2), F(7, 2)):
            vals = deviation_values(space, x)
            for A in range(1, space.full + 1):
                assert F(int(vals[A - 1]), space.weight_scale) == deviation_functional(space, A, x)


def test_sup_matches_reference(small_spaces):
    for space in small_spaces:
        top = max(mean_dist(space, 1 << i) for i in range(len(space)))
        for x in [top * j / 5 for j in range(-1, 7)]:
            w = exact_deviation_sup(space, x)
            assert w.value == slow_sup(space, x)
            assert deviation_functional(space, w.argmax, x) == w.value
            assert mean_dist(space, w.argmax) == w.mean_dist_at_argmax


def test_profile_matches_reference(small_spaces):
    for space in small_spaces:
        prof = iso_profile(space)
        for k, t in enumerate(prof.thresholds, start=1):
            for h in prof.radii:
                assert prof.value(k, h) == slow_profile(space, t, h)
                A = prof.witness(k, h)
                assert space.measure(A) >= t
                assert space.measure(neighborhood(space, A, h)) == prof.value(k, h)


def test_profile_examples():
    prof = iso_profile(cube_space(2))
    assert prof.value(1, 1) == F(3, 4)
    for space in (cube_space(3), diamond(), random_metric_space(6, random.Random(2))):
        prof = iso_profile(space)
        last = len(prof.thresholds)
        assert all(prof.value(last, h) == 1 for h in prof.radii)
        assert all(prof.value(k, space.diameter) == 1 for k in range(1, last + 1))
        for k in range(1, last + 1):
            row = [prof.value(k, h) for h in prof.radii]
            assert row == sorted(row)
            if k > 1:
                assert all(a >= b for a, b in zip(row, (prof.value(k - 1, h) for h in prof.radii)))


def test_profile_tie_break_lowest_bits():
    prof = iso_profile(cube_space(2))
    # every singleton is optimal; the lowest bit vector is reported
    assert prof.witness(1, 1) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cubes_are_isoperimetric(n):
    verdict = is_isoperimetric(cube_space(n))
    assert verdict.is_isoperimetric
    assert len(verdict.witnesses) == 1 << n


def test_single_point_is_isoperimetric():
    assert is_isoperimetric(from_matrix(["p"], [[0]])).is_isoperimetric


def test_non_isoperimetric_counterexample():
    rng = random.Random(0)
    for _ in range(200):
        space = random_metric_space(rng.randint(3, 7), rng)
        verdict = is_isoperimetric(space)
        if not verdict.is_isoperimetric:
            break
    else:
        pytest.fail("no non-isoperimetric space found")
    ce = verdict.counterexample
    prof = iso_profile(space)
    k = prof.thresholds.index(ce["t"]) + 1
    t = ce["t"]
    # no set of measure >= t attains the minimum at both radii h1 and h2
    both = [
        A for A in range(1, space.full + 1)
        if space.measure(A) >= t
        and all(space.measure(neighborhood(space, A, h)) == prof.value(k, h) for h in prof.radii if h <= ce["h2"])
    ]
    assert both == []
    assert space.measure(neighborhood(space, ce["set_h2"], ce["h2"])) == prof.value(k, ce["h2"])


def test_isoperimetric_witnesses_reproduce_sup():
    space = hamming_power(diamond(), 2)
    verdict = is_isoperimetric(space)
    assert verdict.is_isoperimetric
    for x in [F(k, 4) for k in range(0, 9)]:
        best = max(deviation_functional(space, A, x) for _, A in verdict.witnesses)
        assert best == exact_deviation_sup(space, x).value


def test_sup_examples():
    c1 = two_point()
    w = exact_deviation_sup(c1, F(1, 4))
    assert w.value == F(1, 2) and bin(w.argmax).count("1") == 1
    for space in (c1, cube_space(3), diamond()):
        w = exact_deviation_sup(space, 0)
        assert w.value == 1 and w.argmax == space.full
    # x = 3/2 lies beyond n/2 = 1 on C_2, where every set gives 0
    assert exact_deviation_sup(cube_space(2), F(3, 2)).value == 0 == slow_sup(cube_space(2), F(3, 2))


def test_sup_support_edge(small_spaces):
    for space in small_spaces:
        top = max(mean_dist(space, 1 << i) for i in range(len(space)))
        if len(space) > 1:
            assert exact_deviation_sup(space, top).value > 0
        assert exact_deviation_sup(space, top + F(1, 1000)).value == 0


def test_workers_do_not_change_results():
    space = cube_space(4)
    for x in (F(1, 2), F(1), F(3, 2)):
        ref = exact_deviation_sup(space, x, workers=1)
        for workers in (2, 3, 7):
            assert exact_deviation_sup(space, x, workers=workers) == ref
    assert iso_profile(space, workers=3) == iso_profile(space)


def test_cap():
    with pytest.raises(CapExceededError):
        exact_deviation_sup(cycle_space(17), 1)
    assert exact_deviation_sup(cycle_space(17), 1, cap=17).value > 0


def test_sampling_lower_check():
    assert check_sampling_lower(cube_space(3), 1, trials=0).passed
    rep = check_sampling_lower(cube_space(3), 1, trials=10_000, seed=1)
    assert rep.passed and rep.exceed_count == 0 and rep.max_sampled <= rep.oracle_value
    w = exact_deviation_sup(cube_space(3), 1)
    g = [-d for d in dist_to_set(cube_space(3), w.argmax)]
    assert deviation_of_function(cube_space(3), g, 1) == w.value


def test_random_metric_space_is_metric():
    rng = random.Random(5)
    for _ in range(20):
        space = random_metric_space(rng.randint(2, 9), rng)
        assert all(w > 0 for w in space.weight)
