import itertools
import math
import random

import numpy as np
import pytest

from rifslab import Realization, RifsDistribution, SeparationParams, almost_sure_dimension
from rifslab.coding import CylinderMeasure, mn_membership
from rifslab.core import BudgetExceededError, apply_word, composed_ratio
from rifslab.separation import (
    build_separated_set,
    check_separation,
    extend_words,
    mn_separated_points,
    volume_constant,
)

from conftest import LOG2_LOG3, ab_dist, cantor_dist, golden_dist, line_atom


def brute_min(omega, depth, x0=0.0):
    words = [w for n in range(1, depth + 1) for w in itertools.product(*[range(c) for c in omega.map_counts(n)])]
    best = math.inf
    for v, w in itertools.combinations(words, 2):
        k = min(len(v), len(w))
        if v[:k] == w[:k]:
            continue
        dist = abs(apply_word(omega, v, x0)[0] - apply_word(omega, w, x0)[0])
        best = min(best, dist / min(composed_ratio(omega, v), composed_ratio(omega, w)))
    return best


def test_params_validation():
    with pytest.raises(ValueError):
        SeparationParams(0.0, [0.0])
    with pytest.raises(ValueError):
        SeparationParams(1.0, [math.nan])


def test_cantor_depth_one_and_three():
    omega = Realization(cantor_dist(), 0)
    one = check_separation(omega, 1)
    assert one.achieved == pytest.approx(4.0, abs=1e-12)
    three = check_separation(omega, 3)
    assert three.achieved > 0 and three.passed
    assert three.achieved == pytest.approx(brute_min(omega, 3), abs=1e-12)
    with_params = check_separation(omega, 3, SeparationParams(three.proposed_gamma, [0.0]))
    assert with_params.passed
    assert not check_separation(omega, 3, SeparationParams(three.achieved * 1.01, [0.0])).passed


@pytest.mark.parametrize("seed", [0, 3])
def test_random_realization_matches_brute_force(seed):
    from conftest import mixed_dist
    omega = Realization(mixed_dist(), seed)
    rep = check_separation(omega, 4, x0=[0.1])
    assert rep.achieved == pytest.approx(brute_min(omega, 4, 0.1), rel=1e-12)
    v, w = rep.closest
    dist = abs(apply_word(omega, v, [0.1])[0] - apply_word(omega, w, [0.1])[0])
    assert dist / min(composed_ratio(omega, v), composed_ratio(omega, w)) == pytest.approx(rep.achieved)


def test_identical_maps_fail():
    dist = RifsDistribution([line_atom((0.5, 0.25), (0.5, 0.25))])
    rep = check_separation(Realization(dist, 0), 3)
    assert rep.achieved == 0.0 and not rep.passed
    assert not check_separation(Realization(dist, 0), 2, SeparationParams(1e-9, [0.0])).passed


def test_budget():
    with pytest.raises(BudgetExceededError):
        check_separation(Realization(cantor_dist(), 0), 10, max_words=100)


def test_volume_constant_example():
    assert volume_constant(2 / 3, [0.0], 1 / 3, 1) == pytest.approx(18.0)


def test_extension_rule():
    omega = Realization(golden_dist(), 0)
    # ratios 1/2 and 1/4: the word (0,) gets padded once to reach 1/4
    ext, r_a = extend_words(omega, [(0,), (1,)])
    assert r_a == pytest.approx(0.25) and ext == [(0, 0), (1,)]
    eq = Realization(ab_dist(), 0)
    words = [(a,) for a in range(eq.map_counts(1)[0])]
    assert extend_words(eq, words)[0] == words


def test_separated_set_equicontractive_level_one():
    omega = Realization(ab_dist(), 2)
    words = [(a,) for a in range(omega.map_counts(1)[0])]
    sep = build_separated_set(omega, words, SeparationParams(1.0, [0.0]))
    assert len(sep) == len(words) and sep.extended_words == words


def test_cantor_length_four():
    omega = Realization(cantor_dist(), 0)
    gamma = check_separation(omega, 4).proposed_gamma
    params = SeparationParams(gamma, [0.0])
    words = list(itertools.product(range(2), repeat=4))
    sep = build_separated_set(omega, words, params)
    assert len(sep) == 16
    assert sep.min_distance() >= gamma * 3.0**-4
    assert sep.guaranteed_size <= len(sep)


def test_guarantee_formula():
    omega = Realization(cantor_dist(), 0)
    params = SeparationParams(2 / 3, [0.0])
    words = list(itertools.product(range(2), repeat=5))
    sep = build_separated_set(omega, words, params)
    assert sep.c0 == pytest.approx(18.0)
    assert sep.guaranteed_size == math.ceil(32 / 18)
    assert len(sep) >= sep.guaranteed_size


def test_rejects_prefix_comparable_and_empty():
    omega = Realization(cantor_dist(), 0)
    params = SeparationParams(1.0, [0.0])
    with pytest.raises(ValueError, match="prefix"):
        build_separated_set(omega, [(0,), (0, 1)], params)
    assert len(build_separated_set(omega, [], params)) == 0


def test_random_antichains_keep_size():
    omega = Realization(cantor_dist(), 0)
    gamma = check_separation(omega, 6).proposed_gamma
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randint(1, 6)
        words = rng.sample(list(itertools.product(range(2), repeat=n)), rng.randint(1, 2**n))
        sep = build_separated_set(omega, words, SeparationParams(gamma, [0.0]))
        assert len(sep.extended_words) == len(words)
        assert len(set(sep.extended_words)) == len(words)


def test_mn_separated_points():
    omega = Realization(cantor_dist(), 0)
    gamma = check_separation(omega, 3).proposed_gamma
    params = SeparationParams(gamma, [0.0])
    res = mn_separated_points(omega, 3, LOG2_LOG3, params)
    assert res.exact and res.mn_count == 8 and len(res.separated) == 8
    assert res.separated.min_distance() >= gamma * 3.0**-3
    zero = mn_separated_points(omega, 0, LOG2_LOG3, params)
    assert len(zero.separated) == 1 and zero.separated.points[0] == pytest.approx([0.0])


def test_mn_separated_golden_matches_brute_force():
    dist = golden_dist()
    omega = Realization(dist, 0)
    s = almost_sure_dimension(dist).s
    m = CylinderMeasure(omega, s)
    expected = sum(mn_membership(m, w) for w in itertools.product(range(2), repeat=2))
    res = mn_separated_points(omega, 2, s, SeparationParams(0.5, [0.0]))
    assert res.exact and res.mn_count == expected


def test_mn_separated_sampled_mode():
    omega = Realization(cantor_dist(), 0)
    res = mn_separated_points(omega, 12, LOG2_LOG3, SeparationParams(0.5, [0.0]), max_words=100, samples=200)
    assert not res.exact and res.mn_count is None and len(res.separated) > 0
