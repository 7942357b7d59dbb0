import math
import time
import warnings

import numpy as np
import pytest

from rifslab import (
    RifsDistribution,
    almost_sure_dimension,
    expected_log_hutchinson,
    hutchinson_sum,
    is_almost_deterministic,
)
from rifslab.dimension import (
    DegenerateDistributionError,
    DimensionWarning,
    bisect_decreasing,
    log_hutchinson,
    similarity_dimension,
    variance_bound,
)

from conftest import AB_DIM, LOG2_LOG3, ab_dist, cantor_dist, golden_dist, line_atom, mixed_dist


def test_hutchinson_sum_examples(cantor):
    atom = cantor.atoms[0]
    assert hutchinson_sum(atom, LOG2_LOG3) == pytest.approx(1.0, abs=1e-12)
    assert hutchinson_sum(atom, 0.0) == 2
    assert hutchinson_sum(atom, 1.0) == pytest.approx(2 / 3)
    assert hutchinson_sum(line_atom((0.2, -0.8), (0.3, 0), (0.1, 0.9)), 0.0) == 3


def test_expected_log_hutchinson_examples(ab, cantor):
    assert expected_log_hutchinson(ab, 0.0) == pytest.approx(0.5 * math.log(6), abs=1e-12)
    assert expected_log_hutchinson(ab, math.log(6) / (2 * math.log(4))) == pytest.approx(0.0, abs=1e-12)
    assert expected_log_hutchinson(cantor, LOG2_LOG3) == pytest.approx(0.0, abs=1e-12)


def test_dimension_closed_forms(cantor, ab):
    t0 = time.perf_counter()
    res = almost_sure_dimension(cantor)
    assert res.s == pytest.approx(LOG2_LOG3, abs=1e-9)
    assert almost_sure_dimension(ab).s == pytest.approx(AB_DIM, abs=1e-9)
    assert time.perf_counter() - t0 < 1.0
    assert abs(res.residual) <= 1e-12
    lo, hi = res.bracket
    assert lo <= res.s <= hi and hi - lo <= 2e-12


def test_dimension_equals_ambient_without_warning():
    halves = RifsDistribution([line_atom((0.5, -0.5), (0.5, 0.5))])
    with warnings.catch_warnings():
        warnings.simplefilter("error", DimensionWarning)
        assert almost_sure_dimension(halves).s == pytest.approx(1.0, abs=1e-9)


def test_dimension_above_ambient_warns():
    heavy = RifsDistribution([line_atom((0.6, -0.4), (0.6, 0.4))], r_max=0.6)
    with pytest.warns(DimensionWarning):
        assert almost_sure_dimension(heavy).s > 1


def test_degenerate_distribution_rejected():
    single = RifsDistribution([line_atom((0.5, 0.0))])
    with pytest.raises(DegenerateDistributionError, match="E\\[log N\\]"):
        almost_sure_dimension(single)


def test_bisection_rejects_bad_bracket():
    with pytest.raises(RuntimeError):
        bisect_decreasing(lambda s: 1.0 - s, 2.0, 3.0)


def test_almost_deterministic_examples(cantor, ab):
    assert is_almost_deterministic(cantor) == pytest.approx(LOG2_LOG3, abs=1e-9)
    assert is_almost_deterministic(ab) is None
    a = ab.atoms
    assert similarity_dimension(a[0]) == pytest.approx(0.5, abs=1e-12)
    assert similarity_dimension(a[1]) == pytest.approx(math.log(3) / math.log(4), abs=1e-12)
    shifted = RifsDistribution([line_atom((1 / 3, -2 / 3), (1 / 3, 2 / 3)), line_atom((1 / 3, -0.5), (1 / 3, 0.6))],
                               [0.3, 0.7])
    assert is_almost_deterministic(shifted) == pytest.approx(LOG2_LOG3, abs=1e-9)


@pytest.mark.parametrize("make", [cantor_dist, ab_dist, golden_dist, mixed_dist])
def test_monotone_and_consistent(make):
    dist = make()
    grid = np.linspace(0, 3, 61)
    vals = [expected_log_hutchinson(dist, s) for s in grid]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    det = is_almost_deterministic(dist)
    if det is not None:
        assert abs(expected_log_hutchinson(dist, det)) <= 1e-9
        assert det == pytest.approx(almost_sure_dimension(dist).s, abs=1e-9)


@pytest.mark.parametrize("make", [cantor_dist, ab_dist, golden_dist, mixed_dist])
def test_variance_bound_at_root(make):
    dist = make()
    s = almost_sure_dimension(dist).s
    bound = variance_bound(dist, s)
    for atom in dist.atoms:
        assert log_hutchinson(atom, s) ** 2 <= bound + 1e-15


def test_log_hutchinson_matches_direct_sum(mixed):
    for atom in mixed.atoms:
        for s in (0.0, 0.3, 1.7):
            assert log_hutchinson(atom, s) == pytest.approx(math.log(hutchinson_sum(atom, s)), abs=1e-14)
