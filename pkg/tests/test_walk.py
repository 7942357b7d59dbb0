import math
from fractions import Fraction

import numpy as np
import pytest

from rifslab.walk import (
    FrequencyParams,
    clt_diagnostic,
    excursion_check,
    frequency_p,
    frequency_partial_sums,
    ks_distance_normal,
    lil_envelope,
    normal_cdf,
)


def test_envelope_examples():
    env = lil_envelope(np.ones(25))
    assert env.envelope[19] == pytest.approx(math.sqrt(40 * math.log(math.log(20))), rel=1e-12)
    assert env.envelope[19] == pytest.approx(6.625, abs=1e-3)
    assert not env.defined[:2].any() and env.defined[3:].all()
    d = env.envelope[env.defined]
    assert np.all(d > 0) and np.all(np.diff(d) > 0)
    assert not lil_envelope(np.zeros(50)).defined.any()
    big = lil_envelope(np.ones(1_000_000)).envelope[-1]
    assert big == pytest.approx(math.sqrt(2e6 * math.log(math.log(1e6))), rel=1e-12)
    with pytest.raises(ValueError):
        lil_envelope([1.0, -0.1])


def test_normalize_leaves_undefined_as_nan():
    env = lil_envelope(np.ones(10))
    out = env.normalize(np.arange(10.0))
    assert np.isnan(out[:2]).all() and np.isfinite(out[3:]).all()


def test_frequency_params_validation():
    FrequencyParams(0.4, 11)
    with pytest.raises(ValueError):
        FrequencyParams(0.4, 10)  # (0.4 - 0.5) * 10 == -1 exactly
    with pytest.raises(ValueError):
        FrequencyParams(0.25, 4)
    with pytest.raises(ValueError):
        FrequencyParams(0.3, 5)
    with pytest.raises(ValueError):
        FrequencyParams(0.6, 11)
    with pytest.raises(ValueError):
        FrequencyParams(0.4, 11, C=0)


def test_frequency_p_example():
    p = FrequencyParams()
    assert p.h(10) == 10**11
    expected = (1e11**0.4 + math.sqrt(10 * math.log(math.log(10)))) / math.sqrt(1e11 - 10)
    assert frequency_p(p, 10) == pytest.approx(expected, rel=1e-12)
    assert frequency_p(p, 10) == pytest.approx(0.0794, abs=5e-4)
    with pytest.raises(ValueError):
        frequency_p(p, 2)
    sums = frequency_partial_sums(p, 50)
    assert sums.size == 48 and np.all(np.diff(sums) > 0)


def test_frequency_p_tail_rate():
    # p(n) n^1.1 settles to a constant: the n^{(t-1/2) tau} rate
    p = FrequencyParams()
    r = [frequency_p(p, n) * n**1.1 for n in (10**4, 10**5, 10**6)]
    assert r[2] == pytest.approx(r[1], rel=0.02)


def test_excursion_deterministic_walks():
    k = np.arange(1, 1001, dtype=float)
    p = FrequencyParams()
    up = excursion_check(k, p, 10, 50)
    assert up.failures == 0 and up.truncated
    down = excursion_check(-k, p, 10, 50)
    assert down.failures == 41 and down.failure_fraction == 1.0


def test_excursion_matches_direct_scan():
    rng = np.random.default_rng(3)
    w = np.cumsum(rng.choice([-1.0, 1.0], 3000))
    p = FrequencyParams(0.1, 3.0)
    rep = excursion_check(w, p, 5, 40)
    for n, ok in zip(rep.n, rep.exceeded):
        end = min(n**3, w.size)
        ks = np.arange(n, end + 1)
        assert ok == bool(np.any(w[ks - 1] >= ks.astype(float) ** 0.1))


def test_excursion_range_checks():
    with pytest.raises(ValueError):
        excursion_check(np.zeros(10), FrequencyParams(), 5, 20)


def test_normal_cdf_values():
    assert normal_cdf(0.0) == pytest.approx(0.5)
    assert normal_cdf(1.0) - normal_cdf(-1.0) == pytest.approx(0.6826894921, abs=1e-10)
    assert normal_cdf(-8.0) == pytest.approx(6.22096e-16, rel=1e-4)


def test_ks_examples():
    rng = np.random.default_rng(0)
    steps = rng.integers(0, 2, size=(100_000, 400), dtype=np.int8)
    sums = (2.0 * steps.sum(axis=1, dtype=np.int64) - 400) / 20.0
    rep = clt_diagnostic(sums)
    assert rep.count == 100_000 and abs(rep.mean) < 0.02 and rep.variance == pytest.approx(1, abs=0.02)
    # lattice step 1/10 of an sd: the atom at 0 alone gives a gap near 0.02
    assert rep.ks_distance <= 0.025
    assert ks_distance_normal(np.zeros(200)) >= 0.5
    m = 1000
    grid = np.array([_probit((i - 0.5) / m) for i in range(1, m + 1)])
    assert ks_distance_normal(grid) <= 1 / m
    with pytest.raises(ValueError):
        clt_diagnostic(np.zeros(99))


def _probit(q):
    lo, hi = -10.0, 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
