"""Random-walk diagnostics: iterated-logarithm envelopes, the excursion-frequency
bound, and a Kolmogorov-Smirnov distance to the standard normal."""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_E = math.e


@dataclass(frozen=True, eq=False)
class EnvelopeTrace:
    """``sqrt(2 s_n log log s_n)``; NaN and ``defined=False`` wherever ``s_n <= e``."""

    cumulative_variance: np.ndarray
    envelope: np.ndarray
    defined: np.ndarray

    def normalize(self, sums):
        sums = np.asarray(sums, dtype=float)
        out = np.full(sums.shape, np.nan)
        out[self.defined] = sums[self.defined] / self.envelope[self.defined]
        return out

    def __len__(self):
        return self.envelope.size


def lil_envelope(variances):
    v = np.asarray(variances, dtype=float)
    if np.any(v < 0):
        raise ValueError("variances must be nonnegative")
    s = np.cumsum(v)
    defined = s > _E
    env = np.full(s.shape, np.nan)
    env[defined] = np.sqrt(2.0 * s[defined] * np.log(np.log(s[defined])))
    return EnvelopeTrace(s, env, defined)


@dataclass(frozen=True)
class FrequencyParams:
    """Parameters of the excursion-frequency bound with window ``h(n) = ceil(n**tau)``."""

    t: float = 0.4
    tau: float = 11.0
    C: float = 1.0
    variance: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.t < 0.5:
            raise ValueError("t must lie in (0, 1/2)")
        # compare as the decimals the user wrote, so 0.3 * 5 counts as the boundary
        if (Fraction(repr(float(self.t))) - Fraction(1, 2)) * Fraction(repr(float(self.tau))) >= -1:
            raise ValueError(f"need (t - 1/2) * tau < -1, got t={self.t}, tau={self.tau}")
        if not self.C > 0:
            raise ValueError("C must be positive")
        if not self.variance > 0:
            raise ValueError("variance must be positive")

    def h(self, n):
        if float(self.tau).is_integer():
            return int(n) ** int(self.tau)
        return math.ceil(float(n) ** self.tau)


def frequency_p(params, n):
    """``(h(n)^t + C sqrt(n log log n)) / sqrt(Var (h(n) - n))``."""
    if n < 3:
        raise ValueError("n must be >= 3 so that log log n is defined")
    h = params.h(n)
    if h <= n:
        raise ValueError(f"h({n}) = {h} does not exceed n")
    num = float(h) ** params.t + params.C * math.sqrt(n * math.log(math.log(n)))
    return num / math.sqrt(params.variance * float(h - n))


def frequency_partial_sums(params, n_max, n_start=3):
    """``sum_{m=n_start}^{n} p(m)`` for ``n = n_start .. n_max``."""
    return np.cumsum([frequency_p(params, n) for n in range(n_start, n_max + 1)])


@dataclass(frozen=True, eq=False)
class ExcursionReport:
    n: np.ndarray
    exceeded: np.ndarray
    window_end: np.ndarray
    truncated: bool

    @property
    def failures(self):
        return int(np.count_nonzero(~self.exceeded))

    @property
    def failure_fraction(self):
        return self.failures / self.n.size if self.n.size else 0.0


def excursion_check(walk, params, n_start, n_end):
    """For each ``n``, whether ``W(k) >= k^t`` for some ``k`` in ``[n, min(h(n), L)]``.

    ``walk`` is a WalkTrace or the array ``W(1), ..., W(L)``. ``truncated`` is
    set when some window had to be cut at the walk length.
    """
    w = np.asarray(getattr(walk, "partial_sums", walk), dtype=float)
    length = w.size
    if not 1 <= n_start <= n_end <= length:
        raise ValueError("need 1 <= n_start <= n_end <= walk length")
    k = np.arange(1, length + 1)
    hit = w >= k.astype(float) ** params.t
    # next_hit[i]: smallest 1-based index >= i+1 with a hit
    idx = np.where(hit, k, length + 1)
    next_hit = np.minimum.accumulate(idx[::-1])[::-1]
    ns = np.arange(n_start, n_end + 1)
    ends = np.array([min(params.h(n), length) for n in ns])
    exceeded = next_hit[ns - 1] <= ends
    truncated = any(params.h(n) > length for n in ns)
    return ExcursionReport(ns, exceeded, ends, truncated)


def normal_cdf(x):
    x = np.asarray(x, dtype=float)
    return 0.5 * np.vectorize(math.erfc, otypes=[float])(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class CltReport:
    count: int
    mean: float
    variance: float
    ks_distance: float


def ks_distance_normal(samples):
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    cdf = normal_cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))


def clt_diagnostic(samples):
    """Mean, variance and KS distance to the standard normal; no test verdict."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 100:
        raise ValueError("clt_diagnostic needs at least 100 samples")
    return CltReport(int(x.size), float(x.mean()), float(x.var()), ks_distance_normal(x))
