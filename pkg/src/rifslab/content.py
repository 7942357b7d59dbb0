"""Scaling-function traces, average content, and the equicontractive walk surrogate."""

import math
from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_MAX_WORDS, TOL, ModeMismatchError, prefix_cover
from .dimension import log_hutchinson, log_hutchinson_variance
from .neighborhood import cover_sandwich, monte_carlo_measure

MAX_DEPTH = 60


@dataclass(frozen=True)
class ScaleGrid:
    """Geometric grid ``eps0 * ratio**k`` for ``k = 0 .. count-1``."""

    eps0: float
    ratio: float
    count: int

    def __post_init__(self):
        if not 0.0 < self.eps0 <= 1.0:
            raise ValueError("eps0 must lie in (0, 1]")
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("grid ratio must lie in (0, 1)")
        if self.count < 1:
            raise ValueError("grid needs at least one point")

    @property
    def values(self):
        return self.eps0 * self.ratio ** np.arange(self.count)


@dataclass(frozen=True, eq=False)
class ContentTrace:
    eps: np.ndarray
    depth: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    s: float
    d: int
    truncated: bool = False
    stderr: np.ndarray | None = field(default=None, repr=False)

    @property
    def factor(self):
        return self.eps ** (self.s - self.d)

    @property
    def scaled_lower(self):
        return self.factor * self.lower

    @property
    def scaled_upper(self):
        return self.factor * self.upper

    def __len__(self):
        return self.eps.size


def _depth_for(omega, eps, max_depth):
    """Smallest depth whose cover diameter is at most ``eps/2``."""
    r_top = np.array([a.ratios.max() for a in omega.tuples(max_depth)])
    diam = 2.0 * np.concatenate([[1.0], np.cumprod(r_top)])
    hit = np.flatnonzero(diam <= eps / 2.0)
    return int(hit[0]) if hit.size else None


def content_trace(omega, s, grid, mode="sandwich", max_words=DEFAULT_MAX_WORDS,
                  samples=100_000, seed=0, max_depth=MAX_DEPTH):
    """``eps^(s-d) L(<F>_eps)`` bounds at each grid scale.

    Stops at the first scale whose depth would exceed the word budget (or
    ``max_depth``) and sets ``truncated``.
    """
    d = omega.dist.dim
    if mode == "sandwich" and d != 1:
        raise ModeMismatchError("sandwich mode needs ambient dimension 1; use mode='mc'")
    if mode not in ("sandwich", "mc"):
        raise ValueError(f"unknown mode {mode!r}")
    eps_all = grid.values if isinstance(grid, ScaleGrid) else np.asarray(grid, dtype=float)
    rows = []
    truncated = False
    cover = None
    for k, eps in enumerate(eps_all):
        n = _depth_for(omega, eps, max_depth)
        if n is None or omega.word_count(n) > max_words:
            truncated = True
            break
        if cover is None or cover.depth != n:
            cover = prefix_cover(omega, n, max_words)
        if mode == "sandwich":
            b = cover_sandwich(cover, eps)
            rows.append((eps, n, b.lower, b.upper, 0.0))
        else:
            est = monte_carlo_measure(cover, eps, samples, seed + k)
            rows.append((eps, n, est.estimate, est.estimate, est.stderr))
    arr = np.array(rows, dtype=float).reshape(-1, 5)
    return ContentTrace(arr[:, 0], arr[:, 1].astype(int), arr[:, 2], arr[:, 3], float(s), d,
                        truncated, arr[:, 4])


def _log_average(x, y):
    if x.size < 2:
        raise ValueError("average content needs at least 2 grid points in range")
    span = x.max() - x.min()
    return float(np.trapezoid(y[::-1], x[::-1]) / span) if span > 0 else float(y.mean())


def average_content(trace, delta):
    """Logarithmic average of the scaled trace over grid points ``eps >= delta``.

    The integral runs in ``log eps`` and is divided by the log-length of the
    covered window, so a constant trace averages to itself.
    """
    keep = trace.eps >= delta * (1.0 - 1e-12)
    x = np.log(trace.eps[keep])
    return _log_average(x, trace.scaled_lower[keep]), _log_average(x, trace.scaled_upper[keep])


def running_average_content(trace):
    """Average content with the window ending at each grid point; NaN at the first."""
    out = np.full((len(trace), 2), np.nan)
    for k in range(1, len(trace)):
        out[k] = average_content(trace, trace.eps[k])
    return out[:, 0], out[:, 1]


@dataclass(frozen=True, eq=False)
class WalkTrace:
    increments: np.ndarray
    partial_sums: np.ndarray
    log_ratios: np.ndarray
    variance: float
    s: float

    @property
    def cumulative_log_ratio(self):
        return np.cumsum(self.log_ratios)

    @property
    def scales(self):
        """``eps_k = prod_{i<=k} r_i``."""
        return np.exp(self.cumulative_log_ratio)

    def __len__(self):
        return self.partial_sums.size


def equicontractive_walk(omega, s, n):
    """``W_k = sum_{i<=k} (log N_i + s log r_i)`` for ``k = 1..n``."""
    dist = omega.dist
    for k, atom in enumerate(dist.atoms):
        if not atom.is_equicontractive(TOL):
            raise ModeMismatchError(f"atom {k} is not equicontractive (ratios {atom.ratios.tolist()})")
    logs_s = np.array([log_hutchinson(a, s) for a in dist.atoms])
    log_r = np.array([math.log(a.ratios[0]) for a in dist.atoms])
    idx = omega.indices(n)
    inc = logs_s[idx]
    return WalkTrace(inc, np.cumsum(inc), log_r[idx], log_hutchinson_variance(dist, s), float(s))


def log_running_surrogate(walk):
    """``log((1/k) sum_{n<=k} exp(W_n))`` for every ``k``; stable for large walks."""
    k = np.arange(1, len(walk) + 1)
    return np.logaddexp.accumulate(walk.partial_sums) - np.log(k)


def equicontractive_average_surrogate(walk, k):
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(walk):
        raise ValueError(f"k={k} exceeds walk length {len(walk)}")
    w = walk.partial_sums[:k]
    top = w.max()
    return float(math.exp(top) * np.mean(np.exp(w - top)))


@dataclass(frozen=True)
class DivergenceSummary:
    length: int
    max_w: float
    argmax: int
    min_w: float
    argmin: int
    max_surrogate: float
    min_surrogate: float
    scaled_max: float
    scaled_min: float


def divergence_summary(walk):
    """Extremes of the walk and of its running surrogate averages.

    ``scaled_max`` is ``max W_n / sqrt(v n)`` with ``v`` the increment variance
    and ``n`` the walk length; NaN when ``v = 0``.
    """
    n = len(walk)
    if n < 1:
        raise ValueError("walk must have length >= 1")
    w = walk.partial_sums
    i_max, i_min = int(np.argmax(w)), int(np.argmin(w))
    log_avg = log_running_surrogate(walk)
    norm = math.sqrt(walk.variance * n)
    return DivergenceSummary(
        n, float(w[i_max]), i_max + 1, float(w[i_min]), i_min + 1,
        float(np.exp(log_avg.max())), float(np.exp(log_avg.min())),
        float(w[i_max] / norm) if norm > 0 else math.nan,
        float(w[i_min] / norm) if norm > 0 else math.nan,
    )


def divergence_scales(m, n, gamma_prime=1.0):
    """``gamma' prod r_bar_i exp(-sqrt(sum v_i))`` for ``n = 1..n``."""
    cum_log_rbar, cum_var = m.cumulative_stats(n)
    return gamma_prime * np.exp(cum_log_rbar - np.sqrt(cum_var))
