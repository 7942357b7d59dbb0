"""The random coding measure and the central set of words.

For a realization and exponent ``s`` each level gets letter probabilities
``p_i = r_i^s / sum_j r_j^s``; words are weighted by the product over levels.
The central set of length-``n`` words collects those whose log-contraction is
within one standard deviation of its mean.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _rng
from ._parallel import parallel_map
from .core import DEFAULT_MAX_WORDS, TOL, BudgetExceededError, check_word, enumerate_words
from .dimension import log_hutchinson

# (2 pi)^{-1/2} int_{-1}^{1} exp(-x^2/2) dx
CLT_MASS = math.erf(1.0 / math.sqrt(2.0))

_CHUNK_LEVEL_DRAWS = 4_000_000


@dataclass(frozen=True)
class LevelStats:
    log_geo_mean: float
    variance: float


@dataclass(frozen=True)
class _AtomTable:
    probs: np.ndarray
    log_ratios: np.ndarray
    deviations: np.ndarray
    stats: LevelStats
    log_hutchinson: float


def _atom_table(atom, s):
    logs = np.log(atom.ratios)
    w = s * logs
    w = np.exp(w - w.max())
    probs = w / w.sum()
    if atom.is_equicontractive(TOL):
        mean = float(logs[0])
        dev = np.zeros_like(logs)
        var = 0.0
    else:
        mean = float(np.dot(probs, logs))
        dev = logs - mean
        var = float(np.dot(probs, dev**2))
    return _AtomTable(probs, logs, dev, LevelStats(mean, var), log_hutchinson(atom, s))


def level_stats(atom, s):
    """Log geometric mean and variance of ``log r`` under the letter probabilities."""
    if s < 0:
        raise ValueError("exponent must be nonnegative")
    return _atom_table(atom, s).stats


class CylinderMeasure:
    """The product measure on words of a realization at exponent ``s``."""

    def __init__(self, omega, s):
        self.omega = omega
        self.s = float(s)
        self._tables = [_atom_table(a, self.s) for a in omega.dist.atoms]
        n_max = omega.dist.max_maps
        # per-atom thresholds for inverse-CDF letter draws, padded with 2.0 (never reached)
        cuts = np.full((len(self._tables), max(n_max - 1, 1)), 2.0)
        devs = np.zeros((len(self._tables), n_max))
        for k, t in enumerate(self._tables):
            n = t.probs.size
            cuts[k, : n - 1] = np.cumsum(t.probs)[: n - 1]
            devs[k, :n] = t.deviations
        self._cuts = cuts
        self._devs = devs
        self._vars = np.array([t.stats.variance for t in self._tables])

    def table(self, level):
        return self._tables[int(self.omega.indices(level + 1)[level])]

    def probabilities(self, level):
        return self.table(level).probs

    def stats(self, level):
        return self.table(level).stats

    def cumulative_stats(self, n):
        """Running sums of ``log r_bar`` and of the variance over levels ``0..n-1``."""
        idx = self.omega.indices(n)
        means = np.array([t.stats.log_geo_mean for t in self._tables])[idx]
        return np.cumsum(means), np.cumsum(self._vars[idx])

    def letters(self, u, n):
        """Letters for uniforms ``u`` of shape (..., n) at levels ``0..n-1``."""
        idx = self.omega.indices(n)
        cuts = self._cuts[idx]
        return np.sum(u[..., None] >= cuts, axis=-1)

    def deviation_sums(self, letters):
        """``sum_i (log r_{v_i} - log r_bar_i)`` for each word in a (..., n) letter array."""
        n = letters.shape[-1]
        idx = self.omega.indices(n)
        return self._devs[idx][np.arange(n), letters].sum(axis=-1)

    def total_variance(self, n):
        return float(np.sum(self._vars[self.omega.indices(n)]))


def cylinder_probability(m, v):
    v = check_word(m.omega, v)
    return math.prod(float(m.probabilities(i)[a]) for i, a in enumerate(v))


def sample_word(m, n, seed, substream=0):
    """Letters drawn level by level; letter ``i`` depends only on ``(seed, substream, i)``."""
    if n < 0:
        raise ValueError("depth must be nonnegative")
    u = _rng.uniforms(seed, _rng.WORD, 0, n, substream)
    return tuple(int(a) for a in m.letters(u, n))


def mn_statistic(m, v):
    """Normalised deviation of ``log r_v`` from its mean; 0 when the total variance vanishes."""
    v = check_word(m.omega, v)
    n = len(v)
    total = m.total_variance(n)
    if total <= 0:
        return 0.0
    return float(m.deviation_sums(np.array(v)[None, :])[0]) / math.sqrt(total)


def mn_membership(m, v):
    if len(v) < 1:
        raise ValueError("membership needs a word of length >= 1")
    return -1.0 <= mn_statistic(m, v) <= 1.0


@dataclass(frozen=True)
class MnEstimate:
    n: int
    estimate: float
    stderr: float
    exact: bool
    samples: int

    target = CLT_MASS


def _exact_tables(m, n, max_words):
    """Log-probabilities and deviation sums for every word of length ``n``."""
    count = m.omega.word_count(n)
    if count > max_words:
        raise BudgetExceededError(f"enumeration budget: {count} words at depth {n} exceed {max_words}")
    logp = np.zeros(1)
    dev = np.zeros(1)
    for i in range(n):
        t = m.table(i)
        logp = (logp[:, None] + np.log(t.probs)[None, :]).reshape(-1)
        dev = (dev[:, None] + t.deviations[None, :]).reshape(-1)
    return logp, dev


def mn_mask(m, n, max_words=DEFAULT_MAX_WORDS):
    """Boolean membership of every length-``n`` word, in lexicographic order."""
    _, dev = _exact_tables(m, n, max_words)
    total = m.total_variance(n)
    if total <= 0:
        return np.ones(dev.size, dtype=bool)
    t = dev / math.sqrt(total)
    return (t >= -1.0) & (t <= 1.0)


def mn_words(m, n, max_words=DEFAULT_MAX_WORDS):
    return enumerate_words(m.omega, n, max_words)[mn_mask(m, n, max_words)]


def estimate_mn_measure(m, n, samples=100_000, seed=0, mode="auto", max_words=DEFAULT_MAX_WORDS):
    """Mass of the central set, exactly by enumeration or by Monte Carlo.

    ``mode`` is ``"exact"``, ``"mc"`` or ``"auto"`` (exact when the word count
    fits the budget).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if mode == "auto":
        mode = "exact" if m.omega.word_count(n) <= max_words else "mc"
    total = m.total_variance(n)
    if mode == "exact":
        logp, dev = _exact_tables(m, n, max_words)
        if total <= 0:
            return MnEstimate(n, 1.0, 0.0, True, 0)
        t = dev / math.sqrt(total)
        member = (t >= -1.0) & (t <= 1.0)
        return MnEstimate(n, float(np.sum(np.exp(logp[member]))), 0.0, True, 0)
    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if total <= 0:
        return MnEstimate(n, 1.0, 0.0, False, samples)
    scale = 1.0 / math.sqrt(total)
    idx = m.omega.indices(n)
    cuts = m._cuts[idx]
    devs = m._devs[idx]
    chunk = max(1, _CHUNK_LEVEL_DRAWS // max(n, 1))
    levels = np.arange(n)

    def count_hits(start):
        rows = range(start, min(samples, start + chunk))
        u = np.stack([_rng.uniforms(seed, _rng.WORD, 0, n, j) for j in rows])
        letters = np.zeros(u.shape, dtype=np.intp)
        for col in cuts.T:
            letters += u >= col
        t = devs[levels, letters].sum(axis=1) * scale
        return int(np.count_nonzero((t >= -1.0) & (t <= 1.0)))

    hits = sum(parallel_map(count_hits, range(0, samples, chunk)))
    p = hits / samples
    return MnEstimate(n, p, math.sqrt(p * (1.0 - p) / samples), False, samples)


def mn_count_log_lower_bound(m, n, q=CLT_MASS):
    """Log of ``(q/2) prod S / prod r_bar^s * exp(-sqrt(sum v))``.

    Only a valid lower bound on the central-set size for large enough ``n``.
    """
    idx = m.omega.indices(n)
    log_s = sum(m._tables[k].log_hutchinson for k in idx)
    log_rbar = sum(m._tables[k].stats.log_geo_mean for k in idx)
    return math.log(q / 2.0) + log_s - m.s * log_rbar - math.sqrt(m.total_variance(n))
