"""Lebesgue measure of closed epsilon-neighbourhoods of prefix covers."""

import math
from dataclasses import dataclass

import numpy as np

from . import _rng
from .core import DEFAULT_MAX_WORDS, ModeMismatchError, prefix_cover

_MC_CHUNK_CELLS = 2_000_000


class IntervalUnion:
    """Sorted, pairwise-disjoint closed intervals.

    >>> IntervalUnion([(0, 1), (1, 2), (3, 4)]).intervals
    [(0.0, 2.0), (3.0, 4.0)]
    """

    def __init__(self, intervals=()):
        lo, hi = _as_endpoints(intervals)
        self._lo, self._hi = _merge(lo, hi)

    @classmethod
    def from_arrays(cls, lo, hi):
        obj = cls.__new__(cls)
        obj._lo, obj._hi = _merge(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
        return obj

    @property
    def intervals(self):
        return [(float(a), float(b)) for a, b in zip(self._lo, self._hi)]

    @property
    def length(self):
        return float(np.sum(self._hi - self._lo))

    def __len__(self):
        return self._lo.size

    def __contains__(self, x):
        i = np.searchsorted(self._lo, x, side="right") - 1
        return bool(i >= 0 and x <= self._hi[i])

    def __repr__(self):
        return f"IntervalUnion({self.intervals})"


def _as_endpoints(intervals):
    arr = np.asarray(list(intervals), dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(arr)):
        raise ValueError("interval endpoints must be finite")
    if np.any(arr[:, 0] > arr[:, 1]):
        raise ValueError("interval with left endpoint above right endpoint")
    return arr[:, 0], arr[:, 1]


def _merge(lo, hi):
    if lo.size == 0:
        return lo, hi
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    reach = np.maximum.accumulate(hi)
    # a new component starts where the left endpoint lies beyond everything so far;
    # touching closed intervals (lo == reach) merge
    starts = np.concatenate([[True], lo[1:] > reach[:-1]])
    first = np.flatnonzero(starts)
    last = np.concatenate([first[1:] - 1, [lo.size - 1]])
    return lo[first], reach[last]


def union_measure(intervals):
    """Lebesgue measure of a finite union of closed intervals."""
    lo, hi = _as_endpoints(intervals)
    lo, hi = _merge(lo, hi)
    return float(np.sum(hi - lo))


def _require_1d(cover):
    if cover.dim != 1:
        raise ModeMismatchError(f"exact sweep needs ambient dimension 1, cover has d={cover.dim}")


def neighborhood_union(cover, eps):
    _require_1d(cover)
    c = cover.centers[:, 0]
    reach = cover.radii + eps
    return IntervalUnion.from_arrays(c - reach, c + reach)


def eps_neighborhood_measure_1d(cover, eps):
    """Measure of the closed ``eps``-neighbourhood of a 1D cover's balls."""
    if eps < 0 or not math.isfinite(eps):
        raise ValueError("eps must be finite and nonnegative")
    return neighborhood_union(cover, eps).length


@dataclass(frozen=True)
class SandwichBound:
    lower: float
    upper: float
    depth: int
    max_diameter: float


def cover_sandwich(cover, eps):
    """Bounds on the attractor's neighbourhood measure from one cover.

    Every cover ball has diameter at most ``d_n`` and meets the attractor, so
    the ``(eps - d_n)``-neighbourhood of the cover sits inside the attractor's
    ``eps``-neighbourhood, which in turn sits inside the cover's.
    """
    d_n = cover.max_diameter
    upper = eps_neighborhood_measure_1d(cover, eps)
    lower = eps_neighborhood_measure_1d(cover, eps - d_n) if eps > d_n else 0.0
    return SandwichBound(lower, upper, cover.depth, d_n)


def sandwich_bounds(omega, eps, depth, max_words=DEFAULT_MAX_WORDS):
    return cover_sandwich(prefix_cover(omega, depth, max_words), eps)


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    samples: int


def monte_carlo_measure(cover, eps, samples, seed):
    """Hit-or-miss estimate over the box ``[-(1+eps), 1+eps]^d``."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    d = cover.dim
    half = 1.0 + eps
    volume = (2.0 * half) ** d
    reach = cover.radii + eps
    chunk = max(1, _MC_CHUNK_CELLS // max(len(cover), 1))
    hits = 0
    for start in range(0, samples, chunk):
        count = min(chunk, samples - start)
        u = _rng.uniforms(seed, _rng.UNIFORM, start * d, count * d).reshape(count, d)
        x = (2.0 * u - 1.0) * half
        if d == 1:
            inside = np.abs(x - cover.centers[:, 0]) <= reach
        else:
            inside = ((x[:, None, :] - cover.centers[None, :, :]) ** 2).sum(axis=-1) <= reach**2
        hits += int(np.count_nonzero(inside.any(axis=1)))
    frac = hits / samples
    return McEstimate(volume * frac, volume * math.sqrt(frac * (1.0 - frac) / samples), samples)
