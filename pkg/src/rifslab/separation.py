"""Finite-depth checks of cylinder separation and separated point sets."""

import math
from dataclasses import dataclass, field

import numpy as np

from .coding import CylinderMeasure, mn_membership, mn_words, sample_word
from .core import DEFAULT_MAX_WORDS, BudgetExceededError, apply_word, check_word, composed_maps

_PAIR_CHUNK = 4_000_000


@dataclass(frozen=True)
class SeparationParams:
    gamma: float
    x0: np.ndarray

    def __post_init__(self):
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not np.all(np.isfinite(x0)):
            raise ValueError("x0 must be finite")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "gamma", float(self.gamma))


def volume_constant(gamma, x0, r_min, d):
    """``(4 (1 + |x0|) / (r_min gamma))^d``: how many disjoint balls can crowd one point."""
    norm = float(np.linalg.norm(np.atleast_1d(x0)))
    return (4.0 * (1.0 + norm) / (r_min * gamma)) ** d


@dataclass(frozen=True)
class SeparationReport:
    depth: int
    achieved: float
    closest: tuple
    gamma: float
    passed: bool
    x0: np.ndarray = field(repr=False)

    @property
    def proposed_gamma(self):
        """Half the achieved depth-limited minimum."""
        return 0.5 * self.achieved


def _levels(omega, depth, x0, max_words):
    total = sum(omega.word_count(n) for n in range(1, depth + 1))
    if total > max_words:
        raise BudgetExceededError(f"enumeration budget: {total} words up to depth {depth} exceed {max_words}")
    out = []
    for n in range(1, depth + 1):
        ratios, orth, trans = composed_maps(omega, n, max_words)
        points = ratios[:, None] * np.einsum("wij,j->wi", orth, x0) + trans
        out.append((ratios, points))
    return out


def _pair_min(p, r, q, t, exclude=None):
    """Min of ``|p_i - q_j| / min(r_i, t_j)`` over pairs, skipping ``exclude(i, j)``."""
    best, where = math.inf, None
    rows = max(1, _PAIR_CHUNK // max(len(q), 1))
    for start in range(0, len(p), rows):
        sl = slice(start, start + rows)
        dist = np.sqrt(((p[sl, None, :] - q[None, :, :]) ** 2).sum(axis=-1))
        val = dist / np.minimum(r[sl, None], t[None, :])
        if exclude is not None:
            val[exclude(np.arange(len(p))[sl, None], np.arange(len(q))[None, :])] = math.inf
        k = int(np.argmin(val))
        i, j = divmod(k, val.shape[1])
        if val[i, j] < best:
            best, where = float(val[i, j]), (start + i, j)
    return best, where


def _word_at(omega, n, index):
    counts = omega.map_counts(n)
    letters = []
    for c in reversed(counts):
        index, a = divmod(index, int(c))
        letters.append(a)
    return tuple(int(a) for a in reversed(letters))


def check_separation(omega, depth, params=None, x0=None, max_words=DEFAULT_MAX_WORDS):
    """Minimum normalised distance over non-prefix-comparable word pairs up to ``depth``.

    The check passes iff the minimum is at least ``params.gamma``; without
    params it uses the proposed gamma (half the minimum) and passes whenever
    the minimum is positive.
    """
    d = omega.dist.dim
    if params is not None:
        x0 = params.x0
    x0 = np.zeros(d) if x0 is None else np.atleast_1d(np.asarray(x0, dtype=float))
    levels = _levels(omega, depth, x0, max_words)
    counts = omega.map_counts(depth)
    best, closest = math.inf, ()
    for a, (ra, pa) in enumerate(levels):
        n = a + 1
        for b in range(a, depth):
            m = b + 1
            rb, pb = levels[b]
            if a == b:
                val, where = _pair_min(pa, ra, pb, rb, lambda i, j: j <= i)
            else:
                span = math.prod(int(c) for c in counts[n:m])
                val, where = _pair_min(pa, ra, pb, rb, lambda i, j: (j // span) == i)
            if where is not None and val < best:
                best = val
                closest = (_word_at(omega, n, where[0]), _word_at(omega, m, where[1]))
    gamma = params.gamma if params is not None else 0.5 * best
    passed = bool(best >= gamma and best > 0)
    return SeparationReport(depth, best, closest, gamma, passed, x0)


@dataclass(frozen=True, eq=False)
class SeparatedSet:
    points: np.ndarray
    separation: float
    words: list
    extended_words: list
    source_count: int
    c0: float

    def __post_init__(self):
        if self.min_distance() < self.separation:
            raise AssertionError("separated set violates its own distance guarantee")

    @property
    def guaranteed_size(self):
        return math.ceil(self.source_count / self.c0) if self.source_count else 0

    def min_distance(self):
        if len(self.points) < 2:
            return math.inf
        diff = self.points[:, None, :] - self.points[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=-1))
        np.fill_diagonal(dist, math.inf)
        return float(dist.min())

    def __len__(self):
        return len(self.points)


def _check_antichain(words):
    ordered = sorted(words)
    for u, w in zip(ordered, ordered[1:]):
        if w[: len(u)] == u:
            raise ValueError(f"words {u} and {w} are prefix-comparable")


def _ratio(omega, w):
    return math.prod(float(a.ratios[x]) for a, x in zip(omega.tuples(len(w)), w))


def extend_words(omega, words):
    """Pad each word with first letters while its ratio stays at or above the smallest ratio in the set."""
    ratios = [_ratio(omega, w) for w in words]
    r_a = min(ratios)
    out = []
    for w, r in zip(words, ratios):
        w = list(w)
        while True:
            nxt = r * float(omega.atom(len(w)).ratios[0])
            if nxt < r_a:
                break
            w.append(0)
            r = nxt
        out.append(tuple(w))
    return out, r_a


def build_separated_set(omega, words, params):
    """Greedy ``gamma * r_A``-separated subset of the images of ``x0`` under the extended words."""
    words = [check_word(omega, w) for w in words]
    d = omega.dist.dim
    c0 = volume_constant(params.gamma, params.x0, omega.dist.r_min, d)
    if not words:
        return SeparatedSet(np.zeros((0, d)), 0.0, [], [], 0, c0)
    _check_antichain(words)
    extended, r_a = extend_words(omega, words)
    sep = params.gamma * r_a
    images = np.array([apply_word(omega, w, params.x0) for w in extended]).reshape(-1, d)
    chosen = []
    for i, p in enumerate(images):
        if not chosen or np.sqrt(((images[chosen] - p) ** 2).sum(axis=1)).min() >= sep:
            chosen.append(i)
    kept = [extended[i] for i in chosen]
    return SeparatedSet(images[chosen], sep, kept, extended, len(words), c0)


@dataclass(frozen=True, eq=False)
class MnSeparatedResult:
    separated: SeparatedSet
    mn_count: int | None
    exact: bool


def mn_separated_points(omega, n, s, params, max_words=DEFAULT_MAX_WORDS, samples=10_000, seed=0):
    """Separated set built from the central-set words of length ``n``.

    Enumerates the central set when it fits the budget; otherwise uses the
    distinct members among ``samples`` sampled words and reports ``exact=False``
    with no count.
    """
    if n == 0:
        return MnSeparatedResult(build_separated_set(omega, [()], params), 1, True)
    m = CylinderMeasure(omega, s)
    if omega.word_count(n) <= max_words:
        words = [tuple(int(a) for a in w) for w in mn_words(m, n, max_words)]
        return MnSeparatedResult(build_separated_set(omega, words, params), len(words), True)
    seen = {}
    for j in range(samples):
        w = sample_word(m, n, seed, j)
        if w not in seen and mn_membership(m, w):
            seen[w] = None
    return MnSeparatedResult(build_separated_set(omega, list(seen), params), None, False)
