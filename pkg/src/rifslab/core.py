"""Similarities, random IFS distributions, realizations, words and prefix covers.

Conventions: atoms and letters are 0-based. A word ``v = (v_0, ..., v_{n-1})``
relative to a realization ``omega`` selects map ``v_i`` of the tuple drawn at
level ``i``; its map is the composition ``f_0^{v_0} o ... o f_{n-1}^{v_{n-1}}``.
"""

import math
import threading
from dataclasses import dataclass

import numpy as np

from . import _rng

TOL = 1e-12
DEFAULT_MAX_WORDS = 10**7


class RifsError(Exception):
    """Base class for errors raised by rifslab."""


class InvalidDistributionError(RifsError, ValueError):
    pass


class WordMismatchError(RifsError, ValueError):
    pass


class BudgetExceededError(RifsError):
    """Raised when an enumeration would exceed the configured word budget."""


class ModeMismatchError(RifsError, ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Similarity:
    """``x -> ratio * orthogonal @ x + translation``."""

    ratio: float
    orthogonal: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.translation, dtype=float))
        q = np.asarray(self.orthogonal, dtype=float)
        if q.ndim == 0:
            q = q.reshape(1, 1)
        if t.ndim != 1 or q.shape != (t.size, t.size):
            raise ValueError("orthogonal must be d x d for a translation of length d")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(q)) and math.isfinite(self.ratio)):
            raise ValueError("similarity parameters must be finite")
        t.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "orthogonal", q)
        object.__setattr__(self, "ratio", float(self.ratio))

    @classmethod
    def line(cls, ratio, translation, reflect=False):
        """A similarity of the real line."""
        return cls(ratio, np.array([[-1.0 if reflect else 1.0]]), np.array([float(translation)]))

    @classmethod
    def create(cls, ratio, translation, orthogonal=None):
        t = np.atleast_1d(np.asarray(translation, dtype=float))
        if orthogonal is None:
            orthogonal = np.eye(t.size)
        return cls(ratio, orthogonal, t)

    @property
    def dim(self):
        return self.translation.size

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            x = x.reshape(1)
        return self.ratio * (x @ self.orthogonal.T) + self.translation

    def __repr__(self):
        return f"Similarity(ratio={self.ratio!r}, translation={self.translation.tolist()!r})"


@dataclass(frozen=True, eq=False)
class IfsTuple:
    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("an IFS tuple needs at least one map")
        if len({f.dim for f in maps}) != 1:
            raise ValueError("all maps of a tuple must share the ambient dimension")
        object.__setattr__(self, "maps", maps)
        ratios = np.array([f.ratio for f in maps])
        ratios.flags.writeable = False
        object.__setattr__(self, "_ratios", ratios)

    @property
    def ratios(self):
        return self._ratios

    @property
    def n_maps(self):
        return len(self.maps)

    @property
    def dim(self):
        return self.maps[0].dim

    def is_equicontractive(self, tol=TOL):
        return bool(np.ptp(self._ratios) <= tol)

    def __len__(self):
        return len(self.maps)

    def __getitem__(self, i):
        return self.maps[i]


@dataclass(frozen=True)
class Violation:
    invariant: str
    atom: int | None = None
    map: int | None = None
    detail: str = ""

    def __str__(self):
        where = "" if self.atom is None else f" (atom {self.atom}" + ("" if self.map is None else f", map {self.map}") + ")"
        return f"{self.invariant}{where}{': ' + self.detail if self.detail else ''}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self):
        return not self.violations

    def invariants(self):
        return {v.invariant for v in self.violations}

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "pass"
        return "fail: " + "; ".join(str(v) for v in self.violations)


class RifsDistribution:
    """Finite-support distribution over IFS tuples.

    ``r_min``, ``r_max`` and ``n_max`` are the global bounds the atoms are
    validated against; when omitted they default to the extremes found in the
    atoms themselves.
    """

    def __init__(self, atoms, weights=None, r_min=None, r_max=None, n_max=None):
        atoms = tuple(a if isinstance(a, IfsTuple) else IfsTuple(tuple(a)) for a in atoms)
        if not atoms:
            raise ValueError("a distribution needs at least one atom")
        if weights is None:
            weights = np.full(len(atoms), 1.0 / len(atoms))
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(atoms),):
            raise ValueError("one weight per atom required")
        weights.flags.writeable = False
        self.atoms = atoms
        self.weights = weights
        all_ratios = np.concatenate([a.ratios for a in atoms])
        self.r_min = float(all_ratios.min() if r_min is None else r_min)
        self.r_max = float(all_ratios.max() if r_max is None else r_max)
        self.n_max = int(max(a.n_maps for a in atoms) if n_max is None else n_max)
        self._cumulative = np.cumsum(weights)

    @classmethod
    def single(cls, maps, **bounds):
        return cls([IfsTuple(tuple(maps))], [1.0], **bounds)

    @property
    def dim(self):
        return self.atoms[0].dim

    @property
    def max_maps(self):
        return max(a.n_maps for a in self.atoms)

    def is_equicontractive(self, tol=TOL):
        return all(a.is_equicontractive(tol) for a in self.atoms)

    def validate(self):
        return validate_distribution(self)

    def check(self):
        report = validate_distribution(self)
        if not report.ok:
            raise InvalidDistributionError(str(report))
        return self

    def pick(self, u):
        """Map uniforms in [0, 1) to atom indices by inverse CDF."""
        idx = np.searchsorted(self._cumulative, u, side="right")
        return np.minimum(idx, len(self.atoms) - 1)

    def __len__(self):
        return len(self.atoms)

    def __repr__(self):
        sizes = [a.n_maps for a in self.atoms]
        return f"RifsDistribution(d={self.dim}, maps_per_atom={sizes}, weights={self.weights.tolist()})"


def validate_distribution(dist, tol=TOL):
    """Check every structural invariant; never raises on a bad distribution."""
    out = []
    if not (0.0 < dist.r_min <= dist.r_max < 1.0):
        out.append(Violation("ratio bound", detail=f"need 0 < r_min <= r_max < 1, got [{dist.r_min}, {dist.r_max}]"))
    dims = {a.dim for a in dist.atoms}
    if len(dims) != 1:
        out.append(Violation("dimension", detail=f"atoms span dimensions {sorted(dims)}"))
    for k, atom in enumerate(dist.atoms):
        if atom.n_maps > dist.n_max:
            out.append(Violation("map count", k, detail=f"{atom.n_maps} > N_max={dist.n_max}"))
        for j, f in enumerate(atom.maps):
            if not (dist.r_min - tol <= f.ratio <= dist.r_max + tol) or not (0.0 < f.ratio < 1.0):
                out.append(Violation("ratio bound", k, j, f"ratio {f.ratio}"))
            reach = float(np.linalg.norm(f.translation)) + f.ratio
            if reach > 1.0 + tol:
                out.append(Violation("ball containment", k, j, f"|t| + r = {reach}"))
            q = f.orthogonal
            if np.max(np.abs(q @ q.T - np.eye(q.shape[0]))) > tol:
                out.append(Violation("orthogonality", k, j))
        w = dist.weights[k]
        if not (0.0 < w <= 1.0):
            out.append(Violation("weight range", k, detail=f"weight {w}"))
    total = float(np.sum(dist.weights))
    if abs(total - 1.0) > tol:
        out.append(Violation("weight sum", detail=f"weights sum to {total}"))
    if max(a.n_maps for a in dist.atoms) < 2:
        out.append(Violation("nondegenerate", detail="no atom has two or more maps"))
    return ValidationReport(tuple(out))


class Realization:
    """One sample omega of the level sequence, extended lazily.

    Level ``i`` is a pure function of ``(seed, i)``; ``prefix`` pins the first
    levels explicitly, which is how hand-built sequences such as (A, B, A) are
    represented.
    """

    def __init__(self, dist, seed=0, prefix=()):
        self.dist = dist
        self.seed = int(seed)
        self.prefix = tuple(int(i) for i in prefix)
        if any(not 0 <= i < len(dist) for i in self.prefix):
            raise ValueError("prefix atom index out of range")
        self._levels = np.array(self.prefix, dtype=np.int64)
        self._lock = threading.Lock()

    @classmethod
    def fixed(cls, dist, indices):
        return cls(dist, 0, indices)

    def indices(self, n):
        """Atom indices of levels ``0 .. n-1``."""
        n = int(n)
        if n > self._levels.size:
            with self._lock:
                have = self._levels.size
                if n > have:
                    if len(self.dist) == 1:
                        new = np.zeros(n - have, dtype=np.int64)
                    else:
                        u = _rng.uniforms(self.seed, _rng.REALIZATION, have, n - have)
                        new = self.dist.pick(u).astype(np.int64)
                    levels = np.concatenate([self._levels, new])
                    levels.flags.writeable = False
                    self._levels = levels
        return self._levels[:n]

    def atom(self, i):
        return self.dist.atoms[int(self.indices(i + 1)[i])]

    def tuples(self, n):
        return [self.dist.atoms[k] for k in self.indices(n)]

    def map_counts(self, n):
        return np.array([a.n_maps for a in self.tuples(n)], dtype=np.int64)

    def word_count(self, n):
        return math.prod(int(c) for c in self.map_counts(n))

    def __repr__(self):
        return f"Realization(seed={self.seed}, prefix={self.prefix})"


def sample_realization(dist, seed):
    return Realization(dist, seed)


def check_word(omega, v):
    v = tuple(int(a) for a in v)
    counts = omega.map_counts(len(v))
    for i, (a, c) in enumerate(zip(v, counts)):
        if not 0 <= a < c:
            raise WordMismatchError(f"word/realization mismatch: letter {a} at level {i} but only {c} maps")
    return v


def apply_word(omega, v, x):
    """``f_0^{v_0} o ... o f_{n-1}^{v_{n-1}}(x)``."""
    v = check_word(omega, v)
    y = np.atleast_1d(np.asarray(x, dtype=float))
    for atom, a in reversed(list(zip(omega.tuples(len(v)), v))):
        y = atom.maps[a](y)
    return y


def composed_ratio(omega, v):
    v = check_word(omega, v)
    return math.prod(atom.ratios[a] for atom, a in zip(omega.tuples(len(v)), v))


def _check_budget(omega, n, max_words):
    count = omega.word_count(n)
    if count > max_words:
        raise BudgetExceededError(f"enumeration budget: {count} words at depth {n} exceed {max_words}")
    return count


def composed_maps(omega, n, max_words=DEFAULT_MAX_WORDS):
    """Ratios, orthogonal parts and translations of all words of length ``n``.

    Words are in lexicographic order (level 0 varies slowest).
    """
    _check_budget(omega, n, max_words)
    d = omega.dist.dim
    ratios = np.ones(1)
    orth = np.eye(d)[None, :, :]
    trans = np.zeros((1, d))
    for atom in omega.tuples(n):
        r_a = atom.ratios
        q_a = np.stack([f.orthogonal for f in atom.maps])
        t_a = np.stack([f.translation for f in atom.maps])
        # f^{va}(x) = r_v Q_v (r_a Q_a x + t_a) + t_v
        rq_t = np.einsum("wij,aj->wai", orth, t_a) * ratios[:, None, None]
        trans = (trans[:, None, :] + rq_t).reshape(-1, d)
        orth = np.einsum("wij,ajk->waik", orth, q_a).reshape(-1, d, d)
        ratios = (ratios[:, None] * r_a[None, :]).reshape(-1)
    return ratios, orth, trans


def enumerate_words(omega, n, max_words=DEFAULT_MAX_WORDS):
    """All words of length ``n`` as an integer array, lexicographic order."""
    _check_budget(omega, n, max_words)
    counts = omega.map_counts(n)
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(c) for c in counts], indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)


@dataclass(frozen=True, eq=False)
class PrefixCover:
    """The level-``depth`` cover: one ball ``(center, radius)`` per word."""

    depth: int
    centers: np.ndarray
    radii: np.ndarray

    @property
    def dim(self):
        return self.centers.shape[1]

    @property
    def max_diameter(self):
        return 2.0 * float(np.max(self.radii))

    @property
    def balls(self):
        return [(c, float(r)) for c, r in zip(self.centers, self.radii)]

    def __len__(self):
        return self.radii.size

    def shifted(self, offset):
        return PrefixCover(self.depth, self.centers + np.asarray(offset, dtype=float), self.radii)


def prefix_cover(omega, n, max_words=DEFAULT_MAX_WORDS):
    ratios, _, trans = composed_maps(omega, n, max_words)
    return PrefixCover(int(n), trans, ratios)
