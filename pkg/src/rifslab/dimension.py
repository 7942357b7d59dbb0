"""Almost-sure Minkowski dimension of a random homogeneous self-similar set.

The dimension is the root ``s`` of ``E[log sum_i r_i^s] = 0``, found by
bisection; the left side is strictly decreasing in ``s``.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import RifsError

DEFAULT_TOL = 1e-12
AGREEMENT_TOL = 1e-9


class DegenerateDistributionError(RifsError, ValueError):
    pass


class DimensionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DimensionResult:
    s: float
    residual: float
    bracket: tuple


def hutchinson_sum(atom, s):
    """``sum_i r_i^s`` for one IFS tuple."""
    if s < 0:
        raise ValueError("exponent must be nonnegative")
    return float(np.sum(atom.ratios**s))


def log_hutchinson(atom, s):
    """``log sum_i r_i^s``, computed in log space so large ``s`` cannot underflow."""
    logs = s * np.log(atom.ratios)
    top = logs.max()
    return float(top + math.log(np.sum(np.exp(logs - top))))


def expected_log_hutchinson(dist, s):
    return float(sum(w * log_hutchinson(a, s) for a, w in zip(dist.atoms, dist.weights)))


def bisect_decreasing(fn, lo, hi, tol=DEFAULT_TOL, max_iter=200):
    """Root of a strictly decreasing ``fn`` with ``fn(lo) > 0 >= fn(hi)``.

    Returns ``(root, (lo, hi))`` where the final bracket is no wider than ``tol``
    (or as narrow as floating point allows).
    """
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo <= 0 or f_hi > 0:
        raise RuntimeError(f"bisection bracket [{lo}, {hi}] does not straddle a root ({f_lo}, {f_hi})")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = fn(mid)
        if f_mid > 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    root = lo if abs(f_lo) < abs(f_hi) else hi
    return root, (lo, hi)


def _upper_bracket(dist):
    # at this exponent N_max * r_max^s <= 1, so every atom's log-sum is <= 0
    n_max = max(a.n_maps for a in dist.atoms)
    r_max = max(float(a.ratios.max()) for a in dist.atoms)
    return math.log(n_max) / math.log(1.0 / r_max)


def almost_sure_dimension(dist, tol=DEFAULT_TOL):
    """Solve ``E[log hutchinson_sum] = 0``; warns when the root exceeds the ambient dimension."""
    if expected_log_hutchinson(dist, 0.0) <= 0:
        raise DegenerateDistributionError("degenerate distribution: E[log N] <= 0")
    fn = lambda s: expected_log_hutchinson(dist, s)  # noqa: E731
    s, bracket = bisect_decreasing(fn, 0.0, _upper_bracket(dist), tol)
    if s > dist.dim + tol:
        warnings.warn(f"dimension {s:.6g} exceeds ambient dimension {dist.dim}", DimensionWarning, stacklevel=2)
    return DimensionResult(s, fn(s), bracket)


def similarity_dimension(atom, tol=DEFAULT_TOL):
    """Root of ``hutchinson_sum(atom, s) = 1``; 0 for a single-map tuple."""
    if atom.n_maps == 1:
        return 0.0
    hi = math.log(atom.n_maps) / math.log(1.0 / float(atom.ratios.max()))
    s, _ = bisect_decreasing(lambda t: log_hutchinson(atom, t), 0.0, hi, tol)
    return s


def is_almost_deterministic(dist, tol=AGREEMENT_TOL):
    """The common similarity dimension of all atoms, or None if they disagree."""
    dims = [similarity_dimension(a) for a in dist.atoms]
    if max(dims) - min(dims) > tol:
        return None
    return float(np.dot(dist.weights, dims) / np.sum(dist.weights))


def variance_bound(dist, s):
    """``max{(s log r_min)^2, (log(N_max r_max^s))^2}``, the bound on ``(log hutchinson)^2``."""
    return max((s * math.log(dist.r_min)) ** 2, math.log(dist.n_max * dist.r_max**s) ** 2)


def log_hutchinson_variance(dist, s):
    """Variance of ``log hutchinson_sum`` under the atom weights."""
    vals = np.array([log_hutchinson(a, s) for a in dist.atoms])
    mean = float(np.dot(dist.weights, vals))
    return float(np.dot(dist.weights, (vals - mean) ** 2))
