"""
Baseline location estimators the L-estimators are compared against.
"""

import logging

import numpy as np
from scipy.special import gammaln

from estimators.state import Sample

logger = logging.getLogger("comparators")

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 500


class NoConvergence(RuntimeError):
    """Raised when the spatial median iteration runs out of steps."""


class InvalidK(ValueError):
    """Raised for a rank-weighted mean order outside [0, (n+1)/2]."""


def _rows(s) -> np.ndarray:
    if isinstance(s, Sample):
        return s.data
    arr = np.asarray(s, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValueError(f"expected an n x p array with n >= 1, got shape {arr.shape}")
    return arr


def sample_mean(s) -> np.ndarray:
    return _rows(s).mean(axis=0)


def coordinate_median(s) -> np.ndarray:
    """Per-coordinate median; midpoint of the central order statistics for even n."""
    return np.median(_rows(s), axis=0)


def spatial_median(s, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> np.ndarray:
    """Minimizer of sum_i ||x - X_i||, by Weiszfeld iteration.

    When an iterate comes within `tol` of an observation, that observation is
    returned if it satisfies the subgradient condition
    ||sum_{j: X_j != X_i} (X_j - X_i) / ||X_j - X_i|| || <= m_i
    (m_i = multiplicity of X_i); otherwise the iteration steps off it with
    the Vardi-Zhang modification.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    data = _rows(s)
    x = data.mean(axis=0)

    for it in range(max_iter):
        dist = np.linalg.norm(data - x, axis=1)
        nearest = int(np.argmin(dist))
        eta = 0.0
        if dist[nearest] <= tol:
            x = data[nearest]
            dist = np.linalg.norm(data - x, axis=1)
            coincident = dist == 0.0
            eta = float(np.count_nonzero(coincident))
            others = ~coincident
            if not np.any(others):
                return x.copy()
            grad = ((data[others] - x) / dist[others, None]).sum(axis=0)
            if np.linalg.norm(grad) <= eta:
                logger.debug("Spatial median at observation %d after %d iterations", nearest, it)
                return x.copy()
        else:
            others = np.ones(data.shape[0], dtype=bool)

        inv = 1.0 / dist[others]
        weiszfeld = (inv[:, None] * data[others]).sum(axis=0) / inv.sum()
        if eta > 0:
            pull = np.linalg.norm(((data[others] - x) * inv[:, None]).sum(axis=0))
            gamma = min(1.0, eta / pull)
            x_new = (1.0 - gamma) * weiszfeld + gamma * x
        else:
            x_new = weiszfeld

        if np.max(np.abs(x_new - x)) <= tol:
            return x_new
        x = x_new

    logger.warning("Spatial median did not converge in %d iterations", max_iter)
    raise NoConvergence(f"spatial median did not converge in {max_iter} iterations")


def rank_weighted_mean_1d(x, k: int) -> float:
    """k-order rank weighted mean of univariate data.

    T_nk = C(n, 2k+1)^{-1} sum_{i=k+1}^{n-k} C(i-1, k) C(n-i, k) X_(i);
    k = 0 is the mean and orders with 2k+1 > n collapse to the median.
    """
    values = np.sort(np.asarray(x, dtype=float).ravel())
    n = values.size
    if n < 1:
        raise ValueError("rank_weighted_mean_1d needs at least one value")
    if k < 0 or k > (n + 1) // 2:
        raise InvalidK(f"k={k} outside [0, {(n + 1) // 2}] for n={n}")
    if k == 0:
        return float(np.mean(values))
    if 2 * k + 1 > n:
        return float(np.median(values))

    i = np.arange(k + 1, n - k + 1, dtype=float)
    log_w = (_log_binomial(i - 1, k) + _log_binomial(n - i, k)
             - _log_binomial(float(n), 2 * k + 1))
    return float(np.exp(log_w) @ values[k:n - k])


def _log_binomial(a, b):
    return gammaln(np.asarray(a) + 1) - gammaln(b + 1) - gammaln(np.asarray(a) - b + 1)
