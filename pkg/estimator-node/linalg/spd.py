"""
Small dense symmetric positive-definite linear algebra.

Every matrix inverted by the estimators is a sum of outer products, so a
Cholesky factor gives the inverse action and the log-determinant together.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

logger = logging.getLogger("spd")

# Relative pivot threshold, scaled by trace/dim
PIVOT_EPS = 1e-12
SYMMETRY_TOL = 1e-9


class NotPositiveDefinite(ArithmeticError):
    """Raised when a matrix is singular or not positive definite."""


class DimensionMismatch(ValueError):
    """Raised when operand shapes do not agree."""


@dataclass(frozen=True)
class SpdFactorization:
    """Lower Cholesky factor L with M = L L^T, plus log|M|."""
    lower: np.ndarray
    log_det: float

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def reconstruct(self) -> np.ndarray:
        return self.lower @ self.lower.T


def as_matrix(m) -> np.ndarray:
    """Validate a finite 2-D float array."""
    arr = np.array(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def spd_factorize(m) -> SpdFactorization:
    """Factorize a symmetric positive-definite matrix.

    Raises NotPositiveDefinite if any pivot L_jj^2 falls to
    PIVOT_EPS * trace(m) / dim or below, which is how a degenerate
    scatter (n <= p, collinear data) shows up.
    """
    arr = as_matrix(m)
    dim = arr.shape[0]
    if arr.shape[1] != dim:
        raise DimensionMismatch(f"matrix is not square: {arr.shape}")

    scale = np.max(np.abs(arr))
    if np.max(np.abs(arr - arr.T)) > SYMMETRY_TOL * scale:
        raise ValueError("matrix is not symmetric")

    trace = float(np.trace(arr))
    if trace <= 0.0:
        raise NotPositiveDefinite(f"non-positive trace {trace!r}")

    try:
        lower = la.cholesky(arr, lower=True)
    except la.LinAlgError as e:
        raise NotPositiveDefinite(str(e)) from e

    diag = np.diag(lower)
    threshold = PIVOT_EPS * trace / dim
    if np.any(diag * diag <= threshold):
        logger.debug("Pivot below %g in factorization of %dx%d matrix", threshold, dim, dim)
        raise NotPositiveDefinite(
            f"pivot {float(np.min(diag * diag))!r} below threshold {threshold!r}")

    lower.setflags(write=False)
    return SpdFactorization(lower=lower, log_det=float(2.0 * np.sum(np.log(diag))))


def _check_dim(f: SpdFactorization, v: np.ndarray) -> None:
    if v.shape[0] != f.dim:
        raise DimensionMismatch(f"vector length {v.shape[0]} does not match dimension {f.dim}")


def solve(f: SpdFactorization, v) -> np.ndarray:
    """Return M^{-1} v through two triangular solves."""
    vec = np.asarray(v, dtype=float)
    _check_dim(f, vec)
    y = la.solve_triangular(f.lower, vec, lower=True)
    return la.solve_triangular(f.lower.T, y, lower=False)


def quad_form(f: SpdFactorization, v) -> float:
    """Return v^T M^{-1} v (squared Mahalanobis norm of v)."""
    vec = np.asarray(v, dtype=float)
    if vec.ndim != 1:
        raise DimensionMismatch("quad_form expects a vector")
    _check_dim(f, vec)
    y = la.solve_triangular(f.lower, vec, lower=True)
    return float(y @ y)


def quad_form_rows(f: SpdFactorization, rows) -> np.ndarray:
    """Row-wise v_i^T M^{-1} v_i for an (n, dim) array."""
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != f.dim:
        raise DimensionMismatch(f"rows of shape {arr.shape} do not match dimension {f.dim}")
    y = la.solve_triangular(f.lower, arr.T, lower=True)
    return np.einsum("ij,ij->j", y, y)
