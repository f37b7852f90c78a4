"""
Affine-equivariant L-estimation of multivariate location.

Each step centers the sample at the current estimate, forms the raw scatter
A = sum (X_i - c)(X_i - c)^T, ranks the distances d_i = (X_i - c)^T A^{-1} (X_i - c)
and re-weights the observations by rank. The distances are affine invariant,
so every step is affine equivariant.
"""

import logging
from typing import Optional

import numpy as np

from linalg.spd import NotPositiveDefinite, SpdFactorization, quad_form_rows, spd_factorize
from estimators.ranking import ranks_of
from estimators.state import EstimatorState, IterationTrace, Sample
from estimators.weights import WeightScheme, weights_for

logger = logging.getLogger("l_estimator")

INITIALIZERS = ("mean", "nearest")


class DegenerateScatter(ArithmeticError):
    """Raised when a scatter matrix is singular; carries the partial trace if any."""

    def __init__(self, message: str, step: int = 0, trace: Optional[IterationTrace] = None):
        super().__init__(message)
        self.step = step
        self.trace = trace


def scatter_about(data: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Unnormalized sum of outer products about `center`."""
    centered = data - center
    a = centered.T @ centered
    return 0.5 * (a + a.T)


def _factorize(a: np.ndarray, step: int) -> SpdFactorization:
    try:
        return spd_factorize(a)
    except NotPositiveDefinite as e:
        raise DegenerateScatter(f"degenerate scatter at step {step}: {e}", step=step) from e


def mahalanobis_distances(data, center, f: SpdFactorization) -> np.ndarray:
    """d_i = (X_i - center)^T A^{-1} (X_i - center) for every row."""
    return quad_form_rows(f, np.asarray(data, dtype=float) - np.asarray(center, dtype=float))


def state_at(s: Sample, center, step: int) -> EstimatorState:
    """Scatter, distances and ranks of the sample about a given center."""
    c = np.array(center, dtype=float)
    a = scatter_about(s.data, c)
    f = _factorize(a, step)
    d = mahalanobis_distances(s.data, c, f)
    return EstimatorState(step=step, center=c, scatter=a, log_det=f.log_det,
                          distances=d, ranks=ranks_of(d))


def mean_state(s: Sample) -> EstimatorState:
    """Step 0: the sample mean and A^(0)."""
    return state_at(s, s.data.mean(axis=0), 0)


def nearest_state(s: Sample) -> EstimatorState:
    """Step 0 started from X_[1], the observation with rank 1 about the mean."""
    base = mean_state(s)
    nearest = int(np.argmin(base.ranks))
    return state_at(s, s.data[nearest], 0)


def l_step(s: Sample, prev: EstimatorState, scheme: WeightScheme) -> EstimatorState:
    """One iteration: L^(r) = sum_i w(R_i^(r-1)) X_i, then re-rank about it."""
    w = weights_for(scheme, s.n)
    center = w[prev.ranks - 1] @ s.data
    return state_at(s, center, prev.step + 1)


def d_efficiency_from_log_dets(log_det_r: float, log_det_0: float, p: int) -> float:
    return float(np.exp((log_det_r - log_det_0) / p))


def d_efficiency(a_r, a_0, p: int) -> float:
    """(|A^(r)| / |A^(0)|)^(1/p), computed from log-determinants."""
    f_r = _factorize(np.asarray(a_r, dtype=float), 0)
    f_0 = _factorize(np.asarray(a_0, dtype=float), 0)
    if f_r.dim != p or f_0.dim != p:
        raise ValueError(f"scatter dimensions {f_r.dim}, {f_0.dim} do not match p={p}")
    return d_efficiency_from_log_dets(f_r.log_det, f_0.log_det, p)


def iterate(s: Sample, scheme: WeightScheme, max_steps: int = 10, tol: float = 0.0,
            initial: str = "mean") -> IterationTrace:
    """Run the r-step iteration.

    Stops early when the sup-norm change of the center is <= tol; tol = 0
    never stops early. D-efficiencies are taken against A^(0) about the mean
    whichever initializer is used.
    """
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    if tol < 0:
        raise ValueError(f"tol must be >= 0, got {tol}")
    if initial not in INITIALIZERS:
        raise ValueError(f"unknown initializer {initial!r}")

    reference = mean_state(s)
    start = reference if initial == "mean" else nearest_state(s)
    trace = IterationTrace(states=[start])

    prev = start
    for r in range(1, max_steps + 1):
        try:
            state = l_step(s, prev, scheme)
        except DegenerateScatter as e:
            logger.warning("Iteration aborted at step %d: %s", r, e)
            raise DegenerateScatter(str(e), step=r, trace=trace) from e
        trace.states.append(state)
        trace.d_efficiency.append(d_efficiency_from_log_dets(state.log_det, reference.log_det, s.p))
        change = float(np.max(np.abs(state.center - prev.center)))
        logger.debug("%s step %d: center=%s change=%.3e D=%.6f",
                     scheme.label, r, state.center, change, trace.d_efficiency[-1])
        prev = state
        if tol > 0 and change <= tol:
            trace.converged_at = r
            break
    return trace


def estimate_location(data, scheme: WeightScheme, iterations: int = 10, tol: float = 0.0) -> np.ndarray:
    """Final center of `iterate` on raw observations."""
    return iterate(Sample(data), scheme, iterations, tol).final.center


def reduced_invariant(s: Sample) -> np.ndarray:
    """Distances of X_1..X_{n-1} about X_n, scaled by sum_{i<n} (X_i - X_n)(X_i - X_n)^T."""
    anchor = s.data[-1]
    rest = s.data[:-1]
    f = _factorize(scatter_about(rest, anchor), 0)
    return mahalanobis_distances(rest, anchor, f)
