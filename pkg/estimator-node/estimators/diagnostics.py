"""
Finite-sample checks on the distances d_ni^(r).

The distances are exchangeable, lie in [0, 1] and sum to p at every step;
under a normal model n * d_ni is close to chi-squared with p degrees of
freedom. These helpers measure how well a given sample meets that.
"""

import logging
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy import stats

from estimators.state import EstimatorState, IterationTrace

logger = logging.getLogger("diagnostics")

SUM_TOL = 1e-8


@dataclass(frozen=True)
class StepCheck:
    step: int
    distance_sum: float
    mean_distance: float
    min_distance: float
    max_distance: float
    within_unit_interval: bool
    sums_to_p: bool


def check_state(state: EstimatorState, p: int, tol: float = SUM_TOL) -> StepCheck:
    d = state.distances
    total = float(d.sum())
    return StepCheck(
        step=state.step,
        distance_sum=total,
        mean_distance=float(d.mean()),
        min_distance=float(d.min()),
        max_distance=float(d.max()),
        within_unit_interval=bool(np.all(d >= -tol) and np.all(d <= 1.0 + tol)),
        sums_to_p=abs(total - p) <= tol,
    )


def exchangeability_summary(trace: IterationTrace, p: int) -> List[StepCheck]:
    """Per-step sum, mean (expected p/n) and range of the distances."""
    checks = [check_state(s, p) for s in trace.states]
    for c in checks:
        if not (c.within_unit_interval and c.sums_to_p):
            logger.warning("Distance constraints violated at step %d: sum=%r range=[%r, %r]",
                           c.step, c.distance_sum, c.min_distance, c.max_distance)
    return checks


def distance_law_distance(state: EstimatorState, p: int) -> float:
    """Kolmogorov distance between the empirical law of n * d_i and chi2(p)."""
    n = state.distances.size
    result = stats.kstest(n * state.distances, stats.chi2(df=p).cdf)
    logger.debug("KS distance of n*d against chi2(%d) at step %d: %.4f", p, state.step, result.statistic)
    return float(result.statistic)
