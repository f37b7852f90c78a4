"""
Monte-Carlo harness.

Replications are independent: replication i draws its sample from
SeedSequence([master_seed, i]), so they are fanned out over a thread pool
and reduced afterwards in index order.
"""

import asyncio
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from comparators.location import NoConvergence, coordinate_median, sample_mean, spatial_median
from estimators.l_estimator import DegenerateScatter, iterate
from sampling.distributions import replication_seed, sample
from simulation.config import SimulationConfig
from simulation.summary import ReplicationRecord, SimulationSummary, aggregate

logger = logging.getLogger("simulation")

THREADS_ENV = "AFFINEST_THREADS"

COMPARATOR_FUNCS = {
    "mean": sample_mean,
    "coordinate_median": coordinate_median,
    "spatial_median": spatial_median,
}


class TooManyFailures(RuntimeError):
    """Raised when more replications degenerate than the campaign tolerates."""

    def __init__(self, message: str, summary: Optional[SimulationSummary] = None):
        super().__init__(message)
        self.summary = summary


def resolve_threads(threads: Optional[int] = None) -> int:
    """Explicit value, else AFFINEST_THREADS, else 0; 0 means os.cpu_count()."""
    if threads is None:
        try:
            threads = int(os.environ.get(THREADS_ENV, "0"))
        except ValueError:
            logger.warning("Ignoring non-integer %s=%r", THREADS_ENV, os.environ.get(THREADS_ENV))
            threads = 0
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def _padded(values: np.ndarray, length: int) -> np.ndarray:
    # an early-stopped trace sits at its fixed point for the remaining steps
    if values.shape[0] >= length:
        return values
    pad = np.repeat(values[-1:], length - values.shape[0], axis=0)
    return np.concatenate([values, pad])


def run_replication(cfg: SimulationConfig, index: int) -> ReplicationRecord:
    """Draw one sample, iterate every scheme and evaluate the comparators."""
    record = ReplicationRecord(index=index)
    data = sample(cfg.spec, cfg.n, replication_seed(cfg.master_seed, index))
    try:
        for scheme in cfg.schemes:
            trace = iterate(data, scheme, cfg.iterations, cfg.tol, cfg.initial)
            record.centers[scheme.label] = _padded(trace.centers, cfg.iterations + 1)
            record.d_efficiency[scheme.label] = _padded(np.asarray(trace.d_efficiency), cfg.iterations)
        for name in cfg.enabled_comparators:
            record.comparators[name] = np.asarray(COMPARATOR_FUNCS[name](data), dtype=float)
    except (DegenerateScatter, NoConvergence) as e:
        logger.warning("Replication %d excluded: %s", index, e)
        record.error = str(e)
    return record


async def _run_all(cfg: SimulationConfig, threads: int) -> List[ReplicationRecord]:
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        tasks = [loop.run_in_executor(pool, run_replication, cfg, i)
                 for i in range(cfg.replications)]
        return list(await asyncio.gather(*tasks))


def run_simulation(cfg: SimulationConfig, threads: Optional[int] = None) -> SimulationSummary:
    """Run every replication and aggregate the table statistics."""
    workers = resolve_threads(threads)
    logger.info("Campaign '%s': %d replications, n=%d, %d iterations, schemes=%s, threads=%d",
                cfg.name, cfg.replications, cfg.n, cfg.iterations,
                [s.label for s in cfg.schemes], workers)
    started = time.time()

    if workers == 1:
        records = [run_replication(cfg, i) for i in range(cfg.replications)]
    else:
        records = asyncio.run(_run_all(cfg, workers))

    failures = sum(1 for r in records if r.failed)
    limit = cfg.max_failure_fraction * cfg.replications
    if failures == cfg.replications:
        raise TooManyFailures(f"all {failures} replications degenerate")

    summary = aggregate(cfg.to_dict(), [s.label for s in cfg.schemes], cfg.enabled_comparators,
                        cfg.iterations, records)
    if failures > limit:
        raise TooManyFailures(
            f"{failures} of {cfg.replications} replications degenerate (limit {limit:g})", summary)

    logger.info("Campaign '%s' finished in %.1fs (%d excluded)", cfg.name, time.time() - started, failures)
    return summary
