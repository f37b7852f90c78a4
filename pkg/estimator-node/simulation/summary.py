"""Aggregation of replication records into table statistics."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np


class EmptyInput(ValueError):
    """Raised when a statistic is requested over no values."""


def quantile(values, q: float) -> float:
    """Linear-interpolation quantile between closest ranks (h = (n - 1) q + 1)."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise EmptyInput("quantile of an empty set")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q={q} outside [0, 1]")
    return float(np.quantile(x, q, method="linear"))


@dataclass(frozen=True)
class CellStats:
    mean: float
    median: float
    q25: float
    q75: float
    min: float
    max: float

    FIELDS = ("mean", "median", "q25", "q75", "min", "max")

    def to_dict(self) -> Dict[str, float]:
        return {k: getattr(self, k) for k in self.FIELDS}


def cell_stats(values) -> CellStats:
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise EmptyInput("no values to aggregate")
    return CellStats(
        mean=float(np.mean(x)),
        median=quantile(x, 0.5),
        q25=quantile(x, 0.25),
        q75=quantile(x, 0.75),
        min=float(np.min(x)),
        max=float(np.max(x)),
    )


@dataclass
class ReplicationRecord:
    """One replication: centers (R+1, p) and D-efficiencies (R,) per scheme."""
    index: int
    centers: Dict[str, np.ndarray] = field(default_factory=dict)
    d_efficiency: Dict[str, np.ndarray] = field(default_factory=dict)
    comparators: Dict[str, np.ndarray] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class SimulationSummary:
    """Per scheme and iteration r = 1..R: coordinate and D-efficiency statistics."""
    config: Dict
    replications: int
    failures: int
    failed_indices: List[int]
    estimates: Dict[str, List[List[CellStats]]]
    d_efficiency: Dict[str, List[CellStats]]
    comparators: Dict[str, List[CellStats]]
    records: List[ReplicationRecord] = field(default_factory=list, compare=False)

    @property
    def used(self) -> int:
        return self.replications - self.failures

    def to_dict(self) -> Dict:
        return {
            "config": self.config,
            "replications": self.replications,
            "failures": self.failures,
            "failed_indices": list(self.failed_indices),
            "estimates": {
                label: [{"iteration": r + 1, "coordinates": [c.to_dict() for c in coords]}
                        for r, coords in enumerate(rows)]
                for label, rows in self.estimates.items()
            },
            "d_efficiency": {
                label: [{"iteration": r + 1, **c.to_dict()} for r, c in enumerate(rows)]
                for label, rows in self.d_efficiency.items()
            },
            "comparators": {
                name: [c.to_dict() for c in coords] for name, coords in self.comparators.items()
            },
        }


def aggregate(config: Dict, labels: List[str], comparator_names: List[str], iterations: int,
              records: List[ReplicationRecord]) -> SimulationSummary:
    """Deterministic reduction over records ordered by replication index."""
    ordered = sorted(records, key=lambda r: r.index)
    good = [r for r in ordered if not r.failed]
    failed = [r.index for r in ordered if r.failed]
    if not good:
        raise EmptyInput("every replication failed")

    estimates = {}
    d_eff = {}
    for label in labels:
        centers = np.stack([r.centers[label] for r in good])        # (reps, R+1, p)
        defs = np.stack([r.d_efficiency[label] for r in good])      # (reps, R)
        estimates[label] = [[cell_stats(centers[:, step, j]) for j in range(centers.shape[2])]
                            for step in range(1, iterations + 1)]
        d_eff[label] = [cell_stats(defs[:, step]) for step in range(iterations)]

    comps = {}
    for name in comparator_names:
        values = np.stack([r.comparators[name] for r in good])
        comps[name] = [cell_stats(values[:, j]) for j in range(values.shape[1])]

    return SimulationSummary(
        config=config,
        replications=len(ordered),
        failures=len(failed),
        failed_indices=failed,
        estimates=estimates,
        d_efficiency=d_eff,
        comparators=comps,
        records=ordered,
    )
