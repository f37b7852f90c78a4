"""Records passed between the estimation steps."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np


class InvalidSample(ValueError):
    """Raised when observations do not form a usable n x p sample."""


@dataclass(frozen=True)
class Sample:
    """n observations of dimension p, one per row."""
    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise InvalidSample(f"expected an n x p array, got shape {arr.shape}")
        n, p = arr.shape
        if p < 1 or n <= p:
            raise InvalidSample(f"need n > p >= 1, got n={n}, p={p}")
        if not np.all(np.isfinite(arr)):
            raise InvalidSample("sample has non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]

    def transformed(self, b_matrix, shift) -> "Sample":
        """Apply Y_i = B X_i + b to every observation."""
        return Sample(self.data @ np.asarray(b_matrix, dtype=float).T + np.asarray(shift, dtype=float))


@dataclass(frozen=True)
class EstimatorState:
    """Center, raw scatter, distances and ranks at iteration `step`."""
    step: int
    center: np.ndarray
    scatter: np.ndarray
    log_det: float
    distances: np.ndarray
    ranks: np.ndarray


@dataclass
class IterationTrace:
    """States for r = 0..R and D-efficiencies for r = 1..R."""
    states: List[EstimatorState] = field(default_factory=list)
    d_efficiency: List[float] = field(default_factory=list)
    converged_at: Optional[int] = None

    @property
    def final(self) -> EstimatorState:
        return self.states[-1]

    @property
    def centers(self) -> np.ndarray:
        return np.array([s.center for s in self.states])
