"""
Seeded multivariate normal and multivariate t samples.

Streams come from numpy's PCG64 generator seeded through SeedSequence;
normal variates use numpy's ziggurat `standard_normal`. Replication i of a
campaign with master seed m draws from SeedSequence([m, i]), so replications
are independent and can run in any order.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Union

import numpy as np

from linalg.spd import NotPositiveDefinite, spd_factorize
from estimators.l_estimator import DegenerateScatter
from estimators.state import Sample

logger = logging.getLogger("sampling")

NORMAL = "normal"
STUDENT_T = "t"

BUNDLED_THETA = (1.0, 2.0, -1.0)

Seed = Union[int, Sequence[int]]


def equicorrelation(p: int, rho: float = 0.5) -> np.ndarray:
    """Unit-diagonal matrix with constant off-diagonal rho."""
    return (1.0 - rho) * np.eye(p) + rho * np.ones((p, p))


@dataclass(frozen=True)
class DistributionSpec:
    """Normal or Student t location-scatter model."""
    kind: str
    theta: np.ndarray
    sigma: np.ndarray
    df: Optional[float] = None

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).ravel()
        sigma = np.array(self.sigma, dtype=float)
        if sigma.shape != (theta.size, theta.size):
            raise ValueError(f"sigma shape {sigma.shape} does not match theta of length {theta.size}")
        if self.kind not in (NORMAL, STUDENT_T):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == STUDENT_T and (self.df is None or not self.df > 0):
            raise ValueError(f"Student t needs df > 0, got {self.df!r}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "sigma", sigma)

    @property
    def p(self) -> int:
        return self.theta.size

    def to_dict(self) -> Dict:
        out = {"kind": self.kind, "theta": self.theta.tolist(), "sigma": self.sigma.tolist()}
        if self.kind == STUDENT_T:
            out["df"] = self.df
        return out

    @classmethod
    def from_dict(cls, obj: Dict) -> "DistributionSpec":
        return cls(kind=obj["kind"], theta=obj["theta"], sigma=obj["sigma"], df=obj.get("df"))


def bundled_spec(kind: str = NORMAL, p: int = 3, df: float = 3.0) -> DistributionSpec:
    """theta = (1, 2, -1) and equicorrelation 1/2, truncated to the first p coordinates."""
    if not 1 <= p <= len(BUNDLED_THETA):
        raise ValueError(f"the bundled model has 1 <= p <= {len(BUNDLED_THETA)}, got {p}")
    theta = np.array(BUNDLED_THETA[:p])
    return DistributionSpec(kind=kind, theta=theta, sigma=equicorrelation(p),
                            df=df if kind == STUDENT_T else None)


def rng_for(seed: Seed) -> np.random.Generator:
    entropy = [int(seed)] if np.isscalar(seed) else [int(s) for s in seed]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def replication_seed(master_seed: int, index: int) -> Sequence[int]:
    return (int(master_seed), int(index))


def _chi_square(rng: np.random.Generator, df: float, n: int) -> np.ndarray:
    # integer df: sum of squared normals; otherwise a gamma(df/2, 2) draw
    if float(df).is_integer():
        z = rng.standard_normal((n, int(df)))
        return np.sum(z * z, axis=1)
    return rng.gamma(df / 2.0, 2.0, size=n)


def sample(spec: DistributionSpec, n: int, seed: Seed) -> Sample:
    """Draw n observations; identical (spec, n, seed) give identical output."""
    if n <= spec.p:
        raise ValueError(f"need n > p, got n={n}, p={spec.p}")
    try:
        lower = spd_factorize(spec.sigma).lower
    except NotPositiveDefinite as e:
        raise DegenerateScatter(f"sigma is not positive definite: {e}") from e

    rng = rng_for(seed)
    logger.debug("Drawing %d x %d %s sample, seed=%s", n, spec.p, spec.kind, seed)
    z = rng.standard_normal((n, spec.p)) @ lower.T
    if spec.kind == STUDENT_T:
        z = z / np.sqrt(_chi_square(rng, spec.df, n) / spec.df)[:, None]
    return Sample(spec.theta + z)
