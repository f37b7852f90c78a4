"""
Declarative Monte-Carlo campaign configuration.

A campaign file is JSON with field names mirroring SimulationConfig:

    {
      "name": "paper_normal",
      "distribution": {"kind": "normal", "theta": [1, 2, -1], "sigma": [[1, 0.5, 0.5], ...]},
      "n": 100,
      "replications": 500,
      "iterations": 10,
      "master_seed": 20150401,
      "schemes": [{"type": "l1", "kn": 15}, {"type": "l2", "kn": 15}],
      "comparators": {"mean": true, "coordinate_median": true, "spatial_median": true}
    }

`master_seed` is mandatory; there is no wall-clock seeding.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List

from estimators.weights import InvalidScheme, WeightScheme, scheme_from_dict
from estimators.l_estimator import INITIALIZERS
from sampling.distributions import DistributionSpec

logger = logging.getLogger("simulation")

COMPARATOR_NAMES = ("mean", "coordinate_median", "spatial_median")
DEFAULT_MAX_FAILURE_FRACTION = 0.01


class ConfigInvalid(ValueError):
    """Raised when a campaign configuration cannot be used."""


@dataclass(frozen=True)
class SimulationConfig:
    spec: DistributionSpec
    n: int
    replications: int
    schemes: List[WeightScheme]
    iterations: int
    master_seed: int
    comparators: Dict[str, bool] = field(default_factory=lambda: {c: True for c in COMPARATOR_NAMES})
    name: str = "campaign"
    tol: float = 0.0
    initial: str = "mean"
    emit_raw: bool = False
    max_failure_fraction: float = DEFAULT_MAX_FAILURE_FRACTION

    def __post_init__(self):
        if self.replications < 1:
            raise ConfigInvalid(f"replications must be >= 1, got {self.replications}")
        if self.iterations < 1:
            raise ConfigInvalid(f"iterations must be >= 1, got {self.iterations}")
        if self.n <= self.spec.p:
            raise ConfigInvalid(f"n={self.n} must exceed p={self.spec.p}")
        if not self.schemes:
            raise ConfigInvalid("at least one weight scheme is required")
        labels = [s.label for s in self.schemes]
        if len(set(labels)) != len(labels):
            raise ConfigInvalid(f"duplicate schemes: {labels}")
        unknown = set(self.comparators) - set(COMPARATOR_NAMES)
        if unknown:
            raise ConfigInvalid(f"unknown comparators: {sorted(unknown)}")
        if self.initial not in INITIALIZERS:
            raise ConfigInvalid(f"unknown initializer {self.initial!r}")
        if self.tol < 0:
            raise ConfigInvalid(f"tol must be >= 0, got {self.tol}")
        for scheme in self.schemes:
            try:
                scheme.weights(self.n)
            except InvalidScheme as e:
                raise ConfigInvalid(str(e)) from e

    @property
    def enabled_comparators(self) -> List[str]:
        return [c for c in COMPARATOR_NAMES if self.comparators.get(c, False)]

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "distribution": self.spec.to_dict(),
            "n": self.n,
            "replications": self.replications,
            "iterations": self.iterations,
            "master_seed": self.master_seed,
            "schemes": [s.to_dict() for s in self.schemes],
            "comparators": {c: bool(self.comparators.get(c, False)) for c in COMPARATOR_NAMES},
            "tol": self.tol,
            "initial": self.initial,
            "emit_raw": self.emit_raw,
            "max_failure_fraction": self.max_failure_fraction,
        }

    @classmethod
    def from_dict(cls, obj: Dict) -> "SimulationConfig":
        if not isinstance(obj, dict):
            raise ConfigInvalid("configuration must be a JSON object")
        if "master_seed" not in obj:
            raise ConfigInvalid("master_seed is mandatory")
        try:
            return cls(
                spec=DistributionSpec.from_dict(obj["distribution"]),
                n=int(obj["n"]),
                replications=int(obj["replications"]),
                schemes=[scheme_from_dict(s) for s in obj["schemes"]],
                iterations=int(obj.get("iterations", 10)),
                master_seed=int(obj["master_seed"]),
                comparators={k: bool(v) for k, v in
                             obj.get("comparators", {c: True for c in COMPARATOR_NAMES}).items()},
                name=str(obj.get("name", "campaign")),
                tol=float(obj.get("tol", 0.0)),
                initial=str(obj.get("initial", "mean")),
                emit_raw=bool(obj.get("emit_raw", False)),
                max_failure_fraction=float(obj.get("max_failure_fraction", DEFAULT_MAX_FAILURE_FRACTION)),
            )
        except ConfigInvalid:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigInvalid(f"invalid configuration: {e!r}") from e


def load_config(path: str) -> SimulationConfig:
    """Read a campaign file."""
    try:
        with open(path, "r") as f:
            obj = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigInvalid(f"cannot read {path}: {e}") from e
    cfg = SimulationConfig.from_dict(obj)
    logger.info("Loaded campaign '%s' from %s", cfg.name, path)
    return cfg
