"""
Rank weight schemes.

A scheme maps the ranks 1..n of the Mahalanobis distances to weights that
are nonincreasing, nonnegative and sum to one.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np
from scipy.special import gammaln

logger = logging.getLogger("weights")

# Above this k_n binomials leave the exact 64-bit range
EXACT_BINOMIAL_MAX_KN = 60
SUM_TOL = 1e-12


class InvalidScheme(ValueError):
    """Raised for out-of-range scheme parameters."""


def binomial(a: int, b: int) -> float:
    """C(a, b) as a float, exact for a <= 60, log-space above."""
    if b < 0 or a < 0 or b > a:
        return 0.0
    if a <= EXACT_BINOMIAL_MAX_KN:
        return float(math.comb(a, b))
    return float(np.exp(gammaln(a + 1) - gammaln(b + 1) - gammaln(a - b + 1)))


def _check_kn(kn: int, n: int, name: str) -> None:
    if not 1 <= kn <= n:
        raise InvalidScheme(f"{name}: k_n={kn} outside [1, n={n}]")


@dataclass(frozen=True)
class TrimmedL1:
    """Equal weights on the k_n innermost observations."""
    kn: int

    @property
    def label(self) -> str:
        return f"L1(kn={self.kn})"

    def weights(self, n: int) -> np.ndarray:
        _check_kn(self.kn, n, "TrimmedL1")
        w = np.zeros(n)
        w[:self.kn] = 1.0 / self.kn
        return w

    def to_dict(self) -> Dict:
        return {"type": "l1", "kn": self.kn}


@dataclass(frozen=True)
class RankWeightedL2:
    """Weights (k_n - i) / C(k_n, 2) on the k_n innermost observations."""
    kn: int

    @property
    def label(self) -> str:
        return f"L2(kn={self.kn})"

    def weights(self, n: int) -> np.ndarray:
        _check_kn(self.kn, n, "RankWeightedL2")
        if self.kn < 2:
            raise InvalidScheme("RankWeightedL2 needs k_n >= 2")
        i = np.arange(1, self.kn + 1, dtype=float)
        w = np.zeros(n)
        w[:self.kn] = (self.kn - i) / (self.kn * (self.kn - 1) / 2.0)
        return w

    def to_dict(self) -> Dict:
        return {"type": "l2", "kn": self.kn}


@dataclass(frozen=True)
class GeneralLk:
    """Weights C(k_n - i, k - 1) / C(k_n, k) for i <= k_n."""
    kn: int
    k: int

    @property
    def label(self) -> str:
        return f"Lk(kn={self.kn},k={self.k})"

    def weights(self, n: int) -> np.ndarray:
        _check_kn(self.kn, n, "GeneralLk")
        if not 1 <= self.k <= self.kn:
            raise InvalidScheme(f"GeneralLk: k={self.k} outside [1, k_n={self.kn}]")
        total = binomial(self.kn, self.k)
        w = np.zeros(n)
        for i in range(1, self.kn + 1):
            w[i - 1] = binomial(self.kn - i, self.k - 1) / total
        return w

    def to_dict(self) -> Dict:
        return {"type": "lk", "kn": self.kn, "k": self.k}


@dataclass(frozen=True)
class Poisson:
    """Untrimmed weights proportional to lambda^i / i!, renormalized over 1..n."""
    lam: float

    @property
    def label(self) -> str:
        return f"Poisson(lambda={self.lam:g})"

    def weights(self, n: int) -> np.ndarray:
        if not 0.0 < self.lam < 1.0:
            raise InvalidScheme(f"Poisson: lambda={self.lam} outside (0, 1)")
        if n < 1:
            raise InvalidScheme("Poisson: n must be positive")
        i = np.arange(1, n + 1, dtype=float)
        # e^{-lambda} and the (1 - e^{-lambda})^{-1} factor cancel in the renormalization
        log_mass = i * math.log(self.lam) - gammaln(i + 1)
        w = np.exp(log_mass - log_mass[0])
        return w / w.sum()

    def to_dict(self) -> Dict:
        return {"type": "poisson", "lambda": self.lam}


@dataclass(frozen=True)
class CustomScores:
    """User scores a_1 >= ... >= a_n >= 0, renormalized to sum 1."""
    scores: Tuple[float, ...]

    @property
    def label(self) -> str:
        return f"Scores(n={len(self.scores)})"

    def weights(self, n: int) -> np.ndarray:
        a = np.asarray(self.scores, dtype=float)
        if a.shape != (n,):
            raise InvalidScheme(f"CustomScores: {a.size} scores for n={n}")
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise InvalidScheme("CustomScores: scores must be finite and nonnegative")
        if np.any(np.diff(a) > 0):
            raise InvalidScheme("CustomScores: scores must be nonincreasing")
        total = a.sum()
        if total <= 0:
            raise InvalidScheme("CustomScores: scores are all zero")
        return a / total

    def to_dict(self) -> Dict:
        return {"type": "scores", "a": list(self.scores)}


WeightScheme = Union[TrimmedL1, RankWeightedL2, GeneralLk, Poisson, CustomScores]


def weights_for(scheme: WeightScheme, n: int) -> np.ndarray:
    """Realized weight vector over ranks 1..n."""
    w = scheme.weights(n)
    if abs(w.sum() - 1.0) > SUM_TOL:
        logger.debug("Renormalizing %s weights, sum drifted to %r", scheme.label, w.sum())
        w = w / w.sum()
    return w


def scheme_from_dict(obj: Dict) -> WeightScheme:
    """Build a scheme from its JSON form, e.g. {"type": "l1", "kn": 15}."""
    kind = str(obj.get("type", "")).lower()
    try:
        if kind == "l1":
            return TrimmedL1(kn=int(obj["kn"]))
        if kind == "l2":
            return RankWeightedL2(kn=int(obj["kn"]))
        if kind == "lk":
            return GeneralLk(kn=int(obj["kn"]), k=int(obj["k"]))
        if kind == "poisson":
            return Poisson(lam=float(obj["lambda"]))
        if kind == "scores":
            return CustomScores(scores=tuple(float(a) for a in obj["a"]))
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidScheme(f"bad {kind!r} scheme {obj!r}: {e}") from e
    raise InvalidScheme(f"unknown scheme type {obj.get('type')!r}")
