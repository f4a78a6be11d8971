"""Samplable distributions for asset features and investor attitudes.

Two families live here. ``FeatureDistribution`` describes how the static
asset features (security s, stability xi) are spread over [0, 1] and is
what the rescaling machinery integrates against, so every kind must expose
a density and a CDF in addition to a sampler. ``BetaPopulationSpec``
describes how the behavioural coefficients (beta0, beta1, beta2) vary over
the investor population; a constant spec recovers the homogeneous market.

Both are plain tagged records so they round-trip through the JSON config
format: ``kind`` plus numeric parameters, nothing else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FeatureDistribution",
    "BetaPopulationSpec",
    "uniform01",
    "triangular2x",
    "triangular",
    "constant_beta",
    "triangular_support",
]

_FEATURE_KINDS = ("uniform", "triangular2x", "triangular")
_BETA_KINDS = ("constant", "triangular_support")


@dataclass(frozen=True)
class FeatureDistribution:
    """A distribution on [0, 1] for one static asset feature.

    kind:
      - "uniform":       flat density on [0, 1]
      - "triangular2x":  density 2x on [0, 1] (mass piled toward 1)
      - "triangular":    general triangular with params (lo, mode, hi),
                         all inside [0, 1]
    """

    kind: str = "uniform"
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _FEATURE_KINDS:
            raise ValueError(f"unknown feature distribution kind {self.kind!r}")
        if self.kind == "triangular":
            if len(self.params) != 3:
                raise ValueError("triangular needs params (lo, mode, hi)")
            lo, mode, hi = self.params
            if not (0.0 <= lo <= mode <= hi <= 1.0 and lo < hi):
                raise ValueError(f"bad triangular params {self.params}")
        elif self.params:
            raise ValueError(f"{self.kind} takes no params")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "uniform":
            return rng.random(n)
        if self.kind == "triangular2x":
            # inverse CDF of f(x) = 2x is sqrt(u)
            return np.sqrt(rng.random(n))
        lo, mode, hi = self.params
        return rng.triangular(lo, mode, hi, size=n)

    def pdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "uniform":
            return np.where((x >= 0.0) & (x <= 1.0), 1.0, 0.0)
        if self.kind == "triangular2x":
            return np.where((x >= 0.0) & (x <= 1.0), 2.0 * x, 0.0)
        lo, mode, hi = self.params
        up = 2.0 * (x - lo) / ((hi - lo) * (mode - lo)) if mode > lo else np.zeros_like(x)
        down = 2.0 * (hi - x) / ((hi - lo) * (hi - mode)) if hi > mode else np.zeros_like(x)
        out = np.where(x < mode, up, down)
        return np.where((x >= lo) & (x <= hi), out, 0.0)

    def cdf(self, x: float) -> float:
        x = min(max(float(x), 0.0), 1.0)
        if self.kind == "uniform":
            return x
        if self.kind == "triangular2x":
            return x * x
        lo, mode, hi = self.params
        if x <= lo:
            return 0.0
        if x >= hi:
            return 1.0
        if x < mode:
            return (x - lo) ** 2 / ((hi - lo) * (mode - lo))
        return 1.0 - (hi - x) ** 2 / ((hi - lo) * (hi - mode))

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.params:
            d["params"] = list(self.params)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureDistribution":
        return cls(kind=d.get("kind", "uniform"), params=tuple(d.get("params", ())))


@dataclass(frozen=True)
class BetaPopulationSpec:
    """How one behavioural coefficient is distributed over investors.

    kind "constant" has params (value,). kind "triangular_support" has
    params (lo, hi) and density 2(x - lo)/(hi - lo)^2: an increasing
    right triangle on [lo, hi], sampled by lo + (hi - lo) * sqrt(u).
    """

    kind: str = "constant"
    params: tuple[float, ...] = (1.0,)

    def __post_init__(self) -> None:
        if self.kind not in _BETA_KINDS:
            raise ValueError(f"unknown beta spec kind {self.kind!r}")
        if self.kind == "constant":
            if len(self.params) != 1:
                raise ValueError("constant needs params (value,)")
        else:
            if len(self.params) != 2 or not self.params[0] < self.params[1]:
                raise ValueError("triangular_support needs params (lo, hi) with lo < hi")
        if not all(math.isfinite(p) for p in self.params):
            raise ValueError(f"non-finite beta spec params {self.params}")

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "constant":
            return np.full(n, self.params[0])
        lo, hi = self.params
        return lo + (hi - lo) * np.sqrt(rng.random(n))

    def mean(self) -> float:
        """Analytic population mean."""
        if self.kind == "constant":
            return self.params[0]
        lo, hi = self.params
        return lo + 2.0 / 3.0 * (hi - lo)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": list(self.params)}

    @classmethod
    def from_dict(cls, d: dict) -> "BetaPopulationSpec":
        if "kind" not in d:
            raise ValueError("beta spec needs a 'kind' field")
        return cls(kind=d["kind"], params=tuple(d.get("params", ())))


def uniform01() -> FeatureDistribution:
    return FeatureDistribution("uniform")


def triangular2x() -> FeatureDistribution:
    return FeatureDistribution("triangular2x")


def triangular(lo: float, mode: float, hi: float) -> FeatureDistribution:
    return FeatureDistribution("triangular", (lo, mode, hi))


def constant_beta(value: float) -> BetaPopulationSpec:
    return BetaPopulationSpec("constant", (value,))


def triangular_support(lo: float, hi: float) -> BetaPopulationSpec:
    return BetaPopulationSpec("triangular_support", (lo, hi))
