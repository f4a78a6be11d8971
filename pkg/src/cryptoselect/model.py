"""Core market objects: assets, their classes, and investor profiles.

An asset carries two fixed features, security s and stability xi, both in
[0, 1], plus a dynamic pair (adoption a, expected return r). The feature
plane splits into four quadrants at 0.5, one per asset class. Adoption is
read as the success probability of a Bernoulli draw: the chance a randomly
polled market participant holds the asset.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .distributions import BetaPopulationSpec, FeatureDistribution

__all__ = [
    "AssetClass",
    "CryptoAsset",
    "InvestorProfile",
    "InitPolicy",
    "classify_asset",
    "bernoulli_adoption_pmf",
    "sample_assets",
    "sample_investors",
]


class AssetClass(enum.Enum):
    """Quadrants of the (security, stability) plane, split at 0.5."""

    CBDC = "cbdc"                      # high security, high stability
    STABLECOIN = "stablecoin"          # low security, high stability
    CRYPTOCURRENCY = "cryptocurrency"  # high security, low stability
    CRYPTO_TOKEN = "crypto_token"      # low security, low stability


def classify_asset(s: float, xi: float) -> AssetClass:
    """Map a feature pair to its class quadrant.

    Boundaries at 0.5 belong to the high side. Out-of-range features are
    rejected rather than clamped: they indicate a broken sampler upstream.
    """
    if not (math.isfinite(s) and math.isfinite(xi)):
        raise ValueError(f"non-finite features s={s}, xi={xi}")
    if not (0.0 <= s <= 1.0 and 0.0 <= xi <= 1.0):
        raise ValueError(f"features outside [0, 1]: s={s}, xi={xi}")
    if s >= 0.5:
        return AssetClass.CBDC if xi >= 0.5 else AssetClass.CRYPTOCURRENCY
    return AssetClass.STABLECOIN if xi >= 0.5 else AssetClass.CRYPTO_TOKEN


def bernoulli_adoption_pmf(k: int, a: float) -> float:
    """Probability that a random participant holds (k=1) or does not hold
    (k=0) an asset with adoption level a: a^k * (1-a)^(1-k)."""
    if k not in (0, 1):
        raise ValueError(f"k must be 0 or 1, got {k}")
    if not (0.0 <= a <= 1.0):
        raise ValueError(f"adoption outside [0, 1]: {a}")
    return a if k == 1 else 1.0 - a


@dataclass
class CryptoAsset:
    """One asset. s and xi never change after sampling; a and r evolve."""

    asset_id: int
    s: float
    xi: float
    a: float
    r: float
    klass: AssetClass

    def __post_init__(self) -> None:
        if not (0.0 <= self.a <= 1.0):
            raise ValueError(f"adoption outside [0, 1]: {self.a}")


@dataclass(frozen=True)
class InvestorProfile:
    """Behavioural coefficients weighting return, security and stability
    differences in the acceptance rule."""

    beta0: float = 1.0
    beta1: float = 1.0
    beta2: float = 1.0

    def __post_init__(self) -> None:
        for name in ("beta0", "beta1", "beta2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite {name}")


@dataclass(frozen=True)
class InitPolicy:
    """Initial conditions for the dynamic state.

    adoption: "uniform" draws a0 ~ U[0, 1]; "constant" pins a0 = adoption_value.
    returns:  "uniform" draws r0 ~ U[return_lo, return_hi]; "constant" pins
    r0 = return_value.
    """

    adoption: str = "uniform"
    adoption_value: float = 0.5
    returns: str = "uniform"
    return_lo: float = -1.0
    return_hi: float = 1.0
    return_value: float = 0.0

    def __post_init__(self) -> None:
        if self.adoption not in ("uniform", "constant"):
            raise ValueError(f"unknown adoption init {self.adoption!r}")
        if self.returns not in ("uniform", "constant"):
            raise ValueError(f"unknown returns init {self.returns!r}")
        if not (0.0 <= self.adoption_value <= 1.0):
            raise ValueError("constant adoption must lie in [0, 1]")
        if not self.return_lo <= self.return_hi:
            raise ValueError("return_lo must not exceed return_hi")

    def sample_adoption(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.adoption == "uniform":
            return rng.random(n)
        return np.full(n, self.adoption_value)

    def sample_returns(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.returns == "uniform":
            return rng.uniform(self.return_lo, self.return_hi, n)
        return np.full(n, self.return_value)

    def to_dict(self) -> dict:
        return {
            "adoption": self.adoption,
            "adoption_value": self.adoption_value,
            "returns": self.returns,
            "return_lo": self.return_lo,
            "return_hi": self.return_hi,
            "return_value": self.return_value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InitPolicy":
        return cls(**d)


def sample_assets(
    n: int,
    dist_s: FeatureDistribution,
    dist_xi: FeatureDistribution,
    init: InitPolicy,
    rng: np.random.Generator,
) -> list[CryptoAsset]:
    """Draw n assets: features from the two feature distributions, dynamic
    state from the init policy. Draw order (s, xi, a, r) is part of the
    reproducibility contract."""
    if n < 2:
        raise ValueError(f"need at least 2 assets, got {n}")
    s = dist_s.sample(rng, n)
    xi = dist_xi.sample(rng, n)
    a = init.sample_adoption(rng, n)
    r = init.sample_returns(rng, n)
    return [
        CryptoAsset(i, float(s[i]), float(xi[i]), float(a[i]), float(r[i]),
                    classify_asset(float(s[i]), float(xi[i])))
        for i in range(n)
    ]


def sample_investors(
    k: int,
    spec0: BetaPopulationSpec,
    spec1: BetaPopulationSpec,
    spec2: BetaPopulationSpec,
    rng: np.random.Generator,
) -> list[InvestorProfile]:
    """Draw the investor population, one profile per proposal slot."""
    if k < 1:
        raise ValueError(f"need at least 1 investor, got {k}")
    b0 = spec0.sample(rng, k)
    b1 = spec1.sample(rng, k)
    b2 = spec2.sample(rng, k)
    return [InvestorProfile(float(b0[i]), float(b1[i]), float(b2[i])) for i in range(k)]
