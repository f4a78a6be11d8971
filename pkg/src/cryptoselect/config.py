"""Run configuration: dataclasses, JSON round-trip, validation.

A config file is a single JSON document. Missing fields fall back to the
defaults below (all of them printed by ``cryptoselect print-config-defaults``);
unknown fields are rejected so typos cannot silently revert a knob to its
default.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .distributions import BetaPopulationSpec, FeatureDistribution, constant_beta
from .dynamics import PAIRING_POLICIES, StepParams
from .equilibrium import EquilibriumParams
from .model import InitPolicy

__all__ = ["ConfigError", "SimConfig", "SweepConfig", "load_config", "load_sweep_config"]


class ConfigError(Exception):
    """Invalid or unreadable configuration; the CLI maps this to exit 1."""


@dataclass(frozen=True)
class SimConfig:
    n_assets: int = 300
    delta: float = 0.1
    n_sweeps: int = 400
    seed: int = 1
    beta0: BetaPopulationSpec = field(default_factory=lambda: constant_beta(1.0))
    beta1: BetaPopulationSpec = field(default_factory=lambda: constant_beta(1.0))
    beta2: BetaPopulationSpec = field(default_factory=lambda: constant_beta(1.0))
    dist_s: FeatureDistribution = field(default_factory=FeatureDistribution)
    dist_xi: FeatureDistribution = field(default_factory=FeatureDistribution)
    init: InitPolicy = field(default_factory=InitPolicy)
    pairing: str = "perfect_matching"
    step: StepParams = field(default_factory=StepParams)
    equilibrium: EquilibriumParams = field(default_factory=EquilibriumParams)
    # run one contraction round after every sweep instead of only at the end
    interleave_contraction: bool = False
    # verify max sampled acceptance probability <= equilibrium.epsilon at t*
    epsilon_check: bool = False
    thinning: int = 10
    hist_bins: int = 20
    output_dir: str = "out"

    def __post_init__(self) -> None:
        if self.n_assets < 2:
            raise ConfigError(f"n_assets must be >= 2, got {self.n_assets}")
        if self.n_sweeps < 1:
            raise ConfigError(f"n_sweeps must be >= 1, got {self.n_sweeps}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.pairing not in PAIRING_POLICIES:
            raise ConfigError(f"unknown pairing policy {self.pairing!r}")
        if self.thinning < 1:
            raise ConfigError(f"thinning must be >= 1, got {self.thinning}")
        if self.hist_bins < 1:
            raise ConfigError(f"hist_bins must be >= 1, got {self.hist_bins}")
        if not (0.0 <= self.delta <= 1.0):
            raise ConfigError(f"delta must lie in [0, 1], got {self.delta}")

    def to_dict(self) -> dict:
        return {
            "n_assets": self.n_assets,
            "delta": self.delta,
            "n_sweeps": self.n_sweeps,
            "seed": self.seed,
            "beta0": self.beta0.to_dict(),
            "beta1": self.beta1.to_dict(),
            "beta2": self.beta2.to_dict(),
            "dist_s": self.dist_s.to_dict(),
            "dist_xi": self.dist_xi.to_dict(),
            "init": self.init.to_dict(),
            "pairing": self.pairing,
            "step": {
                "cost": self.step.cost,
                "xi_min": self.step.xi_min,
                "variance_convention": self.step.variance_convention,
                "delta_a_sign": self.step.delta_a_sign,
                "commit_mode": self.step.commit_mode,
            },
            "equilibrium": {
                "epsilon": self.equilibrium.epsilon,
                "window": self.equilibrium.window,
                "theta": self.equilibrium.theta,
                "direction": self.equilibrium.direction,
            },
            "interleave_contraction": self.interleave_contraction,
            "epsilon_check": self.epsilon_check,
            "thinning": self.thinning,
            "hist_bins": self.hist_bins,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "SimConfig":
        if not isinstance(raw, dict):
            raise ConfigError(f"config root must be an object, got {type(raw).__name__}")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        kwargs: dict = {}
        try:
            for key in ("beta0", "beta1", "beta2"):
                if key in raw:
                    kwargs[key] = BetaPopulationSpec.from_dict(raw[key])
            for key in ("dist_s", "dist_xi"):
                if key in raw:
                    kwargs[key] = FeatureDistribution.from_dict(raw[key])
            if "init" in raw:
                kwargs["init"] = InitPolicy.from_dict(raw["init"])
            if "step" in raw:
                step_raw = dict(raw["step"])
                if "delta" in step_raw:
                    raise ConfigError("delta belongs at the top level, not under step")
                kwargs["step"] = StepParams(delta=raw.get("delta", 0.1), **step_raw)
            if "equilibrium" in raw:
                kwargs["equilibrium"] = EquilibriumParams(**raw["equilibrium"])
            for key in known - {"beta0", "beta1", "beta2", "dist_s", "dist_xi",
                                "init", "step", "equilibrium"}:
                if key in raw:
                    kwargs[key] = raw[key]
            cfg = cls(**kwargs)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        # keep StepParams.delta in sync with the top-level delta
        if cfg.step.delta != cfg.delta:
            cfg = dataclasses.replace(cfg, step=dataclasses.replace(cfg.step, delta=cfg.delta))
        return cfg

    def step_params(self) -> StepParams:
        if self.step.delta == self.delta:
            return self.step
        return dataclasses.replace(self.step, delta=self.delta)


@dataclass(frozen=True)
class SweepConfig:
    """Grid over constant (beta1, beta2) cells on top of a base config."""

    base: SimConfig = field(default_factory=SimConfig)
    beta1_values: tuple[float, ...] = (-2.0, 0.01, 2.0)
    beta2_values: tuple[float, ...] = (-2.0, 0.01, 2.0)
    replicates: int = 1
    parallelism: int = 1

    def __post_init__(self) -> None:
        if not self.beta1_values or not self.beta2_values:
            raise ConfigError("sweep grids must be non-empty")
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if self.parallelism < 1:
            raise ConfigError(f"parallelism must be >= 1, got {self.parallelism}")

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "beta1_values": list(self.beta1_values),
            "beta2_values": list(self.beta2_values),
            "replicates": self.replicates,
            "parallelism": self.parallelism,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "SweepConfig":
        if not isinstance(raw, dict):
            raise ConfigError(f"sweep config root must be an object, got {type(raw).__name__}")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown sweep config fields: {sorted(unknown)}")
        try:
            return cls(
                base=SimConfig.from_dict(raw.get("base", {})),
                beta1_values=tuple(raw.get("beta1_values", (-2.0, 0.01, 2.0))),
                beta2_values=tuple(raw.get("beta2_values", (-2.0, 0.01, 2.0))),
                replicates=raw.get("replicates", 1),
                parallelism=raw.get("parallelism", 1),
            )
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def _read_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc


def load_config(path: str | Path) -> SimConfig:
    return SimConfig.from_dict(_read_json(path))


def load_sweep_config(path: str | Path) -> SweepConfig:
    return SweepConfig.from_dict(_read_json(path))
