"""Run orchestration: single runs, grid sweeps, population comparisons,
rescaling curves, and all file output.

Seeding contract: a run's seed feeds a SeedSequence that spawns three
independent child streams (asset sampling, investor sampling, dynamics),
so two runs with the same seed share their asset draw even when their
investor populations differ. Sweep cell seeds are a pure function of
(master seed, cell indices, replicate index) via the spawn-key mechanism,
which makes parallel and serial execution byte-identical.
"""

from __future__ import annotations

import copy
import csv
import dataclasses
import json
import math
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .config import ConfigError, SimConfig, SweepConfig
from .distributions import constant_beta
from .dynamics import (MarketState, acceptance_probability,
                       propose_adoption_update, sweep_step)
from .equilibrium import FinalizeReport, contract_step, detect_equilibrium, finalize
from .metrics import (ClassHistogram, TrajectoryRecorder, histogram_from_values,
                      nonadoption_histogram)
from .model import AssetClass, InvestorProfile, sample_assets, sample_investors
from .rescale import EcosystemSpec, RescaleResult, solve_beta_prime

__all__ = [
    "SimulationResult",
    "SweepCell",
    "SweepResult",
    "ComparisonResult",
    "simulate",
    "run",
    "sweep",
    "compare_heterogeneous",
    "rescale_points",
    "derive_cell_seed",
    "TRAJECTORY_COLUMNS",
    "SUMMARY_COLUMNS",
    "HISTOGRAM_COLUMNS",
    "RESCALE_COLUMNS",
]

CLASS_ORDER = list(AssetClass)

TRAJECTORY_COLUMNS = ["t", "asset_id", "class", "s", "xi", "a", "r"]
SUMMARY_COLUMNS = ["t", "r_tot", "accepted_moves"] + [
    f"{stat}_{klass.value}" for klass in CLASS_ORDER for stat in ("a_mean", "r_mean")
]
HISTOGRAM_COLUMNS = ["beta1", "beta2", "class", "bin_lo", "bin_hi", "freq",
                     "mean_nonadoption", "var_nonadoption"]
RESCALE_COLUMNS = ["beta", "beta_prime", "residual", "method", "samples"]


# ---------------------------------------------------------------------------
# single run

@dataclass
class SimulationResult:
    config: SimConfig
    final_state: MarketState
    t_stop: int
    t_star: Optional[int]
    recorder: TrajectoryRecorder
    histograms: dict[AssetClass, ClassHistogram]
    finalize_report: FinalizeReport
    investors: list[InvestorProfile]
    epsilon_check: Optional[dict] = None

    @property
    def initial_r_tot(self) -> float:
        return self.recorder.records[0].r_tot

    @property
    def final_sweep_r_tot(self) -> float:
        """R_tot at the last executed sweep, before contraction."""
        return self.recorder.records[-1].r_tot

    def realized_beta_means(self) -> dict[str, float]:
        n = len(self.investors)
        return {
            "beta0": sum(p.beta0 for p in self.investors) / n,
            "beta1": sum(p.beta1 for p in self.investors) / n,
            "beta2": sum(p.beta2 for p in self.investors) / n,
        }

    def class_mean_adoption(self) -> dict[AssetClass, float]:
        out = {}
        for klass in CLASS_ORDER:
            members = [x.a for x in self.final_state.assets if x.klass is klass]
            out[klass] = sum(members) / len(members) if members else math.nan
        return out


def simulate(config: SimConfig) -> SimulationResult:
    """Execute one full run in memory: sweeps until the equilibrium window
    fires or n_sweeps is exhausted, then the contraction fixed point."""
    ss = np.random.SeedSequence(config.seed)
    rng_assets, rng_investors, rng_dynamics = (np.random.default_rng(c) for c in ss.spawn(3))

    assets = sample_assets(config.n_assets, config.dist_s, config.dist_xi,
                           config.init, rng_assets)
    k = max(config.n_assets // 2, 1)
    investors = sample_investors(k, config.beta0, config.beta1, config.beta2,
                                 rng_investors)

    params = config.step_params()
    state = MarketState(assets)
    recorder = TrajectoryRecorder(thinning=config.thinning)
    recorder.record(state)

    history: list[int] = []
    t_star: Optional[int] = None
    for _ in range(config.n_sweeps):
        sweep_step(state, investors, params, config.pairing, rng_dynamics)
        if config.interleave_contraction:
            contract_step(state, config.equilibrium)
        recorder.record(state)
        history.append(state.accepted_moves)
        t_star = detect_equilibrium(history, config.equilibrium)
        if t_star is not None:
            break

    eps_info = None
    if config.epsilon_check and t_star is not None:
        eps_info = _epsilon_check(state, investors, params, config, rng_dynamics)

    state_star = copy.deepcopy(state)
    final_state, report = finalize(state, state_star, config.equilibrium)
    histograms = nonadoption_histogram(final_state, config.hist_bins)
    return SimulationResult(
        config=config,
        final_state=final_state,
        t_stop=state.t,
        t_star=t_star,
        recorder=recorder,
        histograms=histograms,
        finalize_report=report,
        investors=investors,
        epsilon_check=eps_info,
    )


def _epsilon_check(state, investors, params, config, rng, n_pairs: int = 256) -> dict:
    """Diagnostic: max acceptance probability over sampled pairs at the
    detected equilibrium, compared against the epsilon cap."""
    n = state.n
    max_p = 0.0
    for m in range(n_pairs):
        i = int(rng.integers(n))
        j = int(rng.integers(n - 1))
        if j >= i:
            j += 1
        lo, wi = state.assets[i], state.assets[j]
        a_i_new, a_j_new = propose_adoption_update(lo.a, wi.a, params.delta)
        d_r = (lo.a - a_i_new) * lo.r + (wi.a - a_j_new) * wi.r
        p = acceptance_probability(d_r, lo.s - wi.s, lo.xi - wi.xi,
                                   investors[m % len(investors)], params.cost)
        max_p = max(max_p, p)
    eps = config.equilibrium.epsilon
    return {"max_probability": max_p, "epsilon": eps, "satisfied": max_p <= eps}


def run(config: SimConfig, output_dir: Optional[str | Path] = None) -> SimulationResult:
    """simulate() plus the full output bundle: trajectory, summary,
    final-state and histogram CSVs and a JSON manifest."""
    result = simulate(config)
    outdir = Path(output_dir) if output_dir is not None else Path(config.output_dir)
    writer = _OutputWriter(outdir)
    writer.transaction(lambda: _write_run_outputs(result, outdir, writer))
    return result


def _write_run_outputs(result: SimulationResult, outdir: Path, w: "_OutputWriter") -> None:
    b1, b2 = _histogram_beta_stamp(result)
    w.csv(outdir / "trajectory.csv", TRAJECTORY_COLUMNS, _trajectory_rows(result.recorder))
    w.csv(outdir / "summary.csv", SUMMARY_COLUMNS, _summary_rows(result.recorder))
    w.csv(outdir / "final_state.csv", TRAJECTORY_COLUMNS, _state_rows(result.final_state))
    w.csv(outdir / "histogram.csv", HISTOGRAM_COLUMNS,
          _histogram_rows(result.histograms, b1, b2))
    w.json(outdir / "manifest.json", _run_manifest(result))


def _histogram_beta_stamp(result: SimulationResult) -> tuple[float, float]:
    # constant specs stamp their value; populations stamp the realized mean
    means = result.realized_beta_means()
    cfg = result.config
    b1 = cfg.beta1.params[0] if cfg.beta1.is_constant else means["beta1"]
    b2 = cfg.beta2.params[0] if cfg.beta2.is_constant else means["beta2"]
    return b1, b2


# ---------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class SweepCell:
    i1: int
    i2: int
    beta1: float
    beta2: float
    replicate: int
    seed: int


@dataclass
class SweepResult:
    config: SweepConfig
    cells: list[tuple[SweepCell, SimulationResult]]
    pooled: dict[tuple[float, float], dict[AssetClass, ClassHistogram]]


def derive_cell_seed(master_seed: int, i1: int, i2: int, replicate: int) -> int:
    """Pure function of master seed and cell coordinates."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(i1, i2, replicate))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _cell_config(cfg: SweepConfig, cell: SweepCell) -> SimConfig:
    return dataclasses.replace(
        cfg.base,
        beta1=constant_beta(cell.beta1),
        beta2=constant_beta(cell.beta2),
        seed=cell.seed,
    )


def sweep(cfg: SweepConfig, output_dir: Optional[str | Path] = None) -> SweepResult:
    """Run the (beta1, beta2) grid, replicated and optionally in parallel.

    Cell outputs land under cells/<b1>_<b2>/rep<k>/; the combined
    histograms.csv pools the final states of all replicates per cell.
    Results are identical for any parallelism degree because each cell is
    fully determined by its derived seed.
    """
    cells = [
        SweepCell(i1, i2, v1, v2, rep,
                  derive_cell_seed(cfg.base.seed, i1, i2, rep))
        for i1, v1 in enumerate(cfg.beta1_values)
        for i2, v2 in enumerate(cfg.beta2_values)
        for rep in range(cfg.replicates)
    ]
    configs = [_cell_config(cfg, cell) for cell in cells]
    if cfg.parallelism > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
            results = list(pool.map(simulate, configs))
    else:
        results = [simulate(c) for c in configs]

    pooled: dict[tuple[float, float], dict[AssetClass, ClassHistogram]] = {}
    for v1 in cfg.beta1_values:
        for v2 in cfg.beta2_values:
            samples: dict[AssetClass, list[float]] = {klass: [] for klass in CLASS_ORDER}
            for cell, res in zip(cells, results):
                if (cell.beta1, cell.beta2) != (v1, v2):
                    continue
                for asset in res.final_state.assets:
                    samples[asset.klass].append(1.0 - asset.a)
            pooled[(v1, v2)] = histogram_from_values(
                {k: np.array(v) for k, v in samples.items()}, cfg.base.hist_bins)

    sweep_result = SweepResult(cfg, list(zip(cells, results)), pooled)
    outdir = Path(output_dir) if output_dir is not None else Path(cfg.base.output_dir)
    writer = _OutputWriter(outdir)
    writer.transaction(lambda: _write_sweep_outputs(sweep_result, outdir, writer))
    return sweep_result


def _write_sweep_outputs(sw: SweepResult, outdir: Path, w: "_OutputWriter") -> None:
    rows = []
    for (v1, v2), hists in sw.pooled.items():
        rows.extend(_histogram_rows(hists, v1, v2))
    w.csv(outdir / "histograms.csv", HISTOGRAM_COLUMNS, rows)
    for cell, res in sw.cells:
        cell_dir = (outdir / "cells" / f"b1_{cell.beta1:g}__b2_{cell.beta2:g}"
                    / f"rep{cell.replicate}")
        _write_run_outputs(res, cell_dir, w)
    w.json(outdir / "sweep_manifest.json", {
        "sweep_config": sw.config.to_dict(),
        "cells": [dataclasses.asdict(cell) for cell, _ in sw.cells],
        "versions": _versions(),
    })


# ---------------------------------------------------------------------------
# heterogeneous vs representative comparison

@dataclass
class ComparisonResult:
    hetero: SimulationResult
    representative: SimulationResult
    realized_means: dict[str, float]

    def adoption_difference(self) -> dict[AssetClass, float]:
        """Per class: mean adoption, heterogeneous minus representative."""
        het = self.hetero.class_mean_adoption()
        rep = self.representative.class_mean_adoption()
        return {klass: het[klass] - rep[klass] for klass in CLASS_ORDER}


def compare_heterogeneous(config: SimConfig,
                          output_dir: Optional[str | Path] = None,
                          write: bool = True) -> ComparisonResult:
    """Run a heterogeneous population and its matched representative agent.

    The representative run reuses the same seed (hence the same asset draw)
    with every beta spec replaced by the heterogeneous run's realized
    sample mean.
    """
    if config.beta0.is_constant and config.beta1.is_constant and config.beta2.is_constant:
        raise ConfigError(
            "compare-hetero needs at least one non-constant beta spec; "
            "all three are constant, so there is nothing to compare "
            "(use the simulate command instead)"
        )
    hetero = simulate(config)
    means = hetero.realized_beta_means()
    rep_config = dataclasses.replace(
        config,
        beta0=constant_beta(means["beta0"]),
        beta1=constant_beta(means["beta1"]),
        beta2=constant_beta(means["beta2"]),
    )
    representative = simulate(rep_config)
    comparison = ComparisonResult(hetero, representative, means)

    if write:
        outdir = Path(output_dir) if output_dir is not None else Path(config.output_dir)
        writer = _OutputWriter(outdir)
        writer.transaction(lambda: _write_comparison_outputs(comparison, outdir, writer))
    return comparison


def _write_comparison_outputs(cmp: ComparisonResult, outdir: Path, w: "_OutputWriter") -> None:
    _write_run_outputs(cmp.hetero, outdir / "hetero", w)
    _write_run_outputs(cmp.representative, outdir / "representative", w)
    het = cmp.hetero.class_mean_adoption()
    rep = cmp.representative.class_mean_adoption()
    w.json(outdir / "comparison.json", {
        "realized_means": cmp.realized_means,
        "class_mean_adoption": {
            "hetero": {k.value: het[k] for k in CLASS_ORDER},
            "representative": {k.value: rep[k] for k in CLASS_ORDER},
            "hetero_minus_representative": {
                k.value: het[k] - rep[k] for k in CLASS_ORDER
            },
        },
        "versions": _versions(),
    })


# ---------------------------------------------------------------------------
# rescaling

def rescale_points(
    betas: list[float],
    eco_from: EcosystemSpec,
    eco_to: EcosystemSpec,
    output_dir: Optional[str | Path] = None,
    **solve_kwargs,
) -> list[RescaleResult]:
    """Solve beta' for each requested beta and optionally write the curve
    dataset (rescale.csv + manifest)."""
    results = [solve_beta_prime(b, eco_from, eco_to, **solve_kwargs) for b in betas]
    if output_dir is not None:
        outdir = Path(output_dir)
        writer = _OutputWriter(outdir)
        writer.transaction(
            lambda: _write_rescale_outputs(results, eco_from, eco_to, outdir, writer))
    return results


def _write_rescale_outputs(results: list[RescaleResult], eco_from: EcosystemSpec,
                           eco_to: EcosystemSpec, outdir: Path, w: "_OutputWriter") -> None:
    rows = [
        [res.beta, res.beta_prime, res.residual, res.method, res.diagnostics["n"]]
        for res in results
    ]
    w.csv(outdir / "rescale.csv", RESCALE_COLUMNS, rows)
    w.json(outdir / "rescale_manifest.json", {
        "eco_from": {"dist_s": eco_from.dist_s.to_dict(), "dist_xi": eco_from.dist_xi.to_dict()},
        "eco_to": {"dist_s": eco_to.dist_s.to_dict(), "dist_xi": eco_to.dist_xi.to_dict()},
        "results": [
            {
                "beta": r.beta,
                "beta_prime": r.beta_prime,
                "matched_moment": r.matched_moment,
                "residual": r.residual,
                "method": r.method,
                "weighting": r.weighting,
                "diagnostics": {k: v for k, v in r.diagnostics.items() if k != "bracket"},
            }
            for r in results
        ],
        "versions": _versions(),
    })


# ---------------------------------------------------------------------------
# file output plumbing

class _OutputWriter:
    """Tracks every file a command creates so a failing write can undo the
    partial bundle without touching anything it did not create."""

    def __init__(self, outdir: Path):
        self.outdir = outdir
        self.created: list[Path] = []

    def transaction(self, write_all) -> None:
        self.outdir.mkdir(parents=True, exist_ok=True)
        try:
            write_all()
        except OSError as exc:
            for p in reversed(self.created):
                try:
                    p.unlink()
                except OSError:
                    pass
            raise RuntimeError(
                f"failed writing outputs under {self.outdir}: {exc}") from exc

    def csv(self, path: Path, columns: list[str], rows: list[list]) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        self.created.append(path)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])

    def json(self, path: Path, payload: dict) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        self.created.append(path)
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, AssetClass):
        return value.value
    return str(value)


def _trajectory_rows(recorder: TrajectoryRecorder) -> list[list]:
    rows = []
    for rec in recorder.records:
        if rec.assets is None:
            continue
        for snap in rec.assets:
            rows.append([rec.t, snap.asset_id, snap.klass, snap.s, snap.xi, snap.a, snap.r])
    return rows


def _summary_rows(recorder: TrajectoryRecorder) -> list[list]:
    rows = []
    for rec in recorder.records:
        row = [rec.t, rec.r_tot, rec.accepted_moves]
        for klass in CLASS_ORDER:
            c = rec.centroids[klass]
            row.extend([c.a_mean, c.r_mean])
        rows.append(row)
    return rows


def _state_rows(state: MarketState) -> list[list]:
    return [
        [state.t, x.asset_id, x.klass, x.s, x.xi, x.a, x.r]
        for x in state.assets
    ]


def _histogram_rows(histograms: dict[AssetClass, ClassHistogram],
                    beta1: float, beta2: float) -> list[list]:
    rows = []
    for klass in CLASS_ORDER:
        hist = histograms[klass]
        for b in range(len(hist.freq)):
            rows.append([
                beta1, beta2, klass,
                float(hist.bin_edges[b]), float(hist.bin_edges[b + 1]),
                float(hist.freq[b]), hist.mean, hist.var,
            ])
    return rows


def _versions() -> dict:
    return {
        "cryptoselect": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }


def _run_manifest(result: SimulationResult) -> dict:
    report = result.finalize_report
    return {
        "config": result.config.to_dict(),
        "seed": result.config.seed,
        "t_stop": result.t_stop,
        "t_star": result.t_star,
        "finalize": {
            "rounds": report.rounds,
            "converged": report.converged,
            "constraint": {
                klass.value: {"lhs": lhs, "rhs": rhs, "satisfied": ok}
                for klass, (lhs, rhs, ok) in report.constraint.items()
            },
        },
        "realized_beta_means": result.realized_beta_means(),
        "epsilon_check": result.epsilon_check,
        "versions": _versions(),
    }
