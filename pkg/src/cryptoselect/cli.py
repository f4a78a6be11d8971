"""Command-line interface.

Subcommands: simulate, sweep, compare-hetero, rescale,
print-config-defaults. Flags override config-file fields; the
CRYPTOSELECT_OUTPUT_DIR environment variable overrides the configured
output directory (and nothing else), with an explicit --output-dir flag
beating both. Exit codes: 0 success, 1 configuration error, 2 runtime
error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .config import ConfigError, SimConfig, SweepConfig, _read_json
from .distributions import FeatureDistribution
from .rescale import EcosystemSpec
from .runner import compare_heterogeneous, rescale_points, run, sweep

ENV_OUTPUT_DIR = "CRYPTOSELECT_OUTPUT_DIR"


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; bad flags are config
    # errors here and must map to exit 1 instead
    def error(self, message: str):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="cryptoselect", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file (defaults apply if omitted)")
        p.add_argument("--output-dir", help="output directory (beats env and config)")
        p.add_argument("--set", action="append", default=[], metavar="PATH=JSON",
                       dest="overrides",
                       help="override a config field, e.g. --set delta=0.2 or "
                            "--set beta1.kind=constant --set beta1.params=[2.0]")
        p.add_argument("--seed", type=int, help="shorthand for --set seed=N")

    p_sim = sub.add_parser("simulate", help="one full run with CSV outputs")
    add_common(p_sim)

    p_sweep = sub.add_parser("sweep", help="(beta1, beta2) grid of runs")
    add_common(p_sweep)
    p_sweep.add_argument("--parallelism", type=int, help="worker processes")

    p_cmp = sub.add_parser("compare-hetero",
                           help="heterogeneous population vs matched representative")
    add_common(p_cmp)

    p_res = sub.add_parser("rescale", help="solve the attitude rescaling beta'")
    p_res.add_argument("--beta", type=float, action="append", default=[],
                       help="attitude strength in the source ecosystem (repeatable)")
    p_res.add_argument("--grid", nargs=3, type=float, metavar=("LO", "HI", "N"),
                       help="solve over N evenly spaced betas in [LO, HI]")
    p_res.add_argument("--from", dest="eco_from", default="uniform",
                       help="source feature distribution kind for both axes")
    p_res.add_argument("--to", dest="eco_to", default="uniform",
                       help="target feature distribution kind for both axes")
    p_res.add_argument("--method", choices=("mc", "quadrature"), default="mc")
    p_res.add_argument("--weighting", choices=("class_mass", "pair"),
                       default="class_mass")
    p_res.add_argument("--samples", type=int, default=1_000_000)
    p_res.add_argument("--nodes", type=int, default=64)
    p_res.add_argument("--tol", type=float, default=1e-3)
    p_res.add_argument("--seed", type=int, default=0)
    p_res.add_argument("--output-dir")

    p_def = sub.add_parser("print-config-defaults",
                           help="print the full default config as JSON")
    p_def.add_argument("--sweep", action="store_true", help="sweep config instead")
    return parser


def _apply_overrides(raw: dict, overrides: list[str]) -> dict:
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like path=value, got {item!r}")
        path, _, value = item.partition("=")
        keys = path.strip().split(".")
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value  # bare strings allowed, e.g. pairing=independent_pairs
        node = raw
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot override through non-object field {key!r}")
        node[keys[-1]] = parsed
    return raw


def _load_raw(path: Optional[str]) -> dict:
    return _read_json(path) if path else {}


def _resolve_output_dir(flag: Optional[str], configured: str) -> str:
    if flag:
        return flag
    env = os.environ.get(ENV_OUTPUT_DIR)
    if env:
        return env
    return configured


def _sim_config(args) -> SimConfig:
    raw = _load_raw(args.config)
    raw = _apply_overrides(raw, args.overrides)
    if args.seed is not None:
        raw["seed"] = args.seed
    return SimConfig.from_dict(raw)


def _feature_dist(kind: str) -> FeatureDistribution:
    try:
        return FeatureDistribution(kind=kind)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "simulate":
        config = _sim_config(args)
        outdir = _resolve_output_dir(args.output_dir, config.output_dir)
        result = run(config, output_dir=outdir)
        stopped = f"equilibrium at t*={result.t_star}" if result.t_star else "sweep budget exhausted"
        print(f"simulate: {result.t_stop} sweeps ({stopped}); outputs in {outdir}")
        return 0

    if args.command == "sweep":
        raw = _load_raw(args.config)
        if args.overrides:
            base = raw.setdefault("base", {})
            _apply_overrides(base, args.overrides)
        if args.seed is not None:
            raw.setdefault("base", {})["seed"] = args.seed
        if args.parallelism is not None:
            raw["parallelism"] = args.parallelism
        cfg = SweepConfig.from_dict(raw)
        outdir = _resolve_output_dir(args.output_dir, cfg.base.output_dir)
        result = sweep(cfg, output_dir=outdir)
        print(f"sweep: {len(result.cells)} runs over "
              f"{len(cfg.beta1_values)}x{len(cfg.beta2_values)} grid; outputs in {outdir}")
        return 0

    if args.command == "compare-hetero":
        config = _sim_config(args)
        outdir = _resolve_output_dir(args.output_dir, config.output_dir)
        cmp_result = compare_heterogeneous(config, output_dir=outdir)
        diff = cmp_result.adoption_difference()
        print(f"compare-hetero: realized means {cmp_result.realized_means}; outputs in {outdir}")
        for klass, d in diff.items():
            print(f"  {klass.value}: adoption difference (hetero - representative) = {d:+.4f}")
        return 0

    if args.command == "rescale":
        betas = list(args.beta)
        if args.grid:
            lo, hi, n = args.grid
            if int(n) < 1:
                raise ConfigError("grid point count must be >= 1")
            step = (hi - lo) / (int(n) - 1) if int(n) > 1 else 0.0
            betas.extend(lo + i * step for i in range(int(n)))
        if not betas:
            raise ConfigError("rescale needs --beta and/or --grid")
        eco_from = EcosystemSpec(_feature_dist(args.eco_from), _feature_dist(args.eco_from))
        eco_to = EcosystemSpec(_feature_dist(args.eco_to), _feature_dist(args.eco_to))
        outdir = _resolve_output_dir(args.output_dir, "out")
        results = rescale_points(
            betas, eco_from, eco_to, output_dir=outdir,
            tol=args.tol, method=args.method, weighting=args.weighting,
            n_samples=args.samples, n_nodes=args.nodes, seed=args.seed,
        )
        for res in results:
            print(f"beta={res.beta:g} -> beta'={res.beta_prime:.4f} "
                  f"(residual {res.residual:+.2e}, {res.method}/{res.weighting})")
        print(f"rescale: outputs in {outdir}")
        return 0

    if args.command == "print-config-defaults":
        cfg = SweepConfig() if args.sweep else SimConfig()
        print(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))
        return 0

    raise ConfigError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
