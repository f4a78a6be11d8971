#!/usr/bin/env python3
"""Run the four showcase attitude phases and print the class-mean table.

Phases: baseline (1, 1), feature-blind (0.01, 0.01), risk-prone reversal
(-2, -2), and the two single-attribute gates. Each run writes its full
CSV bundle under <outdir>/<label>/.
"""

import argparse
import dataclasses

from cryptoselect.config import SimConfig
from cryptoselect.distributions import constant_beta
from cryptoselect.model import AssetClass
from cryptoselect.runner import run

PHASES = [
    ("baseline_b1_b1", 1.0, 1.0),
    ("blind_b001_b001", 0.01, 0.01),
    ("reversal_bm2_bm2", -2.0, -2.0),
    ("gate_s_b2_b001", 2.0, 0.01),
    ("gate_xi_b001_b2", 0.01, 2.0),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--n-assets", type=int, default=300)
    ap.add_argument("--n-sweeps", type=int, default=400)
    ap.add_argument("--outdir", default="out/phases")
    args = ap.parse_args()

    base = SimConfig(n_assets=args.n_assets, n_sweeps=args.n_sweeps, seed=args.seed)
    header = "phase".ljust(20) + "".join(k.value.rjust(16) for k in AssetClass)
    print(header)
    print("-" * len(header))
    for label, b1, b2 in PHASES:
        cfg = dataclasses.replace(
            base, beta1=constant_beta(b1), beta2=constant_beta(b2))
        res = run(cfg, output_dir=f"{args.outdir}/{label}")
        means = res.class_mean_adoption()
        cells = "".join(f"{means[k]:16.3f}" for k in AssetClass)
        stop = f"t*={res.t_star}" if res.t_star else f"t={res.t_stop}"
        print(label.ljust(20) + cells + f"   ({stop})")
    print(f"\nbundles written under {args.outdir}/")


if __name__ == "__main__":
    main()
