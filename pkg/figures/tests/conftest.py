"""Fixtures: real simulator output bundles, produced via its CLI only.

The simulator is exercised strictly through subprocess + CSV so these
tests stay honest about the package boundary (cryptofigs itself never
imports it).
"""

import json
import subprocess
import sys

import pytest

CRITERION_LINES: list[str] = []


@pytest.fixture(scope="session")
def criterion_log() -> list[str]:
    return CRITERION_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)


def _cli(*args: str) -> None:
    proc = subprocess.run(
        [sys.executable, "-m", "cryptoselect.cli", *args],
        capture_output=True, text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(
            f"simulator CLI failed ({proc.returncode}): {proc.stderr.strip()}")


TRI_SUPPORT = json.dumps({"kind": "triangular_support", "params": [-4, 4]})


@pytest.fixture(scope="session")
def outputs(tmp_path_factory):
    """Output bundles for the configurations the figures must cover:
    the baseline phase, the feature-blind phase, the rescaling curve,
    and the heterogeneous-vs-representative comparison, plus a small
    grid sweep for multi-panel rendering."""
    root = tmp_path_factory.mktemp("sim_outputs")

    _cli("simulate", "--seed", "1", "--output-dir", str(root / "baseline"))
    _cli("simulate", "--seed", "1", "--output-dir", str(root / "blind"),
         "--set", 'beta1={"kind": "constant", "params": [0.01]}',
         "--set", 'beta2={"kind": "constant", "params": [0.01]}')
    _cli("rescale", "--grid", "0.5", "2", "4",
         "--from", "triangular2x", "--to", "uniform",
         "--method", "quadrature", "--tol", "1e-4",
         "--output-dir", str(root / "rescale"))
    _cli("compare-hetero", "--seed", "1", "--output-dir", str(root / "cmp"),
         "--set", "n_assets=200", "--set", "n_sweeps=300",
         "--set", f"beta0={TRI_SUPPORT}",
         "--set", f"beta1={TRI_SUPPORT}",
         "--set", f"beta2={TRI_SUPPORT}")

    sweep_cfg = root / "sweep.json"
    sweep_cfg.write_text(json.dumps({
        "base": {"n_assets": 30, "n_sweeps": 10, "thinning": 1,
                 "hist_bins": 8, "seed": 1},
        "beta1_values": [-2.0, 2.0],
        "beta2_values": [-2.0, 0.01, 2.0],
        "replicates": 1,
    }))
    _cli("sweep", "--config", str(sweep_cfg), "--output-dir", str(root / "grid"))
    return root
