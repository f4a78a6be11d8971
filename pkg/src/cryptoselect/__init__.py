"""Simulator of adoption dynamics and selection across crypto-asset classes."""

__version__ = "0.1.0"

from .config import ConfigError, SimConfig, SweepConfig, load_config, load_sweep_config
from .distributions import (BetaPopulationSpec, FeatureDistribution, constant_beta,
                            triangular, triangular2x, triangular_support, uniform01)
from .dynamics import (MarketState, PairProposal, StepParams, acceptance_probability,
                       draw_pairing, propose_adoption_update, sweep_step,
                       total_expected_return, update_returns)
from .equilibrium import (ClassCentroid, EquilibriumParams, FinalizeReport,
                          class_centroid, contract_step, detect_equilibrium, finalize)
from .metrics import (ClassHistogram, TrajectoryRecord, TrajectoryRecorder,
                      histogram_from_values, nonadoption_histogram)
from .model import (AssetClass, CryptoAsset, InitPolicy, InvestorProfile,
                    bernoulli_adoption_pmf, classify_asset, sample_assets,
                    sample_investors)
from .rescale import EcosystemSpec, MomentEstimate, RescaleResult, acceptance_moment, solve_beta_prime
from .runner import (ComparisonResult, SimulationResult, SweepResult,
                     compare_heterogeneous, derive_cell_seed, rescale_points, run,
                     simulate, sweep)
