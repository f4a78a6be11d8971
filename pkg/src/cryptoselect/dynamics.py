"""One market step: pair proposals, acceptance, commits, return updates.

A step ("sweep") runs K = N // 2 proposals. Each proposal names a loser i
whose adoption is cut by delta and a winner j whose adoption grows by
delta, both clamped to [0, 1]. The handling investor accepts with a
probability that falls as the move loses total return, security, or
stability; accepted moves commit immediately, so later proposals in the
same sweep see the partially updated market (snapshot evaluation is
available as a switch). After the K decisions every asset's expected
return takes one update: the literal adoption feedback a(t-1) - a(t) plus
stability-scaled Gaussian noise.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .model import CryptoAsset, InvestorProfile

__all__ = [
    "StepParams",
    "PairProposal",
    "MarketState",
    "total_expected_return",
    "propose_adoption_update",
    "acceptance_probability",
    "draw_pairing",
    "update_returns",
    "sweep_step",
]

log = logging.getLogger(__name__)

PAIRING_POLICIES = ("perfect_matching", "independent_pairs")
COMMIT_MODES = ("sequential", "snapshot")
VARIANCE_CONVENTIONS = ("variance", "std")


@dataclass(frozen=True)
class StepParams:
    """Knobs of a single sweep.

    delta_a_sign = +1 applies the literal return feedback
    r += a(t-1) - a(t), under which gaining adoption lowers the expected
    return; -1 flips it. sigma = 1 / max(xi, xi_min) is read as the noise
    variance by default ("variance"), or as its standard deviation under
    "std".
    """

    delta: float = 0.1
    cost: float = 0.0
    xi_min: float = 0.05
    variance_convention: str = "variance"
    delta_a_sign: int = 1
    commit_mode: str = "sequential"

    def __post_init__(self) -> None:
        if not (0.0 <= self.delta <= 1.0):
            raise ValueError(f"delta outside [0, 1]: {self.delta}")
        if self.cost < 0.0:
            raise ValueError(f"negative transaction cost: {self.cost}")
        if self.xi_min <= 0.0:
            raise ValueError(f"xi_min must be positive: {self.xi_min}")
        if self.variance_convention not in VARIANCE_CONVENTIONS:
            raise ValueError(f"unknown variance convention {self.variance_convention!r}")
        if self.delta_a_sign not in (1, -1):
            raise ValueError(f"delta_a_sign must be +1 or -1: {self.delta_a_sign}")
        if self.commit_mode not in COMMIT_MODES:
            raise ValueError(f"unknown commit mode {self.commit_mode!r}")


@dataclass(frozen=True)
class PairProposal:
    """Ordered pair: loser sheds adoption, winner gains it. investor is the
    proposal's slot index; the caller maps it into the investor list
    round-robin."""

    loser: int
    winner: int
    investor: int


@dataclass
class MarketState:
    """Full dynamic state of the market at step t.

    r_tot caches sum(a_i * r_i); it is refreshed at the end of every sweep
    and must always match a fresh summation. accepted_moves holds the
    number of state-changing commits in the most recent sweep (an accepted
    proposal that moves nothing, e.g. under delta = 0 or full clamping,
    does not count: equilibrium detection keys on actual state change).
    """

    assets: list[CryptoAsset]
    t: int = 0
    r_tot: float = field(default=math.nan)
    accepted_moves: int = 0

    def __post_init__(self) -> None:
        if math.isnan(self.r_tot):
            self.r_tot = total_expected_return(self)

    @property
    def n(self) -> int:
        return len(self.assets)


def total_expected_return(state: MarketState) -> float:
    """R_tot = sum over assets of a_i * r_i."""
    return float(sum(asset.a * asset.r for asset in state.assets))


def propose_adoption_update(a_i: float, a_j: float, delta: float) -> tuple[float, float]:
    """Candidate adoption pair: loser falls by delta floored at 0, winner
    rises by delta capped at 1. The sum a_i + a_j is conserved whenever
    neither clamp binds."""
    if not (0.0 <= a_i <= 1.0 and 0.0 <= a_j <= 1.0):
        raise ValueError(f"adoptions outside [0, 1]: {a_i}, {a_j}")
    if not (0.0 <= delta <= 1.0):
        raise ValueError(f"delta outside [0, 1]: {delta}")
    return max(a_i - delta, 0.0), min(a_j + delta, 1.0)


def acceptance_probability(
    d_r_tot: float,
    d_s: float,
    d_xi: float,
    profile: InvestorProfile,
    cost: float = 0.0,
) -> float:
    """Probability of committing a proposed switch.

    1 / [(1 + e^{b0 (dR + c)}) (1 + e^{b1 ds}) (1 + e^{b2 dxi})]

    where dR = R_tot(before) - R_tot(after) and ds, dxi difference the
    loser's features against the winner's. Negative arguments (the move
    gains return / hands adoption to the more secure, more stable asset)
    push each factor above 1/2. A positive cost acts as friction: with
    b0 > 0 it can only lower the probability.
    """
    for name, v in (("d_r_tot", d_r_tot), ("d_s", d_s), ("d_xi", d_xi), ("cost", cost)):
        if not math.isfinite(v):
            raise ValueError(f"non-finite {name}: {v}")
    return (
        _gate(profile.beta0 * (d_r_tot + cost))
        * _gate(profile.beta1 * d_s)
        * _gate(profile.beta2 * d_xi)
    )


def _gate(x: float) -> float:
    # 1 / (1 + e^x), branch chosen so exp never overflows
    if x <= 0.0:
        return 1.0 / (1.0 + math.exp(x))
    e = math.exp(-x)
    return e / (1.0 + e)


def draw_pairing(n_assets: int, policy: str, rng: np.random.Generator) -> list[PairProposal]:
    """Draw the sweep's K = n // 2 proposals.

    perfect_matching: a uniformly random perfect matching; with odd n one
    asset sits the sweep out (logged at debug level, not an error).
    independent_pairs: K independent ordered pairs without self-pairing;
    an asset may appear in several proposals.

    Winner/loser orientation is uniform under both policies.
    """
    if n_assets < 2:
        raise ValueError(f"need at least 2 assets to pair, got {n_assets}")
    if policy not in PAIRING_POLICIES:
        raise ValueError(f"unknown pairing policy {policy!r}")
    k = n_assets // 2
    if policy == "perfect_matching":
        perm = rng.permutation(n_assets)
        if n_assets % 2 == 1:
            log.debug("odd asset count %d: asset %d sits this sweep out",
                      n_assets, perm[-1])
        return [PairProposal(int(perm[2 * m]), int(perm[2 * m + 1]), m) for m in range(k)]
    proposals = []
    for m in range(k):
        i = int(rng.integers(n_assets))
        j = int(rng.integers(n_assets - 1))
        if j >= i:
            j += 1
        proposals.append(PairProposal(i, j, m))
    return proposals


def update_returns(
    state: MarketState,
    a_prev: np.ndarray,
    params: StepParams,
    rng: np.random.Generator,
    noise: bool = True,
) -> np.ndarray:
    """Apply the once-per-sweep return update to every asset.

    r_i <- r_i + sign * (a_prev_i - a_i) + eta_i,  eta_i ~ N(0, sigma_i)

    with sigma_i = 1 / max(xi_i, xi_min) interpreted per the variance
    convention. ``noise=False`` freezes eta at 0 (test hook). Returns the
    new return vector and refreshes the r_tot cache.
    """
    assets = state.assets
    if len(a_prev) != len(assets):
        raise ValueError("a_prev length does not match asset count")
    a_now = np.array([asset.a for asset in assets])
    r_old = np.array([asset.r for asset in assets])
    sigma = 1.0 / np.maximum(np.array([asset.xi for asset in assets]), params.xi_min)
    scale = np.sqrt(sigma) if params.variance_convention == "variance" else sigma
    eta = rng.normal(0.0, scale) if noise else np.zeros(len(assets))
    r_new = r_old + params.delta_a_sign * (a_prev - a_now) + eta
    for asset, r in zip(assets, r_new):
        asset.r = float(r)
    state.r_tot = total_expected_return(state)
    return r_new


def sweep_step(
    state: MarketState,
    investors: list[InvestorProfile],
    params: StepParams,
    policy: str,
    rng: np.random.Generator,
) -> MarketState:
    """Advance the market by one step, in place.

    Proposal m is handled by investors[m % len(investors)]. Each accepted
    proposal commits before the next is evaluated ("sequential"), so dR is
    measured against the live, partially updated market; under "snapshot"
    every proposal is judged against the sweep-start state instead and the
    accepted updates land afterwards. A commit that changes nothing does
    not count toward accepted_moves.
    """
    if not investors:
        raise ValueError("need at least one investor")
    assets = state.assets
    a_prev = np.array([asset.a for asset in assets])
    proposals = draw_pairing(len(assets), policy, rng)
    snapshot = params.commit_mode == "snapshot"
    delta, cost = params.delta, params.cost

    accepted = 0
    pending: list[tuple[int, int, float, float]] = []
    for prop in proposals:
        inv = investors[prop.investor % len(investors)]
        i, j = prop.loser, prop.winner
        lo, wi = assets[i], assets[j]
        a_i = float(a_prev[i]) if snapshot else lo.a
        a_j = float(a_prev[j]) if snapshot else wi.a
        a_i_new, a_j_new = propose_adoption_update(a_i, a_j, delta)
        # R_tot(before) - R_tot(after) if this proposal alone committed
        d_r_tot = (a_i - a_i_new) * lo.r + (a_j - a_j_new) * wi.r
        p = acceptance_probability(d_r_tot, lo.s - wi.s, lo.xi - wi.xi, inv, cost)
        if p > rng.random():
            if a_i_new == a_i and a_j_new == a_j:
                continue  # accepted but a no-op; not a move
            if snapshot:
                pending.append((i, j, a_i_new, a_j_new))
            else:
                lo.a = a_i_new
                wi.a = a_j_new
            accepted += 1
    for i, j, a_i_new, a_j_new in pending:
        assets[i].a = a_i_new
        assets[j].a = a_j_new

    update_returns(state, a_prev, params, rng)
    state.t += 1
    state.accepted_moves = accepted
    return state
