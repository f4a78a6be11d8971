"""Equilibrium detection and the post-equilibrium contraction protocol.

The sweep dynamics are judged settled once no proposal has moved the state
for a whole patience window of consecutive sweeps. After that, each class
is pulled together in the (adoption, expected return) plane: every member
far enough from its class centroid steps halfway toward it, repeatedly,
until nothing is left outside the threshold. The expanding variant that
steps away from the centroid instead is kept behind the direction switch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .dynamics import MarketState, total_expected_return
from .model import AssetClass

__all__ = [
    "EquilibriumParams",
    "ClassCentroid",
    "FinalizeReport",
    "detect_equilibrium",
    "class_centroid",
    "contract_step",
    "finalize",
]

DIRECTIONS = ("toward_centroid", "away_from_centroid")


@dataclass(frozen=True)
class EquilibriumParams:
    """window: sweeps of zero accepted moves required to call equilibrium.
    theta: distance threshold below which a member no longer moves.
    epsilon: acceptance-probability cap for the optional extra equilibrium
    check; unused unless that check is switched on in the run config."""

    epsilon: float = 0.05
    window: int = 10
    theta: float = 0.05
    direction: str = "toward_centroid"

    def __post_init__(self) -> None:
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive: {self.epsilon}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1: {self.window}")
        if self.theta <= 0.0:
            raise ValueError(f"theta must be positive: {self.theta}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown contraction direction {self.direction!r}")


@dataclass(frozen=True)
class ClassCentroid:
    klass: AssetClass
    count: int
    a_mean: float
    r_mean: float

    @property
    def empty(self) -> bool:
        return self.count == 0


@dataclass
class FinalizeReport:
    """Diagnostics from the contraction fixed point. constraint maps each
    class to (lhs, rhs, satisfied) where lhs sums r*a over the contracted
    state and rhs over the equilibrium snapshot; violations are reported,
    never raised."""

    rounds: int
    converged: bool
    constraint: dict[AssetClass, tuple[float, float, bool]]


def detect_equilibrium(accept_history: Sequence[int], params: EquilibriumParams) -> Optional[int]:
    """First step t* (1-based) such that the window of sweeps ending at t*
    all accepted zero moves. None if no such window exists yet. Extending
    a history that already qualified can only keep the same t*."""
    w = params.window
    streak = 0
    for idx, accepted in enumerate(accept_history):
        if accepted < 0:
            raise ValueError(f"negative accepted count at step {idx + 1}")
        streak = streak + 1 if accepted == 0 else 0
        if streak >= w:
            return idx + 1
    return None


def class_centroid(state: MarketState, klass: AssetClass) -> ClassCentroid:
    members = [asset for asset in state.assets if asset.klass is klass]
    if not members:
        return ClassCentroid(klass, 0, math.nan, math.nan)
    n = len(members)
    return ClassCentroid(
        klass,
        n,
        sum(m.a for m in members) / n,
        sum(m.r for m in members) / n,
    )


def contract_step(state: MarketState, params: EquilibriumParams) -> tuple[MarketState, int]:
    """One contraction round, in place.

    Centroids are computed once at round start; every member at distance
    >= theta from its class centroid moves half the separation, toward the
    centroid by default or away from it under "away_from_centroid". Adoption
    is clamped to [0, 1] (only the expanding direction can actually hit the
    clamp). Returns the state and how many members moved.
    """
    centroids = {klass: class_centroid(state, klass) for klass in AssetClass}
    sign = 1.0 if params.direction == "toward_centroid" else -1.0
    moved = 0
    for asset in state.assets:
        c = centroids[asset.klass]
        if c.empty:
            continue
        da = c.a_mean - asset.a
        dr = c.r_mean - asset.r
        if math.hypot(da, dr) < params.theta:
            continue
        asset.a = min(max(asset.a + sign * da / 2.0, 0.0), 1.0)
        asset.r = asset.r + sign * dr / 2.0
        moved += 1
    state.r_tot = total_expected_return(state)
    return state, moved


def finalize(
    state: MarketState,
    state_star: MarketState,
    params: EquilibriumParams,
    max_rounds: int = 10_000,
) -> tuple[MarketState, FinalizeReport]:
    """Iterate contraction to its fixed point and report diagnostics.

    state_star is the untouched snapshot at the equilibrium step; the
    report compares each class's sum of r*a after contraction against that
    snapshot. Toward-centroid contraction halves every offending distance,
    so it reaches the fixed point within about log2(d_max / theta) rounds;
    the away-from-centroid variant need not terminate and is cut off at
    max_rounds with converged=False.
    """
    rounds = 0
    converged = False
    while rounds < max_rounds:
        _, moved = contract_step(state, params)
        rounds += 1
        if moved == 0:
            converged = True
            break

    constraint: dict[AssetClass, tuple[float, float, bool]] = {}
    for klass in AssetClass:
        lhs = sum(x.r * x.a for x in state.assets if x.klass is klass)
        rhs = sum(x.r * x.a for x in state_star.assets if x.klass is klass)
        constraint[klass] = (lhs, rhs, lhs >= rhs)
    return state, FinalizeReport(rounds, converged, constraint)
