"""Observables: trajectory records and per-class non-adoption histograms.

Summary quantities (total return, accepted moves, class centroids) are
cheap and recorded every step; full per-asset snapshots only every
``thinning`` steps. The headline distributional observable is 1 - a, the
probability that a random participant does NOT hold the asset, binned per
class on [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import MarketState
from .equilibrium import ClassCentroid, class_centroid
from .model import AssetClass

__all__ = [
    "AssetSnapshot",
    "TrajectoryRecord",
    "TrajectoryRecorder",
    "ClassHistogram",
    "nonadoption_histogram",
    "histogram_from_values",
]


@dataclass(frozen=True)
class AssetSnapshot:
    asset_id: int
    klass: AssetClass
    s: float
    xi: float
    a: float
    r: float


@dataclass(frozen=True)
class TrajectoryRecord:
    t: int
    r_tot: float
    accepted_moves: int
    centroids: dict[AssetClass, ClassCentroid]
    assets: Optional[list[AssetSnapshot]] = None  # present only on thinned steps


@dataclass
class TrajectoryRecorder:
    """Accumulates records over a run; records at t = 0, 1, ... in order.

    Disjoint accumulators (e.g. per-shard) merge into the records a single
    sequential pass would have produced, keyed by t.
    """

    thinning: int = 10
    records: list[TrajectoryRecord] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.thinning < 1:
            raise ValueError(f"thinning must be >= 1: {self.thinning}")

    def record(self, state: MarketState) -> TrajectoryRecord:
        snap = None
        if state.t % self.thinning == 0:
            snap = [
                AssetSnapshot(x.asset_id, x.klass, x.s, x.xi, x.a, x.r)
                for x in state.assets
            ]
        rec = TrajectoryRecord(
            t=state.t,
            r_tot=state.r_tot,
            accepted_moves=state.accepted_moves,
            centroids={k: class_centroid(state, k) for k in AssetClass},
            assets=snap,
        )
        self.records.append(rec)
        return rec

    def merge(self, other: "TrajectoryRecorder") -> "TrajectoryRecorder":
        if self.thinning != other.thinning:
            raise ValueError("cannot merge recorders with different thinning")
        merged = TrajectoryRecorder(thinning=self.thinning)
        merged.records = sorted(self.records + other.records, key=lambda rec: rec.t)
        return merged


@dataclass(frozen=True)
class ClassHistogram:
    """Normalized histogram of 1 - a for one class.

    freq sums to 1 for a populated class and is all zeros for an empty one
    (count == 0 flags emptiness; mean and var are then NaN). Variance is
    the population variance of the raw sample.
    """

    klass: AssetClass
    bin_edges: np.ndarray
    freq: np.ndarray
    count: int
    mean: float
    var: float

    @property
    def empty(self) -> bool:
        return self.count == 0


def nonadoption_histogram(state: MarketState, bins: int = 20) -> dict[AssetClass, ClassHistogram]:
    """Per-class normalized histogram of 1 - a over [0, 1]."""
    values_by_class = {
        klass: np.array([1.0 - x.a for x in state.assets if x.klass is klass])
        for klass in AssetClass
    }
    return histogram_from_values(values_by_class, bins)


def histogram_from_values(
    values_by_class: dict[AssetClass, np.ndarray], bins: int = 20
) -> dict[AssetClass, ClassHistogram]:
    """Build the per-class histograms from raw 1 - a samples (used directly
    when pooling several runs of a sweep cell)."""
    if bins < 1:
        raise ValueError(f"bins must be >= 1: {bins}")
    out: dict[AssetClass, ClassHistogram] = {}
    for klass in AssetClass:
        values = np.asarray(values_by_class.get(klass, ()), dtype=float)
        edges = np.linspace(0.0, 1.0, bins + 1)
        if values.size == 0:
            out[klass] = ClassHistogram(klass, edges, np.zeros(bins), 0, math.nan, math.nan)
            continue
        counts, edges = np.histogram(values, bins=bins, range=(0.0, 1.0))
        out[klass] = ClassHistogram(
            klass,
            edges,
            counts / values.size,
            int(values.size),
            float(values.mean()),
            float(values.var()),
        )
    return out
