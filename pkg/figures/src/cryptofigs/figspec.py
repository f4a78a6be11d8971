"""Figure specification: kind, inputs, output, styling."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

from .schema import CLASS_LABELS

KINDS = (
    "scatter_ar",
    "centroid_traj",
    "rtot_series",
    "phase_panels",
    "rescale_curve",
    "compare_bars",
)

# fixed legend colors: CBDCs green, cryptocurrencies orange, crypto
# tokens red, stablecoins yellow
CLASS_COLORS = MappingProxyType({
    "cbdc": "green",
    "stablecoin": "yellow",
    "cryptocurrency": "orange",
    "crypto_token": "red",
})

# how many input files each kind consumes
_ARITY = {
    "scatter_ar": 1,
    "centroid_traj": 1,
    "rtot_series": 1,
    "phase_panels": 1,
    "rescale_curve": 1,
    "compare_bars": 2,
}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    colors: dict = field(default_factory=lambda: dict(CLASS_COLORS))
    dpi: int = 150
    # series labels for compare_bars, first file vs second file
    labels: tuple[str, str] = ("heterogeneous", "representative")

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        want = _ARITY[self.kind]
        if len(self.inputs) != want:
            raise ValueError(
                f"{self.kind} takes {want} input file(s), got {len(self.inputs)}")
        missing = [label for label in CLASS_LABELS if label not in self.colors]
        if missing:
            raise ValueError(f"color map lacks classes {missing}")
        if self.dpi <= 0:
            raise ValueError(f"dpi must be positive, got {self.dpi}")
