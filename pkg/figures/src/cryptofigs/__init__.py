"""Render figures from cryptoselect CSV outputs.

This package deliberately never imports the simulator: every figure is
built from the CSV files alone, so either side can be swapped out as
long as the schemas hold.
"""

from .figspec import CLASS_COLORS, CLASS_LABELS, KINDS, FigureSpec
from .render import build_figure, render
from .schema import (
    HISTOGRAM,
    RESCALE,
    SUMMARY,
    TRAJECTORY,
    CsvSchema,
    SchemaError,
)

__version__ = "0.1.0"

__all__ = [
    "CLASS_COLORS",
    "CLASS_LABELS",
    "KINDS",
    "FigureSpec",
    "render",
    "build_figure",
    "SchemaError",
    "CsvSchema",
    "TRAJECTORY",
    "SUMMARY",
    "HISTOGRAM",
    "RESCALE",
]
