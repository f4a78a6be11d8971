"""CSV schemas of the simulator's output files, with strict readers.

Column order is part of the contract, so headers are checked
positionally and every failure names the offending column. Readers never
write: the input files are the interface boundary and must stay
untouched.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

__all__ = [
    "SchemaError",
    "CsvSchema",
    "CLASS_LABELS",
    "TRAJECTORY",
    "SUMMARY",
    "HISTOGRAM",
    "RESCALE",
]

CLASS_LABELS = ("cbdc", "stablecoin", "cryptocurrency", "crypto_token")


class SchemaError(Exception):
    """Input file absent, malformed, or not matching the schema."""


def _parse_int(text: str) -> int:
    return int(text)


def _parse_float(text: str) -> float:
    # repr() output from the writer side; "nan" appears for empty classes
    value = float(text)
    return value


def _parse_str(text: str) -> str:
    return text


def _parse_class(text: str) -> str:
    if text not in CLASS_LABELS:
        raise ValueError(f"not one of {CLASS_LABELS}")
    return text


class CsvSchema:
    """One output-file schema: ordered (column, parser) pairs."""

    def __init__(self, label: str, columns: list[tuple[str, callable]]):
        self.label = label
        self.columns = columns
        self.names = [name for name, _ in columns]

    def _check_header(self, path: Path, header: list[str]) -> None:
        for pos, (got, want) in enumerate(zip(header, self.names), start=1):
            if got != want:
                raise SchemaError(
                    f"{path}: column {pos} is {got!r}, expected {want!r} "
                    f"({self.label} schema)"
                )
        if len(header) > len(self.names):
            raise SchemaError(
                f"{path}: unexpected extra column {header[len(self.names)]!r} "
                f"({self.label} schema)"
            )
        if len(header) < len(self.names):
            raise SchemaError(
                f"{path}: missing column {self.names[len(header)]!r} "
                f"({self.label} schema)"
            )

    def read(self, path: str | Path) -> list[dict]:
        path = Path(path)
        if not path.is_file():
            raise SchemaError(f"{path}: input file does not exist")
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: empty file, no header") from None
            self._check_header(path, header)
            rows = []
            for lineno, cells in enumerate(reader, start=2):
                if len(cells) != len(self.columns):
                    raise SchemaError(
                        f"{path} line {lineno}: {len(cells)} cells, "
                        f"expected {len(self.columns)}"
                    )
                row = {}
                for (name, parse), cell in zip(self.columns, cells):
                    try:
                        row[name] = parse(cell)
                    except ValueError as exc:
                        raise SchemaError(
                            f"{path} line {lineno}: column {name!r}: "
                            f"cannot parse {cell!r} ({exc})"
                        ) from None
                rows.append(row)
        if not rows:
            raise SchemaError(f"{path}: no data rows ({self.label} schema)")
        return rows


TRAJECTORY = CsvSchema("trajectory", [
    ("t", _parse_int),
    ("asset_id", _parse_int),
    ("class", _parse_class),
    ("s", _parse_float),
    ("xi", _parse_float),
    ("a", _parse_float),
    ("r", _parse_float),
])

SUMMARY = CsvSchema("summary", [
    ("t", _parse_int),
    ("r_tot", _parse_float),
    ("accepted_moves", _parse_int),
] + [
    (f"{stat}_{label}", _parse_float)
    for label in CLASS_LABELS
    for stat in ("a_mean", "r_mean")
])

HISTOGRAM = CsvSchema("histogram", [
    ("beta1", _parse_float),
    ("beta2", _parse_float),
    ("class", _parse_class),
    ("bin_lo", _parse_float),
    ("bin_hi", _parse_float),
    ("freq", _parse_float),
    ("mean_nonadoption", _parse_float),
    ("var_nonadoption", _parse_float),
])

RESCALE = CsvSchema("rescale", [
    ("beta", _parse_float),
    ("beta_prime", _parse_float),
    ("residual", _parse_float),
    ("method", _parse_str),
    ("samples", _parse_int),
])


def finite(values: list[float]) -> list[float]:
    """Drop NaNs (empty-class placeholders) from a numeric column."""
    return [v for v in values if not math.isnan(v)]
