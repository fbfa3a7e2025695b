"""Bundled lifetime datasets and CSV ingestion."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError

__all__ = ["Dataset", "BUILTIN_NAMES", "builtin_dataset", "load_csv", "resolve_dataset"]


@dataclass(frozen=True)
class Dataset:
    name: str
    values: tuple
    source: str = ""

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise DataError(f"dataset {self.name!r} is empty")
        if not all(v > 0 and np.isfinite(v) for v in vals):
            raise DataError(f"dataset {self.name!r} has nonpositive or non-finite values")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    def array(self) -> np.ndarray:
        return np.array(self.values)


# Values are kept exactly as recorded, in the recorded order.
_BUILTIN = {
    "failure_times": (
        "Failure times of eight components at three test temperatures (100, 120, 140)",
        (14.712, 32.644, 61.979, 65.521, 105.50, 114.60, 120.40, 138.50, 8.610, 11.741, 54.535,
         55.047, 58.928, 63.391, 105.18, 113.02, 2.998, 5.016, 15.628, 23.040, 27.851, 37.843,
         38.050, 48.226),
    ),
    "vinyl_chloride": (
        "Vinyl chloride concentrations (mg/l) from clean up-gradient monitoring wells",
        (5.1, 1.2, 1.3, 0.6, 0.5, 2.4, 0.5, 1.1, 8, 0.8, 0.4, 0.6, 0.9, 0.4, 2, 0.5, 5.3, 3.2, 2.7,
         2.9, 2.5, 2.3, 1, 0.2, 0.1, 0.1, 1.8, 0.9, 2, 4, 6.8, 1.2, 0.4, 0.2),
    ),
    "karachi_precipitation": (
        "Annual maximum precipitation, Karachi (Pakistan), 1950-2009",
        (117.6, 157.7, 148.6, 11.4, 5.6, 63.6, 62.4, 11.8, 6.5, 54.9, 39.9, 16.8, 30.2, 38.4, 76.9,
         73.4, 85, 256.3, 24.9, 148.6, 160.5, 131.3, 77, 155.2, 217.2, 105.5, 166.8, 157.9, 73.6,
         291.4, 210.3, 315.7, 107.7, 33.3, 302.6, 159.1, 78.7, 33.2, 52.2, 92.7, 150.4, 43.7, 68.3,
         20.8, 179.4, 245.7, 19.5, 30, 270.4, 160, 96.3, 185.7, 429.3, 184.9, 262.5, 80.6, 138.2,
         28, 39.3),
    ),
    "electronic_components": (
        "Failure times (minutes) of 15 electronic components under an accelerated life test",
        (1.4, 5.1, 6.3, 10.8, 12.1, 18.5, 19.7, 22.2, 23, 30.6, 37.3, 46.3, 53.9, 59.8, 66.2),
    ),
}

BUILTIN_NAMES = tuple(_BUILTIN)


def builtin_dataset(name: str) -> Dataset:
    try:
        source, values = _BUILTIN[name]
    except KeyError:
        raise KeyError(f"unknown dataset {name!r}; available: {', '.join(BUILTIN_NAMES)}") from None
    return Dataset(name=name, values=values, source=source)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_csv(path, column=None) -> Dataset:
    """Read one column of positive numbers from a comma-separated file.

    A first row whose first cell is not numeric is taken as a header.
    ``column`` is a header name or a zero-based index; by default the first
    column is used. Raises :class:`DataError` naming the 1-based file row
    of the first bad value.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} contains no data")

    header = None
    first_row = 1
    if not _is_number(rows[0][0].strip()):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        first_row = 2

    if column is None:
        idx = 0
    elif isinstance(column, int) or str(column).isdigit():
        idx = int(column)
    else:
        if header is None or column not in header:
            raise DataError(f"column {column!r} not found in {path}")
        idx = header.index(column)

    values = []
    for offset, row in enumerate(rows):
        lineno = first_row + offset
        if idx >= len(row):
            raise DataError(f"row {lineno}: missing column {idx}")
        cell = row[idx].strip()
        try:
            v = float(cell)
        except ValueError:
            raise DataError(f"row {lineno}: {cell!r} is not a number") from None
        if not (v > 0 and np.isfinite(v)):
            raise DataError(f"row {lineno}: value {cell} is not strictly positive")
        values.append(v)
    return Dataset(name=path.stem, values=tuple(values), source=str(path))


def resolve_dataset(ref: str, column=None) -> Dataset:
    """A built-in dataset name, or else a path to a CSV file."""
    if ref in _BUILTIN:
        return builtin_dataset(ref)
    return load_csv(ref, column)
