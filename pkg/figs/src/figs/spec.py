"""Figure specifications and validated CSV loading."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

DAY_COLUMN = "day"


class FigureError(Exception):
    """Raised when a figure cannot be built from its inputs."""


@dataclass(frozen=True)
class Series:
    """One plotted line: a column of one CSV under a legend label."""

    csv_path: Path
    column: str
    label: str


@dataclass(frozen=True)
class FigureSpec:
    """Input CSVs, series labels, axis labels, and output path of one figure.

    Every referenced CSV must exist, contain at least one data row, and
    carry the same day column; :func:`load_series` enforces all three.
    """

    series: tuple[Series, ...]
    x_label: str
    y_label: str
    out_path: Path


@dataclass(frozen=True)
class LoadedSeries:
    """One series with its data read and validated."""

    label: str
    days: tuple[int, ...]
    values: tuple[float, ...]


def _read_columns(path: Path) -> dict[str, list[str]]:
    if not path.exists():
        raise FigureError(f"missing input file: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FigureError(f"empty CSV, refusing to render: {path}")
    header, data = rows[0], rows[1:]
    if not data:
        raise FigureError(f"empty CSV, refusing to render: {path}")
    return {name: [row[i] for row in data] for i, name in enumerate(header)}


def load_series(spec: FigureSpec) -> list[LoadedSeries]:
    """Read every series of the spec, enforcing the input invariants."""
    if not spec.series:
        raise FigureError("figure has no series")
    loaded: list[LoadedSeries] = []
    for series in spec.series:
        columns = _read_columns(series.csv_path)
        for required in (DAY_COLUMN, series.column):
            if required not in columns:
                raise FigureError(
                    f"missing column {required!r} in {series.csv_path}"
                )
        loaded.append(
            LoadedSeries(
                label=series.label,
                days=tuple(int(v) for v in columns[DAY_COLUMN]),
                values=tuple(float(v) for v in columns[series.column]),
            )
        )
    first = loaded[0]
    for other, series in zip(loaded[1:], spec.series[1:]):
        if other.days != first.days:
            raise FigureError(
                f"day columns differ between {spec.series[0].csv_path} "
                f"and {series.csv_path}"
            )
    return loaded
