"""Rendering figure specifications to static image files."""

from __future__ import annotations

from pathlib import Path

from matplotlib.figure import Figure

from .spec import FigureSpec, load_series


def build_figure(spec: FigureSpec) -> Figure:
    """Assemble the figure in memory, one line per series.

    Values are plotted exactly as parsed from the CSVs, with no smoothing
    or resampling, so the drawn data can be compared to the files.
    """
    loaded = load_series(spec)
    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.add_subplot()
    for series in loaded:
        ax.plot(series.days, series.values, label=series.label)
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    ax.legend()
    return fig


def render(spec: FigureSpec) -> Path:
    """Write the figure to its output path; the extension picks the format."""
    fig = build_figure(spec)
    spec.out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.out_path)
    return spec.out_path
