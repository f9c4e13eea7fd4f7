"""Static figure renderer for the epidemic group-testing CSV bundles."""

from .figures import figure_names, make_spec
from .render import build_figure, render
from .spec import FigureError, FigureSpec, LoadedSeries, Series, load_series

__all__ = [
    "FigureError",
    "FigureSpec",
    "LoadedSeries",
    "Series",
    "build_figure",
    "figure_names",
    "load_series",
    "make_spec",
    "render",
]
