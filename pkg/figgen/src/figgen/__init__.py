"""Figure rendering for solver result CSVs."""

from .render import EmptyInputError, FigureSpec, SchemaError, fitted_slope, load_series, render

__all__ = [
    "EmptyInputError",
    "FigureSpec",
    "SchemaError",
    "fitted_slope",
    "load_series",
    "render",
]
