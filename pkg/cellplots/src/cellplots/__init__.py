"""Publication-style figures from lightcell CSV exports."""

from .figures import (
    KIND_INPUTS,
    KINDS,
    FigureSpec,
    PlotInputError,
    cdf_curve,
    load_table,
    per_user_traces,
    render,
    sweep_series,
)

__all__ = [
    "KIND_INPUTS",
    "KINDS",
    "FigureSpec",
    "PlotInputError",
    "cdf_curve",
    "load_table",
    "per_user_traces",
    "render",
    "sweep_series",
]
