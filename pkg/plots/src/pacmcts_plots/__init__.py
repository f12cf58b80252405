"""Figure rendering for pacmcts sweep CSVs, coupled only by the CSV schema."""

from .figures import CENSORED, KIND_COLUMNS, FigureError, FigureSpec, build_figure, render

__all__ = [
    "CENSORED",
    "KIND_COLUMNS",
    "FigureError",
    "FigureSpec",
    "build_figure",
    "render",
]
