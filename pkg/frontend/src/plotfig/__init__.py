"""Batch figure renderer for the opinion-dynamics simulator's outputs."""

from .csvio import Table, read_table
from .errors import SchemaError, SpecError
from .figures import build_figure, render
from .spec import FigureSpec, InputSpec

__all__ = [
    "FigureSpec",
    "InputSpec",
    "SchemaError",
    "SpecError",
    "Table",
    "build_figure",
    "read_table",
    "render",
]

__version__ = "0.1.0"
