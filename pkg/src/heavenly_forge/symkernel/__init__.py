"""Exact arithmetic core: rational functions on charts with quadratic root symbols."""
from .chart import ChartSpec
from .errors import (
    ChartError,
    ChartMismatchError,
    NotIntegrableError,
    ParseError,
    SeriesError,
    SymkernelError,
    UndeclaredSymbolError,
    ZeroDivisionInField,
)
from .field import FieldElement, compose, differentiate
from .parse import normalize, parse_expression
from .printing import format_rational, print_canonical

__all__ = [
    "ChartSpec",
    "FieldElement",
    "compose",
    "differentiate",
    "normalize",
    "parse_expression",
    "print_canonical",
    "format_rational",
    "SymkernelError",
    "ChartError",
    "ChartMismatchError",
    "UndeclaredSymbolError",
    "ZeroDivisionInField",
    "ParseError",
    "SeriesError",
    "NotIntegrableError",
]

from .puiseux import RAMIFICATION, PuiseuxSeries, series_expand

__all__ += ["PuiseuxSeries", "series_expand", "RAMIFICATION"]
