"""Germ groupoids of finite inverse semigroup representations."""

from ._kernels import BACKEND
from .report import (
    CharacterizationMismatch,
    GermoidError,
    InvalidStructure,
    ParseError,
    PreconditionError,
    Report,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CharacterizationMismatch",
    "GermoidError",
    "InvalidStructure",
    "ParseError",
    "PreconditionError",
    "Report",
]
