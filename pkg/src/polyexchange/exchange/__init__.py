"""Affine polygon exchange engine."""
from .diagonals import (
    BispecialStats,
    DegenerateIncidence,
    DiagonalTable,
    DiagonalWitness,
    bispecial_stats,
    crossing_count,
    generalized_diagonals,
)
from .idoc2 import Idoc2Certificate, idoc2_certify
from .fixtures import identity_exchange, interval_rotation, torus_translation
from .language import (
    FineCell,
    LanguageError,
    LanguageTable,
    Refinement,
    cassaigne_delta,
    language,
    prop1_complexity,
)
from .model import Cell, Exchange, ExchangeError, SingularOrbit, ValidationError

__all__ = [
    "BispecialStats",
    "Cell",
    "DegenerateIncidence",
    "DiagonalTable",
    "DiagonalWitness",
    "Exchange",
    "ExchangeError",
    "FineCell",
    "Idoc2Certificate",
    "LanguageError",
    "LanguageTable",
    "Refinement",
    "SingularOrbit",
    "ValidationError",
    "bispecial_stats",
    "cassaigne_delta",
    "crossing_count",
    "generalized_diagonals",
    "identity_exchange",
    "idoc2_certify",
    "interval_rotation",
    "language",
    "prop1_complexity",
    "torus_translation",
]
