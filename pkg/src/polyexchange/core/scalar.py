"""Exact rational scalars.

All coordinates in the package are ``gmpy2.mpq`` values. They behave like
``fractions.Fraction`` (always in lowest terms, positive denominator) but are
an order of magnitude faster, which matters for deep refinements.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

__all__ = ["Q", "as_rational", "parse_rational", "format_rational", "ZERO", "ONE"]

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)


def as_rational(value) -> mpq:
    """Coerce ints, Fractions, mpq and ``"num/den"`` strings to ``mpq``.

    Floats are rejected: they would silently import rounding error.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float {value!r}; pass 'num/den'")
    if isinstance(value, (int, Fraction, Rational)) or type(value) is type(ZERO):
        return mpq(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def parse_rational(text: str) -> mpq:
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    num, sep, den = text.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError as exc:
        raise ValueError(f"malformed rational {text!r}") from exc
    if d == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return mpq(n, d)


def format_rational(value) -> str:
    """Serialize as ``"num/den"`` in lowest terms (``"n"`` is never emitted)."""
    q = mpq(value)
    return f"{q.numerator}/{q.denominator}"
