"""Outward-rounded interval enclosures for expressions involving pi.

Only the three-edge witness verifier needs real numbers that are not
rational; everything else in the package is exact. Interval arithmetic is
delegated to ``mpmath.iv``, which rounds every endpoint outward.
"""
from __future__ import annotations

import ast
from contextlib import contextmanager
from dataclasses import dataclass

import mpmath
from mpmath import iv
from mpmath.libmp import from_man_exp, to_rational

from gmpy2 import mpq

from .scalar import as_rational

__all__ = ["BallScalar", "enclose", "IntervalDivisionError"]


class IntervalDivisionError(ZeroDivisionError):
    """Division by an interval that contains zero."""


@contextmanager
def _precision(bits: int):
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


@dataclass(frozen=True)
class BallScalar:
    """A closed interval ``[lower, upper]`` with dyadic rational endpoints."""

    lower: mpq
    upper: mpq
    precision: int

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("empty interval")

    # construction -----------------------------------------------------
    @classmethod
    def _wrap(cls, x, prec):
        lo, hi = x._mpi_
        return cls(_to_rational(lo), _to_rational(hi), prec)

    def _iv(self):
        return iv.mpf([_to_iv_endpoint(self.lower), _to_iv_endpoint(self.upper)])

    @classmethod
    def from_rational(cls, value, prec: int) -> "BallScalar":
        q = as_rational(value)
        with _precision(prec):
            x = iv.mpf(int(q.numerator)) / iv.mpf(int(q.denominator))
            return cls._wrap(x, prec)

    @classmethod
    def pi(cls, prec: int) -> "BallScalar":
        with _precision(prec):
            return cls._wrap(iv.pi, prec)

    # arithmetic -------------------------------------------------------
    def _binary(self, other, op):
        if not isinstance(other, BallScalar):
            other = BallScalar.from_rational(other, self.precision)
        prec = min(self.precision, other.precision)
        with _precision(prec):
            return BallScalar._wrap(op(self._iv(), other._iv()), prec)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    def __truediv__(self, other):
        if not isinstance(other, BallScalar):
            other = BallScalar.from_rational(other, self.precision)
        if other.contains(0):
            raise IntervalDivisionError("divisor interval straddles zero")
        return self._binary(other, lambda a, b: a / b)

    def __radd__(self, other):
        return BallScalar.from_rational(other, self.precision) + self

    def __rsub__(self, other):
        return BallScalar.from_rational(other, self.precision) - self

    def __rmul__(self, other):
        return BallScalar.from_rational(other, self.precision) * self

    def __rtruediv__(self, other):
        return BallScalar.from_rational(other, self.precision) / self

    def __neg__(self):
        return BallScalar(-self.upper, -self.lower, self.precision)

    # queries ----------------------------------------------------------
    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, value) -> bool:
        if isinstance(value, BallScalar):
            return self.lower <= value.lower and value.upper <= self.upper
        return self.lower <= as_rational(value) <= self.upper

    def strictly_inside(self, lo, hi) -> bool:
        return as_rational(lo) < self.lower and self.upper < as_rational(hi)

    def overlaps(self, other: "BallScalar") -> bool:
        return not (self.upper < other.lower or other.upper < self.lower)

    def __repr__(self):
        lo = mpmath.nstr(_to_iv_endpoint(self.lower), 20)
        hi = mpmath.nstr(_to_iv_endpoint(self.upper), 20)
        return f"BallScalar([{lo}, {hi}], prec={self.precision})"


def _to_rational(raw) -> mpq:
    p, q = to_rational(raw)
    return mpq(int(p), int(q))


def _to_iv_endpoint(q: mpq):
    # endpoints are dyadic; build the mpf without rounding
    num, den = int(q.numerator), int(q.denominator)
    shift = den.bit_length() - 1
    return mpmath.mp.make_mpf(from_man_exp(num, -shift))


_BINOPS = {ast.Add: "__add__", ast.Sub: "__sub__", ast.Mult: "__mul__", ast.Div: "__truediv__"}


def enclose(expr: str, prec: int = 53) -> BallScalar:
    """Enclose a real expression over rationals and ``pi`` with ``+ - * /``.

    >>> enclose("1 - pi/6", 128).strictly_inside(0, 1)
    True
    """
    tree = ast.parse(expr.replace("π", "pi"), mode="eval")
    return _eval(tree.body, prec)


def _eval(node, prec):
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        left = _eval(node.left, prec)
        right = _eval(node.right, prec)
        return getattr(left, _BINOPS[type(node.op)])(right)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _eval(node.operand, prec)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.Name) and node.id == "pi":
        return BallScalar.pi(prec)
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return BallScalar.from_rational(node.value, prec)
    raise ValueError(f"unsupported expression element: {ast.dump(node)}")
