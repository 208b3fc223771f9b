"""Small hand-built exchanges used as fixtures and sanity cases."""
from __future__ import annotations

from gmpy2 import mpq

from ..core import as_rational, rectangle
from .model import Cell, Exchange

__all__ = ["torus_translation", "identity_exchange", "interval_rotation"]


def torus_translation(shift, x_cuts=(), y_cuts=(), label=None) -> Exchange:
    """Translation of the unit torus coded by a grid of label rectangles.

    ``x_cuts``/``y_cuts`` are interior cut positions in (0, 1). Cells are the
    label rectangles further split along the wrap lines ``x = 1 - shift_x``
    and ``y = 1 - shift_y`` so every cell moves by a single translation.
    ``label(i, j)`` names the rectangle in column ``i``, row ``j``.
    """
    ax, ay = (as_rational(s) % 1 for s in shift)
    xs = [mpq(0)] + sorted(as_rational(c) for c in x_cuts) + [mpq(1)]
    ys = [mpq(0)] + sorted(as_rational(c) for c in y_cuts) + [mpq(1)]
    if label is None:
        label = _default_labeler(len(xs) - 1, len(ys) - 1)
    cells = []
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            name = label(i, j)
            for x0, x1, dx in _wrap_split(xs[i], xs[i + 1], ax):
                for y0, y1, dy in _wrap_split(ys[j], ys[j + 1], ay):
                    cells.append(Cell(name, rectangle(x0, y0, x1, y1), translation=(dx, dy)))
    return Exchange([rectangle(0, 0, 1, 1)], cells, "torus")


def _default_labeler(nx, ny):
    if ny == 1 and nx == 2:
        return lambda i, j: "LR"[i]
    if ny == 1:
        return lambda i, j: chr(ord("A") + i)
    return lambda i, j: chr(ord("A") + i) + chr(ord("a") + j)


def _wrap_split(lo, hi, shift):
    """Pieces of [lo, hi] with their translation mod 1."""
    cut = 1 - shift
    if shift == 0:
        return [(lo, hi, mpq(0))]
    if hi <= cut:
        return [(lo, hi, shift)]
    if lo >= cut:
        return [(lo, hi, shift - 1)]
    return [(lo, cut, shift), (cut, hi, shift - 1)]


def identity_exchange(n_strips: int = 2) -> Exchange:
    """The identity map on the unit square cut into vertical strips."""
    cells = [
        Cell(chr(ord("A") + i), rectangle(mpq(i, n_strips), 0, mpq(i + 1, n_strips), 1))
        for i in range(n_strips)
    ]
    return Exchange([rectangle(0, 0, 1, 1)], cells)


def interval_rotation(alpha, cut=None) -> Exchange:
    """Rotation ``x -> x + alpha`` of the circle, thickened to the unit square.

    The coding uses two letters split at ``cut`` (default ``1 - alpha``, the
    Sturmian coding).
    """
    alpha = as_rational(alpha) % 1
    cut = 1 - alpha if cut is None else as_rational(cut)
    return torus_translation((alpha, 0), x_cuts=(cut,))
