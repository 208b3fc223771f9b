"""Language enumeration by exact refinement of the cell partition.

The depth-``n`` refinement is the set of nonempty open cells of
``P ∨ T^-1 P ∨ ... ∨ T^-(n-1) P``. Every refined cell carries its itinerary
(cell indices) and the composite isometry ``T^n`` restricted to it, so the next
level only intersects the image of each cell with the ``|P|`` base cells.
Words are read off as label sequences; a word's region is the union of the
refined cells sharing it.
"""
from __future__ import annotations

from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

from ..core import intersect_polygons
from .model import Exchange, compose, invert

__all__ = [
    "FineCell",
    "Refinement",
    "LanguageTable",
    "language",
    "cassaigne_delta",
    "prop1_complexity",
    "LanguageError",
]


class LanguageError(ValueError):
    pass


class FineCell(NamedTuple):
    itinerary: tuple
    polygon: object
    image: object
    affine: tuple


def _refine_chunk(cells_in, base):
    """Split each refined cell by the base partition seen through ``T^n``."""
    out = []
    for fc in cells_in:
        inv = None
        img = fc.image
        for idx, (poly, aff, image_aff) in enumerate(base):
            piece = intersect_polygons(img, poly)
            if piece is None:
                continue
            if inv is None:
                inv = invert(fc.affine)
            pre = piece.transform(*inv)
            out.append(
                FineCell(fc.itinerary + (idx,), pre, piece.transform(*aff), compose(aff, fc.affine))
            )
    return out


class Refinement:
    """Lazily computed refinement levels of an exchange.

    ``workers > 1`` splits each level into contiguous chunks handled by a
    process pool; chunks are concatenated in order, so output is identical for
    every worker count.
    """

    def __init__(self, exchange: Exchange, workers: int = 1):
        self.exchange = exchange
        self.workers = max(1, int(workers))
        self._base = [(c.polygon, (c.matrix, c.translation), None) for c in exchange.cells]
        first = [
            FineCell((i,), c.polygon, c.image(), (c.matrix, c.translation))
            for i, c in enumerate(exchange.cells)
        ]
        self._levels = [None, first]
        self._words = {}
        self._labels = [c.label for c in exchange.cells]

    def relabeled(self, exchange: Exchange) -> "Refinement":
        """A view for the same cells under other labels; levels are shared, not copied."""
        if len(exchange.cells) != len(self.exchange.cells):
            raise LanguageError("relabeled exchange must have the same cells")
        view = Refinement.__new__(Refinement)
        view.__dict__.update(self.__dict__)
        view.exchange = exchange
        view._words = {}
        view._labels = [c.label for c in exchange.cells]
        return view

    def level(self, n: int) -> list:
        if n < 1:
            raise LanguageError("refinement depth starts at 1")
        while len(self._levels) <= n:
            self._levels.append(self._refine(self._levels[-1]))
        return self._levels[n]

    def _refine(self, cells):
        if self.workers == 1 or len(cells) < 64:
            return _refine_chunk(cells, self._base)
        size = -(-len(cells) // self.workers)
        chunks = [cells[i : i + size] for i in range(0, len(cells), size)]
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            parts = pool.map(_refine_chunk, chunks, [self._base] * len(chunks))
            return [fc for part in parts for fc in part]

    def word_of(self, fc: FineCell) -> tuple:
        return tuple(self._labels[i] for i in fc.itinerary)

    def words(self, n: int) -> dict:
        """Map each length-``n`` word to the refined cells realizing it."""
        if n not in self._words:
            table = defaultdict(list)
            for fc in self.level(n):
                table[self.word_of(fc)].append(fc)
            self._words[n] = dict(table)
        return self._words[n]

    def first_step(self, fc: FineCell):
        """Image of a refined cell under one application of ``T``."""
        c = self.exchange.cells[fc.itinerary[0]]
        return fc.polygon.transform(c.matrix, c.translation)


@dataclass
class LanguageTable:
    """Words of each length, with complexity ``p(n)`` and its differences."""

    words: dict
    refinement: Refinement | None = field(default=None, repr=False)

    @property
    def nmax(self) -> int:
        return max(self.words) if self.words else 0

    def p(self, n: int) -> int:
        if n == 0:
            return 1
        try:
            return len(self.words[n])
        except KeyError:
            raise LanguageError(f"language not enumerated to length {n}") from None

    def s(self, n: int) -> int:
        return self.p(n + 1) - self.p(n)

    def delta_s(self, n: int) -> int:
        return self.s(n + 1) - self.s(n)

    def complexity(self) -> list:
        return [self.p(n) for n in range(1, self.nmax + 1)]

    def __contains__(self, word) -> bool:
        word = tuple(word)
        return word in self.words.get(len(word), ())

    def extend(self, nmax: int) -> "LanguageTable":
        if self.refinement is None:
            raise LanguageError("table has no refinement to extend")
        for n in range(self.nmax + 1, nmax + 1):
            self.words[n] = frozenset(self.refinement.words(n))
        return self


def language(exchange: Exchange, nmax: int, *, workers: int = 1, validate: bool = True) -> LanguageTable:
    """Enumerate ``L(n)`` for ``1 <= n <= nmax`` by exact refinement."""
    if nmax < 1:
        raise LanguageError("nmax must be at least 1")
    if validate:
        exchange.validate()
    ref = Refinement(exchange, workers)
    words = {n: frozenset(ref.words(n)) for n in range(1, nmax + 1)}
    return LanguageTable(words, ref)


def cassaigne_delta(lang: LanguageTable, n: int) -> int:
    """Sum of ``m_b - m_r - m_l + 1`` over the bispecial words of length ``n``.

    Non-bispecial words contribute zero, so the sum may run over all of L(n).
    """
    if n < 1 or n + 2 > lang.nmax:
        raise LanguageError(f"need the language to length {n + 2} (have {lang.nmax})")
    right = defaultdict(int)
    left = defaultdict(int)
    both = defaultdict(int)
    for w in lang.words[n + 1]:
        right[w[:-1]] += 1
        left[w[1:]] += 1
    for w in lang.words[n + 2]:
        both[w[1:-1]] += 1
    total = 0
    for v in lang.words[n]:
        if right[v] >= 2 and left[v] >= 2:
            total += both[v] - right[v] - left[v] + 1
    return total


def prop1_complexity(p1: int, p2: int, N, n: int) -> int:
    """Closed form ``(2-n)p1 + (n-1)p2 + sum_{i=2}^{n-1} sum_{j=1}^{i-1} N(j)``.

    ``N`` is indexable by ``j`` for ``1 <= j <= n-2`` (a mapping, or a
    sequence whose entry ``j-1`` is ``N(j)``), or a callable.
    """
    if n <= 2:
        raise ValueError("the closed form holds for n > 2 only")
    if callable(N):
        get = N
    elif isinstance(N, dict):
        get = N.__getitem__
    else:
        seq = list(N)
        get = lambda j: seq[j - 1]  # noqa: E731
    total = (2 - n) * p1 + (n - 1) * p2
    inner = 0
    for i in range(2, n):
        inner += get(i - 1)
        total += inner
    return total
