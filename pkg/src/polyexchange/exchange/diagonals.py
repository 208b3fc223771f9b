"""Bispecial statistics, crossing counts and generalized diagonals.

For a word ``v`` with region ``R_v``, the right extensions cut ``R_v`` along
preimages of label discontinuities and the left extensions cut it along
images of label discontinuities. ``k(v)`` counts transverse crossings of the
two cut systems inside ``R_v``.

Generalized diagonals are found independently, by walking along every
image-side label discontinuity and recording the points where the refined
word changes only in its last letter. A witness of length ``n`` is a point
``q`` on an image of a discontinuity whose orbit ``q, Tq, ..., T^(n-1) q``
stays in open word regions and whose ``n``-th iterate lies on a discontinuity.
With this convention the crossing total over ``L(n)`` equals ``N(n)``.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from gmpy2 import mpq

from ..core import Segment, merge_collinear, segment_intersection
from ..core.geometry import point_on_segment
from .language import LanguageError, LanguageTable, Refinement
from .model import Exchange, _adjacency_segments, apply_affine

__all__ = [
    "BispecialStats",
    "DegenerateIncidence",
    "DiagonalWitness",
    "DiagonalTable",
    "bispecial_stats",
    "crossing_count",
    "generalized_diagonals",
]


class DegenerateIncidence(ValueError):
    """A cut touches another cut tangentially or at an endpoint."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


@dataclass(frozen=True)
class BispecialStats:
    word: tuple
    m_l: int
    m_r: int
    m_b: int
    k: int

    @property
    def contribution(self) -> int:
        return self.m_b - self.m_r - self.m_l + 1

    @property
    def bispecial(self) -> bool:
        return self.m_l >= 2 and self.m_r >= 2


def _cuts(pieces):
    """Merged segments separating pieces that belong to different groups."""
    polys = [p for _, p in pieces]
    groups = [g for g, _ in pieces]
    return merge_collinear(_adjacency_segments(polys, groups))


def crossing_count(ref: Refinement, v: tuple, *, strict: bool = True) -> int:
    """``k(v)``: transverse crossings of the right cuts with the left cuts in ``R_v``."""
    n = len(v)
    words = ref.words(n + 1)
    right, left = [], []
    for w, cells in words.items():
        if w[:-1] == v:
            right.extend((w[-1], fc.polygon) for fc in cells)
        if w[1:] == v:
            left.extend((w[0], ref.first_step(fc)) for fc in cells)
    rcuts, lcuts = _cuts(right), _cuts(left)
    points = set()
    for r in rcuts:
        for l in lcuts:
            hit = segment_intersection(r, l)
            if hit is None:
                continue
            if isinstance(hit, Segment):
                if strict:
                    raise DegenerateIncidence(f"collinear cuts inside the region of {v!r}", hit)
                continue
            interior = point_on_segment(hit, r.a, r.b, strict=True) and point_on_segment(
                hit, l.a, l.b, strict=True
            )
            if not interior:
                if strict:
                    raise DegenerateIncidence(f"cut endpoint contact inside the region of {v!r}", hit)
                continue
            points.add(hit)
    return len(points)


def bispecial_stats(lang: LanguageTable, v, *, strict: bool = True) -> BispecialStats:
    v = tuple(v)
    n = len(v)
    if n + 2 > lang.nmax:
        lang.extend(n + 2)
    if v not in lang.words[n]:
        raise LanguageError(f"{v!r} is not in the language")
    m_r = sum(1 for w in lang.words[n + 1] if w[:-1] == v)
    m_l = sum(1 for w in lang.words[n + 1] if w[1:] == v)
    m_b = sum(1 for w in lang.words[n + 2] if w[1:-1] == v)
    k = crossing_count(lang.refinement, v, strict=strict) if lang.refinement is not None else 0
    return BispecialStats(v, m_l, m_r, m_b, k)


@dataclass(frozen=True)
class DiagonalWitness:
    length: int
    start_segment: int
    point: tuple
    word: tuple
    end_point: tuple
    displacement: tuple


@dataclass
class DiagonalTable:
    witnesses: dict = field(default_factory=dict)
    segments: list = field(default_factory=list)

    def N(self, n: int) -> int:
        return len(self.witnesses.get(n, ()))

    @property
    def nmax(self) -> int:
        return max(self.witnesses) if self.witnesses else 0

    def counts(self) -> list:
        return [self.N(n) for n in range(1, self.nmax + 1)]


def _segment_span(seg: Segment, poly):
    """Parameter interval of ``seg`` inside the closed polygon, or ``None``."""
    (x0, y0), (x1, y1) = seg.a, seg.b
    dx, dy = x1 - x0, y1 - y0
    lo, hi = mpq(0), mpq(1)
    for hp in poly.halfplanes():
        # value(t) = c - a x(t) - b y(t) >= 0
        v0 = hp.c - hp.a * x0 - hp.b * y0
        slope = -(hp.a * dx + hp.b * dy)
        if slope == 0:
            if v0 < 0:
                return None
            if v0 == 0:
                return None  # runs along an edge
            continue
        t = -v0 / slope
        if slope > 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
        if lo >= hi:
            return None
    return lo, hi


def generalized_diagonals(exchange: Exchange, nmax: int, *, refinement: Refinement | None = None,
                          workers: int = 1) -> DiagonalTable:
    """All generalized diagonals of length ``1..nmax`` (see module docstring)."""
    ref = refinement or Refinement(exchange.validate(), workers)
    starts = exchange.label_discontinuities(images=True)
    table = DiagonalTable(segments=starts)
    for n in range(1, nmax + 1):
        cells = ref.level(n + 1)
        found = {}
        for si, seg in enumerate(starts):
            sb = (min(seg.a[0], seg.b[0]), min(seg.a[1], seg.b[1]),
                  max(seg.a[0], seg.b[0]), max(seg.a[1], seg.b[1]))
            spans = []
            for fc in cells:
                bb = fc.polygon.bbox()
                if bb[0] > sb[2] or sb[0] > bb[2] or bb[1] > sb[3] or sb[1] > bb[3]:
                    continue
                span = _segment_span(seg, fc.polygon)
                if span is not None:
                    spans.append((span, fc))
            spans.sort(key=lambda s: s[0])
            for (s1, f1), (s2, f2) in zip(spans, spans[1:]):
                if s1[1] != s2[0]:
                    continue
                w1, w2 = ref.word_of(f1), ref.word_of(f2)
                if w1[:-1] != w2[:-1] or w1[-1] == w2[-1]:
                    continue
                t = s1[1]
                q = (seg.a[0] + t * (seg.b[0] - seg.a[0]), seg.a[1] + t * (seg.b[1] - seg.a[1]))
                if q in found:
                    continue
                end = apply_affine(_prefix_affine(exchange, f1.itinerary[:-1]), q)
                disp = (end[0] - q[0], end[1] - q[1])
                found[q] = DiagonalWitness(n, si, q, w1[:-1], end, disp)
        table.witnesses[n] = [found[q] for q in sorted(found)]
    return table


def _prefix_affine(exchange, itinerary):
    from .model import compose, IDENTITY

    aff = (IDENTITY, (mpq(0), mpq(0)))
    for i in itinerary:
        c = exchange.cells[i]
        aff = compose((c.matrix, c.translation), aff)
    return aff
