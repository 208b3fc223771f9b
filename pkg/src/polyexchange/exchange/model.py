"""The affine polygon exchange itself: cells, per-cell isometries, validation."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from gmpy2 import mpq

from ..core import ConvexPolygon, Segment, as_rational, format_rational, intersect_polygons, merge_collinear
from ..core.euler import Topology
from ..core.geometry import segment_intersection

__all__ = [
    "Cell",
    "Exchange",
    "ExchangeError",
    "ValidationError",
    "SingularOrbit",
    "IDENTITY",
]

IDENTITY = (mpq(1), mpq(0), mpq(0), mpq(1))


class ExchangeError(ValueError):
    """Base class for malformed exchanges and bad queries."""


class ValidationError(ExchangeError):
    """An exchange violates one of the partition or isometry conditions.

    ``kind`` is one of ``overlap-of-cells``, ``gap-in-cover``,
    ``image-overlap``, ``non-isometry``.
    """

    def __init__(self, kind: str, detail: str, cells: tuple = ()):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.cells = cells


@dataclass(frozen=True)
class SingularOrbit:
    """Returned by :meth:`Exchange.code_orbit` when ``T^step x`` hits a discontinuity."""

    step: int
    prefix: tuple


@dataclass(frozen=True)
class Cell:
    label: str
    polygon: ConvexPolygon
    matrix: tuple = IDENTITY
    translation: tuple = (mpq(0), mpq(0))

    def apply(self, p):
        a, b, c, d = self.matrix
        return (a * p[0] + b * p[1] + self.translation[0], c * p[0] + d * p[1] + self.translation[1])

    def apply_inverse(self, p):
        # orthogonal matrices invert by transposition
        a, b, c, d = self.matrix
        x, y = p[0] - self.translation[0], p[1] - self.translation[1]
        return (a * x + c * y, b * x + d * y)

    def image(self) -> ConvexPolygon:
        return self.polygon.transform(self.matrix, self.translation)

    @property
    def is_translation(self) -> bool:
        return self.matrix == IDENTITY


def _is_isometry(m) -> bool:
    a, b, c, d = m
    return a * a + c * c == 1 and b * b + d * d == 1 and a * b + c * d == 0


def compose(outer, inner):
    """Compose affine maps given as ``(matrix, translation)`` pairs: outer after inner."""
    (a, b, c, d), (tx, ty) = outer
    (e, f, g, h), (ux, uy) = inner
    m = (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    t = (a * ux + b * uy + tx, c * ux + d * uy + ty)
    return m, t


def invert(affine):
    (a, b, c, d), (tx, ty) = affine
    m = (a, c, b, d)
    return m, (-(a * tx + c * ty), -(b * tx + d * ty))


def apply_affine(affine, p):
    (a, b, c, d), (tx, ty) = affine
    return (a * p[0] + b * p[1] + tx, c * p[0] + d * p[1] + ty)


@dataclass(frozen=True)
class Exchange:
    """A piecewise-isometric self map of a polygonal domain.

    The domain may be a disjoint union of convex pieces. Cells are convex and
    labeled; several cells may share a label (the natural coding of a face
    cut by the next-face partition, for example).
    """

    domain: tuple
    cells: tuple
    topology: Topology = Topology.DISK
    alphabet: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "topology", Topology(self.topology))
        if not self.alphabet:
            labels = sorted({c.label for c in self.cells})
            object.__setattr__(self, "alphabet", tuple(labels))
        else:
            object.__setattr__(self, "alphabet", tuple(self.alphabet))
        missing = {c.label for c in self.cells} - set(self.alphabet)
        if missing:
            raise ExchangeError(f"labels outside the alphabet: {sorted(missing)}")

    # -- derived data ---------------------------------------------------
    @property
    def images(self) -> tuple:
        return tuple(c.image() for c in self.cells)

    def area(self):
        return sum((d.area() for d in self.domain), mpq(0))

    def affine(self, i: int):
        c = self.cells[i]
        return c.matrix, c.translation

    def relabel(self, mapping) -> "Exchange":
        """Same dynamics, new labels; ``mapping`` is a callable or dict on cell indices."""
        get = mapping if callable(mapping) else mapping.__getitem__
        cells = [Cell(get(i), c.polygon, c.matrix, c.translation) for i, c in enumerate(self.cells)]
        return Exchange(self.domain, cells, self.topology)

    def inverse(self) -> "Exchange":
        cells = []
        for c in self.cells:
            m, t = invert((c.matrix, c.translation))
            cells.append(Cell(c.label, c.image(), m, t))
        return Exchange(self.domain, cells, self.topology, self.alphabet)

    def discontinuities(self) -> list:
        """Maximal segments of interior cell boundaries (where cells meet)."""
        return merge_collinear(_adjacency_segments([c.polygon for c in self.cells]))

    def label_discontinuities(self, *, images: bool = False) -> list:
        """Maximal segments separating cells (or cell images) with different labels."""
        polys = self.images if images else [c.polygon for c in self.cells]
        labels = [c.label for c in self.cells]
        return merge_collinear(_adjacency_segments(polys, labels))

    # -- validation -----------------------------------------------------
    def validate(self) -> "Exchange":
        polys = [c.polygon for c in self.cells]
        for i, c in enumerate(self.cells):
            if not _is_isometry(c.matrix):
                raise ValidationError("non-isometry", f"cell {i} matrix {c.matrix} is not orthogonal", (i,))
        _check_disjoint(polys, "overlap-of-cells")
        _check_cover(polys, self.domain, "gap-in-cover")
        imgs = list(self.images)
        _check_disjoint(imgs, "image-overlap")
        _check_cover(imgs, self.domain, "image-overlap")
        return self

    # -- point dynamics -------------------------------------------------
    def locate(self, p, *, half_open: bool = False):
        """Index of the open cell containing ``p``.

        Points on a cell boundary return ``None`` unless ``half_open`` is set,
        in which case they belong to the cell entered by moving an infinitesimal
        step in the direction ``(1, eps)``.
        """
        inside_domain = any(d.locate(p) >= 0 for d in self.domain)
        if not inside_domain:
            raise ExchangeError(f"point {p} is outside the domain")
        boundary_hits = []
        for i, c in enumerate(self.cells):
            loc = c.polygon.locate(p)
            if loc == 1:
                return i
            if loc == 0:
                boundary_hits.append(i)
        if half_open:
            for i in boundary_hits:
                if _enters(self.cells[i].polygon, p):
                    return i
        return None

    def apply(self, p, *, half_open: bool = False):
        i = self.locate(p, half_open=half_open)
        if i is None:
            return None
        return self.cells[i].apply(p)

    def code_orbit(self, p, n: int, *, half_open: bool = False):
        """The length-``n`` label itinerary of ``p``, or :class:`SingularOrbit`."""
        p = (as_rational(p[0]), as_rational(p[1]))
        word = []
        for step in range(n):
            i = self.locate(p, half_open=half_open)
            if i is None:
                return SingularOrbit(step, tuple(word))
            word.append(self.cells[i].label)
            p = self.cells[i].apply(p)
        return tuple(word)

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        def verts(poly):
            return [[format_rational(x), format_rational(y)] for x, y in poly.vertices]

        return {
            "alphabet": list(self.alphabet),
            "domain": [verts(d) for d in self.domain],
            "cells": [{"label": c.label, "vertices": verts(c.polygon)} for c in self.cells],
            "maps": [
                {
                    "matrix": [format_rational(v) for v in c.matrix],
                    "translation": [format_rational(v) for v in c.translation],
                }
                for c in self.cells
            ],
            "topology": self.topology.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Exchange":
        try:
            def poly(vs):
                return ConvexPolygon([(as_rational(x), as_rational(y)) for x, y in vs])

            domain = [poly(d) for d in data["domain"]]
            cells_in = data["cells"]
            maps = data.get("maps") or [{} for _ in cells_in]
            if len(maps) != len(cells_in):
                raise ExchangeError("cells and maps have different lengths")
            cells = []
            for k, (c, m) in enumerate(zip(cells_in, maps)):
                matrix = tuple(as_rational(v) for v in m.get("matrix", ["1", "0", "0", "1"]))
                trans = tuple(as_rational(v) for v in m.get("translation", ["0", "0"]))
                if len(matrix) != 4 or len(trans) != 2:
                    raise ExchangeError(f"cell {k}: matrix needs 4 entries and translation 2")
                cells.append(Cell(str(c["label"]), poly(c["vertices"]), matrix, trans))
        except KeyError as exc:
            raise ExchangeError(f"missing field {exc}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ExchangeError):
                raise
            raise ExchangeError(f"malformed exchange: {exc}") from exc
        return cls(domain, cells, data.get("topology", "disk"), tuple(data.get("alphabet", ())))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "Exchange":
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ExchangeError(f"{path}:{exc.lineno}: {exc.msg}") from exc
        return cls.from_dict(data)


def _enters(poly: ConvexPolygon, p) -> bool:
    for hp in poly.halfplanes():
        v = hp.value(p)
        if v < 0:
            return False
        if v == 0:
            # derivative along (1, eps) must point strictly inward
            if hp.a > 0 or (hp.a == 0 and hp.b >= 0):
                return False
    return True


def _check_disjoint(polys: Sequence[ConvexPolygon], kind: str):
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if intersect_polygons(polys[i], polys[j]) is not None:
                raise ValidationError(kind, f"cells {i} and {j} share interior area", (i, j))


def _check_cover(polys, domain, kind):
    for i, p in enumerate(polys):
        if not any(d.contains_polygon(p) for d in domain):
            raise ValidationError(kind, f"cell {i} leaves the domain", (i,))
    total = sum((p.area() for p in polys), mpq(0))
    dom = sum((d.area() for d in domain), mpq(0))
    if total != dom:
        raise ValidationError(kind, f"cells cover area {total} of {dom}")


def _adjacency_segments(polys, labels=None) -> list:
    """Segments where two polygons with disjoint interiors share boundary."""
    out = []
    edges = [p.edges() for p in polys]
    for i in range(len(polys)):
        bi = polys[i].bbox()
        for j in range(i + 1, len(polys)):
            if labels is not None and labels[i] == labels[j]:
                continue
            bj = polys[j].bbox()
            if bi[0] > bj[2] or bj[0] > bi[2] or bi[1] > bj[3] or bj[1] > bi[3]:
                continue
            for a0, a1 in edges[i]:
                for b0, b1 in edges[j]:
                    hit = segment_intersection(Segment(a0, a1), Segment(b0, b1))
                    if isinstance(hit, Segment):
                        out.append(hit)
    return out
