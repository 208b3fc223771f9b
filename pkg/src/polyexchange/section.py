"""First-return maps of a linear flow to the faces of a periodic polytope tiling.

Space is tiled by lattice translates of finitely many convex polytopes (the
"copies"). A point entering a copy through one of its near faces leaves it
through a far face and enters the neighbouring copy there. Projecting along
the flow direction onto the plane ``z = 0`` turns every such step into a
translation, so the return map to the union of near faces is a piecewise
translation of the union of the projected copies. Copies are laid side by
side in the chart so their projections do not overlap.
"""
from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .core import ConvexPolygon, as_rational, convex_hull, intersect_polygons
from .exchange import Cell, Exchange

__all__ = ["Face3", "Copy3", "SectionCell", "DegenerateDirection", "project", "build_section"]


class DegenerateDirection(ValueError):
    """The flow direction is parallel to a face or collapses the section."""


@dataclass(frozen=True)
class Face3:
    key: object
    vertices: tuple
    normal: tuple
    neighbor: tuple | None = None  # (copy index, lattice shift) across this face


@dataclass(frozen=True)
class Copy3:
    tag: object
    faces: tuple


@dataclass(frozen=True)
class SectionCell:
    copy: int
    near: object
    far: object
    next_copy: int
    shift: tuple


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def project(p, omega):
    """Projection along ``omega`` onto ``z = 0``."""
    return (p[0] - p[2] * omega[0] / omega[2], p[1] - p[2] * omega[1] / omega[2])


def build_section(copies, omega, labeler=None, *, topology="torus"):
    """Section exchange of the flow in direction ``omega``.

    Returns ``(exchange, meta)`` where ``meta[i]`` is the :class:`SectionCell`
    describing cell ``i``. ``labeler(meta)`` names each cell (default: the
    near-face key).
    """
    omega = tuple(as_rational(w) for w in omega)
    if omega[2] == 0:
        raise DegenerateDirection("the direction must not be horizontal")
    labeler = labeler or (lambda m: str(m.near))

    hulls = []
    for k, cp in enumerate(copies):
        pts = [project(v, omega) for f in cp.faces for v in f.vertices]
        try:
            hulls.append(convex_hull(pts))
        except ValueError as exc:
            raise DegenerateDirection(f"copy {k} projects to a degenerate set") from exc
    width = max(h.bbox()[2] - h.bbox()[0] for h in hulls) + 1
    offsets = []
    cursor = mpq(0)
    for h in hulls:
        offsets.append((cursor - h.bbox()[0], mpq(0)))
        cursor += width
    domain = [h.translate(*off) for h, off in zip(hulls, offsets)]

    cells, meta = [], []
    for k, cp in enumerate(copies):
        near, far = [], []
        for f in cp.faces:
            s = _dot(f.normal, omega)
            if s == 0:
                raise DegenerateDirection(f"direction is parallel to face {f.key} of copy {k}")
            poly = ConvexPolygon([project(v, omega) for v in f.vertices]).translate(*offsets[k])
            (near if s < 0 else far).append((f, poly))
        for fn, pn in near:
            for ff, pf in far:
                piece = intersect_polygons(pn, pf)
                if piece is None:
                    continue
                if ff.neighbor is None:
                    raise ValueError(f"far face {ff.key} of copy {k} has no neighbour")
                nxt, lam = ff.neighbor
                lam = tuple(as_rational(x) for x in lam)
                pl = project(lam, omega)
                t = (offsets[nxt][0] - offsets[k][0] - pl[0], offsets[nxt][1] - offsets[k][1] - pl[1])
                m = SectionCell(k, fn.key, ff.key, nxt, lam)
                meta.append(m)
                cells.append(Cell(labeler(m), piece, translation=t))
    ex = Exchange(domain, cells, topology)
    return ex, meta
