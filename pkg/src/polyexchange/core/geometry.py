"""Exact planar geometry on rational coordinates.

Points are plain ``(x, y)`` tuples of ``mpq``. Polygons are convex, stored
counterclockwise starting from the lexicographically smallest vertex so that
two equal polygons compare equal structurally.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from gmpy2 import mpq

from .scalar import as_rational

Point = tuple  # (mpq, mpq)

__all__ = [
    "Point",
    "point",
    "cross",
    "orient",
    "Segment",
    "HalfPlane",
    "ConvexPolygon",
    "clip_polygon",
    "intersect_polygons",
    "segment_intersection",
    "point_on_segment",
    "merge_collinear",
    "rectangle",
    "convex_hull",
]

_ZERO = mpq(0)


def point(x, y) -> Point:
    return (as_rational(x), as_rational(y))


def cross(ax, ay, bx, by):
    return ax * by - ay * bx


def orient(a: Point, b: Point, c: Point):
    """Twice the signed area of triangle abc (positive when counterclockwise)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("degenerate segment")

    def canonical(self) -> "Segment":
        return self if self.a <= self.b else Segment(self.b, self.a)

    def direction(self):
        return (self.b[0] - self.a[0], self.b[1] - self.a[1])

    def translate(self, dx, dy) -> "Segment":
        return Segment((self.a[0] + dx, self.a[1] + dy), (self.b[0] + dx, self.b[1] + dy))


@dataclass(frozen=True)
class HalfPlane:
    """The closed half-plane ``a*x + b*y <= c``."""

    a: object
    b: object
    c: object

    @classmethod
    def left_of(cls, p: Point, q: Point) -> "HalfPlane":
        # left of the directed line p -> q
        dx, dy = q[0] - p[0], q[1] - p[1]
        return cls(dy, -dx, dy * p[0] - dx * p[1])

    def value(self, p: Point):
        return self.c - self.a * p[0] - self.b * p[1]


def _clean(verts: list) -> list:
    """Drop repeated and collinear vertices of a convex cycle."""
    out: list = []
    for v in verts:
        if not out or out[-1] != v:
            out.append(v)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    changed = True
    while changed and len(out) >= 3:
        changed = False
        n = len(out)
        for i in range(n):
            if orient(out[i - 1], out[i], out[(i + 1) % n]) == 0:
                del out[i]
                changed = True
                break
    return out


class ConvexPolygon:
    """A strictly convex polygon with positive area."""

    __slots__ = ("vertices", "_bbox", "_hash")

    def __init__(self, vertices: Iterable[Sequence], *, check: bool = True):
        verts = [tuple(v) if type(v[0]) is type(_ZERO) else point(*v) for v in vertices]
        if check:
            verts = _clean(verts)
            if len(verts) < 3:
                raise ValueError("polygon needs at least three non-collinear vertices")
            if _signed_area2(verts) < 0:
                verts.reverse()
            n = len(verts)
            for i in range(n):
                if orient(verts[i - 1], verts[i], verts[(i + 1) % n]) <= 0:
                    raise ValueError("polygon is not strictly convex")
        k = min(range(len(verts)), key=verts.__getitem__)
        self.vertices = tuple(verts[k:] + verts[:k])
        self._bbox = None
        self._hash = None

    # -- basic measures -------------------------------------------------
    def area(self):
        return _signed_area2(self.vertices) / 2

    def bbox(self):
        if self._bbox is None:
            xs = [v[0] for v in self.vertices]
            ys = [v[1] for v in self.vertices]
            self._bbox = (min(xs), min(ys), max(xs), max(ys))
        return self._bbox

    def edges(self):
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def centroid(self):
        # vertex average: interior for convex polygons, cheap and exact
        n = len(self.vertices)
        return (sum(v[0] for v in self.vertices) / n, sum(v[1] for v in self.vertices) / n)

    def halfplanes(self):
        return [HalfPlane.left_of(p, q) for p, q in self.edges()]

    # -- predicates -----------------------------------------------------
    def locate(self, p: Point) -> int:
        """1 if ``p`` is interior, 0 on the boundary, -1 outside."""
        sign = 1
        for e0, e1 in self.edges():
            o = orient(e0, e1, p)
            if o < 0:
                return -1
            if o == 0:
                sign = 0
        return sign

    def contains_polygon(self, other: "ConvexPolygon") -> bool:
        return all(self.locate(v) >= 0 for v in other.vertices)

    # -- transforms -----------------------------------------------------
    def translate(self, dx, dy) -> "ConvexPolygon":
        return ConvexPolygon([(x + dx, y + dy) for x, y in self.vertices], check=False)

    def transform(self, matrix, translation) -> "ConvexPolygon":
        a, b, c, d = matrix
        tx, ty = translation
        pts = [(a * x + b * y + tx, c * x + d * y + ty) for x, y in self.vertices]
        if a * d - b * c < 0:
            pts.reverse()
        return ConvexPolygon(pts, check=False)

    # -- protocol -------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, ConvexPolygon) and self.vertices == other.vertices

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.vertices)
        return self._hash

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        body = ", ".join(f"({x}, {y})" for x, y in self.vertices)
        return f"ConvexPolygon([{body}])"


def rectangle(x0, y0, x1, y1) -> ConvexPolygon:
    return ConvexPolygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


def _signed_area2(verts):
    s = _ZERO
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s


def _clip_vertices(verts, hp: HalfPlane) -> list:
    a, b, c = hp.a, hp.b, hp.c
    vals = [c - a * x - b * y for x, y in verts]
    if all(v >= 0 for v in vals):
        return list(verts)
    if all(v <= 0 for v in vals):
        return []
    out = []
    n = len(verts)
    for i in range(n):
        p, vp = verts[i], vals[i]
        q, vq = verts[(i + 1) % n], vals[(i + 1) % n]
        if vp >= 0:
            out.append(p)
        if (vp > 0 and vq < 0) or (vp < 0 and vq > 0):
            t = vp / (vp - vq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def _finish(verts) -> ConvexPolygon | None:
    verts = _clean(verts)
    if len(verts) < 3 or _signed_area2(verts) == 0:
        return None
    return ConvexPolygon(verts, check=False)


def clip_polygon(poly: ConvexPolygon, halfplane: HalfPlane) -> ConvexPolygon | None:
    """``poly`` intersected with a closed half-plane; ``None`` if the area is zero."""
    verts = _clip_vertices(poly.vertices, halfplane)
    if len(verts) == len(poly.vertices) and verts == list(poly.vertices):
        return poly
    return _finish(verts)


def _bbox_overlap(p: ConvexPolygon, q: ConvexPolygon) -> bool:
    a = p.bbox()
    b = q.bbox()
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


def intersect_polygons(p: ConvexPolygon, q: ConvexPolygon) -> ConvexPolygon | None:
    """Exact intersection of two convex polygons; ``None`` when it has no area."""
    if not _bbox_overlap(p, q):
        return None
    verts = list(p.vertices)
    qv = q.vertices
    n = len(qv)
    for i in range(n):
        verts = _clip_vertices(verts, HalfPlane.left_of(qv[i], qv[(i + 1) % n]))
        if len(verts) < 3:
            return None
    return _finish(verts)


def point_on_segment(p: Point, a: Point, b: Point, *, strict: bool = False) -> bool:
    """Whether ``p`` lies on the closed segment ab (relative interior if ``strict``)."""
    if orient(a, b, p) != 0:
        return False
    lo_x, hi_x = (a[0], b[0]) if a[0] <= b[0] else (b[0], a[0])
    lo_y, hi_y = (a[1], b[1]) if a[1] <= b[1] else (b[1], a[1])
    if not (lo_x <= p[0] <= hi_x and lo_y <= p[1] <= hi_y):
        return False
    if strict and (p == a or p == b):
        return False
    return True


def segment_intersection(s: Segment, t: Segment):
    """Classify the intersection of two closed segments.

    Returns ``None`` (disjoint), a point tuple, or a :class:`Segment` for a
    collinear overlap of positive length.
    """
    p, r = s.a, (s.b[0] - s.a[0], s.b[1] - s.a[1])
    q, u = t.a, (t.b[0] - t.a[0], t.b[1] - t.a[1])
    denom = cross(r[0], r[1], u[0], u[1])
    qp = (q[0] - p[0], q[1] - p[1])
    if denom == 0:
        if cross(qp[0], qp[1], r[0], r[1]) != 0:
            return None
        # collinear: project onto r
        rr = r[0] * r[0] + r[1] * r[1]
        t0 = (qp[0] * r[0] + qp[1] * r[1]) / rr
        t1 = t0 + (u[0] * r[0] + u[1] * r[1]) / rr
        lo, hi = max(min(t0, t1), _ZERO), min(max(t0, t1), mpq(1))
        if lo > hi:
            return None
        a = (p[0] + lo * r[0], p[1] + lo * r[1])
        if lo == hi:
            return a
        return Segment(a, (p[0] + hi * r[0], p[1] + hi * r[1]))
    ts = cross(qp[0], qp[1], u[0], u[1]) / denom
    tu = cross(qp[0], qp[1], r[0], r[1]) / denom
    if 0 <= ts <= 1 and 0 <= tu <= 1:
        return (p[0] + ts * r[0], p[1] + ts * r[1])
    return None


def merge_collinear(segments: Iterable[Segment]) -> list[Segment]:
    """Union of segments, merging collinear pieces that overlap or touch."""
    groups: dict = {}
    for seg in segments:
        (x0, y0), (x1, y1) = seg.a, seg.b
        dx, dy = x1 - x0, y1 - y0
        # normalize the supporting line a*x + b*y = c with a primitive direction
        if dx < 0 or (dx == 0 and dy < 0):
            dx, dy = -dx, -dy
        if dx != 0:
            key = ("s", dy / dx, y0 - dy / dx * x0)
            lo, hi = (x0, x1) if x0 <= x1 else (x1, x0)
        else:
            key = ("v", x0)
            lo, hi = (y0, y1) if y0 <= y1 else (y1, y0)
        groups.setdefault(key, []).append((lo, hi))
    out = []
    for key, spans in groups.items():
        spans.sort()
        merged = [list(spans[0])]
        for lo, hi in spans[1:]:
            if lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        for lo, hi in merged:
            if key[0] == "s":
                m, c = key[1], key[2]
                out.append(Segment((lo, m * lo + c), (hi, m * hi + c)))
            else:
                out.append(Segment((key[1], lo), (key[1], hi)))
    out.sort(key=lambda s: (s.a, s.b))
    return out


def convex_hull(points) -> ConvexPolygon:
    """Convex hull (Andrew's monotone chain) of a finite point set."""
    pts = sorted(set(points))
    if len(pts) < 3:
        raise ValueError("hull of fewer than three points")

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and orient(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower, upper = half(pts), half(reversed(pts))
    return ConvexPolygon(lower[:-1] + upper[:-1])
