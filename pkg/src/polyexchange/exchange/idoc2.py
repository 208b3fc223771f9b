"""Finite-horizon certification of the IDOC2 condition.

Discontinuities (maximal interior cell-boundary segments) are pushed forward
under ``T`` and under ``T^-1`` for ``horizon`` steps. An image piece is split
wherever it crosses a cell boundary and each sub-piece follows its own cell's
isometry. Violations:

``overlap``
    an image piece runs along a discontinuity for positive length;
``vertex-incidence``
    an image piece passes through an endpoint of a discontinuity, or the
    image of such an endpoint lands inside a discontinuity.

Only endpoints of the maximal discontinuities count as vertices. Points
where a piece was split by a cell edge are ordinary points of a one-sided
image and are not tracked. Endpoint images landing on endpoints are
tolerated: for torus sections every endpoint is a copy of the same singular
corner, whose orbit stops there.

In a section chart one edge of the solid appears as several discontinuities
(where the flow meets it, where it leaves it, and on the seam), so an image
piece of ``a`` landing *inside* another discontinuity ``b`` is recorded as
``a -> b`` and followed no further: its future is the future of ``b``. A
partial collinear overlap, or a cycle of such records (an orbit returning
onto itself), is an ``overlap``.
Pieces and points on the outer boundary are seam copies and skip the vertex
checks.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from ..core import Segment, segment_intersection
from ..core.geometry import point_on_segment
from .diagonals import _segment_span
from .model import Exchange

__all__ = ["Idoc2Certificate", "idoc2_certify"]


@dataclass(frozen=True)
class Idoc2Certificate:
    horizon: int
    status: str
    witness: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    def to_dict(self) -> dict:
        return {"horizon": self.horizon, "status": self.status, "witness": _jsonable(self.witness)}


def _jsonable(obj):
    from ..core import format_rational

    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Segment):
        return [_jsonable(obj.a), _jsonable(obj.b)]
    if isinstance(obj, (int, str)) or obj is None:
        return obj
    return format_rational(obj)


class _Violation(Exception):
    def __init__(self, **info):
        super().__init__(info.get("kind"))
        self.info = info


def _seg_bbox(s):
    return (min(s.a[0], s.b[0]), min(s.a[1], s.b[1]), max(s.a[0], s.b[0]), max(s.a[1], s.b[1]))


def _bbox_hit(a, b):
    return not (a[0] > b[2] or b[0] > a[2] or a[1] > b[3] or b[1] > a[3])


class _Pusher:
    def __init__(self, ex: Exchange):
        self.ex = ex
        self.polys = [c.polygon for c in ex.cells]
        merged = ex.discontinuities()
        self.disc, self.whole = _split_at_junctions(merged)
        self.disc_bb = [_seg_bbox(s) for s in self.disc]
        self.boundary = [e for d in ex.domain for e in d.edges()]
        self.vertices = {
            v for d in self.disc for v in (d.a, d.b) if not self.on_boundary(v)
        }
        self.into = [set() for _ in self.disc]  # a -> b: an image of a landed inside b

    def on_boundary(self, p) -> bool:
        return any(point_on_segment(p, e0, e1) for e0, e1 in self.boundary)

    def reaches(self, src, dst) -> bool:
        seen, stack = set(), [src]
        while stack:
            x = stack.pop()
            if x == dst:
                return True
            if x not in seen:
                seen.add(x)
                stack.extend(self.into[x])
        return False

    def initial(self):
        """One-sided images of the discontinuities under the first step."""
        out = []
        for a, seg in enumerate(self.disc):
            for i, poly in enumerate(self.polys):
                for e0, e1 in poly.edges():
                    hit = segment_intersection(seg, Segment(e0, e1))
                    if isinstance(hit, Segment):
                        flags = (hit.a in self.vertices, hit.b in self.vertices)
                        out.append((a, self._map(i, hit), flags))
        return out


    def _map(self, i, seg):
        c = self.ex.cells[i]
        return Segment(c.apply(seg.a), c.apply(seg.b))

    def check(self, a, seg, flags, step) -> bool:
        """Validate one image piece; ``False`` if it was absorbed into another discontinuity."""
        bb = _seg_bbox(seg)
        on_seam = self.on_boundary(seg.a) and self.on_boundary(seg.b) and self.on_boundary(_at(seg, mpq(1, 2)))
        for b, d in enumerate(self.disc):
            if not _bbox_hit(bb, self.disc_bb[b]):
                continue
            hit = segment_intersection(seg, d)
            if isinstance(hit, Segment):
                w = self.whole[b]
                inside = point_on_segment(seg.a, w.a, w.b) and point_on_segment(seg.b, w.a, w.b)
                if not inside or self.reaches(b, a):
                    raise _Violation(kind="overlap", step=step, source=a, target=b, segment=hit)
                self.into[a].add(b)
                return False
            if on_seam:
                continue
            for end, tracked in zip((seg.a, seg.b), flags):
                if not tracked or end in self.vertices or self.on_boundary(end):
                    continue
                if point_on_segment(end, d.a, d.b, strict=True):
                    raise _Violation(kind="vertex-incidence", step=step, source=a, target=b, point=end)
        if not on_seam:
            for v in self.vertices:
                if point_on_segment(v, seg.a, seg.b, strict=True):
                    raise _Violation(kind="vertex-incidence", step=step, source=a, point=v)
        return True

    def push(self, seg, flags):
        """Split ``seg`` by the closed cells and map each piece.

        ``flags`` marks which ends are images of discontinuity endpoints.
        """
        out = []
        bb = _seg_bbox(seg)
        for i, poly in enumerate(self.polys):
            if not _bbox_hit(bb, poly.bbox()):
                continue
            span = _segment_span(seg, poly)
            if span is not None:
                lo, hi = span
                p = _at(seg, lo)
                q = _at(seg, hi)
                fa = flags[0] and lo == 0
                fb = flags[1] and hi == 1
                out.append((self._map(i, Segment(p, q)), (fa, fb)))
                continue
            # pieces running along the outer boundary of the domain
            for e0, e1 in poly.edges():
                hit = segment_intersection(seg, Segment(e0, e1))
                if isinstance(hit, Segment):
                    out.append((self._map(i, hit), (False, False)))
        return out


def _direction(seg):
    dx, dy = seg.b[0] - seg.a[0], seg.b[1] - seg.a[1]
    if dx < 0 or (dx == 0 and dy < 0):
        dx, dy = -dx, -dy
    return ("v",) if dx == 0 else ("s", dy / dx)


def _split_at_junctions(disc):
    """Cut each segment where discontinuities of two other directions meet it.

    Such a point is a corner of the partition rather than a plain crossing,
    so the segments through it are separate discontinuities. Also returns,
    per piece, the maximal segment it came from.
    """
    points = {p for d in disc for p in (d.a, d.b)}
    for i, d in enumerate(disc):
        for e in disc[i + 1:]:
            hit = segment_intersection(d, e)
            if isinstance(hit, tuple):
                points.add(hit)
    out, whole = [], []
    for d in disc:
        own = _direction(d)
        cuts = []
        for p in points:
            if not point_on_segment(p, d.a, d.b, strict=True):
                continue
            dirs = {_direction(e) for e in disc if point_on_segment(p, e.a, e.b)} - {own}
            if len(dirs) >= 2:
                cuts.append(p)
        ends = [d.a] + sorted(cuts, key=lambda p: (p[0] - d.a[0]) ** 2 + (p[1] - d.a[1]) ** 2) + [d.b]
        for u, v in zip(ends, ends[1:]):
            out.append(Segment(u, v))
            whole.append(d)
    return out, whole


def _at(seg, t):
    return (seg.a[0] + t * (seg.b[0] - seg.a[0]), seg.a[1] + t * (seg.b[1] - seg.a[1]))


def idoc2_certify(exchange: Exchange, horizon: int) -> Idoc2Certificate:
    """Check the IDOC2 condition for all exponents up to ``horizon`` in both directions."""
    for direction, ex in (("forward", exchange), ("backward", exchange.inverse())):
        pusher = _Pusher(ex)
        pieces = pusher.initial()
        try:
            for step in range(1, horizon + 1):
                live = [(a, seg, f) for a, seg, f in pieces if pusher.check(a, seg, f, step)]
                if step == horizon:
                    break
                pieces = [(a, s, g) for a, seg, f in live for s, g in pusher.push(seg, f)]
                pieces = sorted(set(pieces), key=lambda t: (t[0], t[1].a, t[1].b, t[2]))
        except _Violation as v:
            info = dict(v.info)
            info["direction"] = direction
            return Idoc2Certificate(horizon, "violated", info)
    return Idoc2Certificate(horizon, "certified")
