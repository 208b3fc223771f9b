"""Right prisms over tiling polygons.

A prism ``B x [0, h]`` over a polygon ``B`` whose side reflections tile the
plane unfolds to a straight-line flow through reflected copies of ``B``.
Modulo the translations in the reflection group there are finitely many
copies, one per linear part, and the vertical direction has period ``h``
(top and bottom identified) or ``2h`` (two mirrored layers). The return map
to all faces is then built by :func:`polyexchange.section.build_section`.

Triangular-lattice bases use skew coordinates in which the lattice is
``Z^2``; straight lines, convexity and the coding are unchanged by this
linear change of variables, and directions are given in the same
coordinates.

Three codings are compared:

``M``
    the face of ``B x [0, h]`` that is hit (parallel faces optionally share
    a letter);
``M1`` (M')
    the face of ``Q`` that is hit, ``Q`` being the union of the copies with
    translated copies of a face identified (one letter per face of ``Q``);
``M2`` (M'')
    the natural coding of the exchange, one letter per cell.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from gmpy2 import mpq

from .core import as_rational, format_rational
from .exchange import LanguageTable, Refinement, generalized_diagonals, idoc2_certify, prop1_complexity
from .section import Copy3, DegenerateDirection, Face3, build_section

__all__ = [
    "BASES",
    "BoundsReport",
    "CodingKind",
    "CorollaryReport",
    "PrismExchange",
    "PrismLanguage",
    "PrismModel",
    "Stabilization",
    "UnsupportedBase",
    "build_prism_exchange",
    "certify_prism_direction",
    "coding_projection",
    "corollary_check",
    "diagonal_bounds",
    "measure_C",
    "prism_complexity",
    "stabilization_check",
]

_h = mpq(1, 2)
_SQUARE_GRAM = (mpq(1), mpq(0), mpq(1))
_TRI_GRAM = (mpq(1), _h, mpq(1))  # basis (1, 0), (1/2, sqrt(3)/2)


def _pts(*coords):
    return tuple((mpq(x), mpq(y)) for x, y in coords)


# vertices (ccw, skew coordinates) and the Gram matrix (g11, g12, g22) of the coordinates
BASES = {
    "square": (_pts((0, 0), (1, 0), (1, 1), (0, 1)), _SQUARE_GRAM),
    "half-square": (_pts((0, 0), (1, 0), (1, 1)), _SQUARE_GRAM),
    "equilateral": (_pts((0, 0), (1, 0), (0, 1)), _TRI_GRAM),
    "half-equilateral": (_pts((0, 0), (_h, 0), (0, 1)), _TRI_GRAM),
    "hexagon": (_pts((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)), _TRI_GRAM),
}


class UnsupportedBase(ValueError):
    pass


class CodingKind(str, enum.Enum):
    M = "M"
    M1 = "M1"
    M2 = "M2"

    @classmethod
    def parse(cls, text) -> "CodingKind":
        if isinstance(text, cls):
            return text
        alias = {"M'": "M1", "M''": "M2"}
        try:
            return cls(alias.get(text, text))
        except ValueError:
            raise ValueError(f"unknown coding {text!r} (expected M, M1 or M2)") from None


_RANK = {CodingKind.M: 0, CodingKind.M1: 1, CodingKind.M2: 2}


@dataclass(frozen=True)
class PrismModel:
    base: str
    height: object = 1

    def __post_init__(self):
        if self.base not in BASES:
            raise UnsupportedBase(f"unsupported base {self.base!r}; choose from {sorted(BASES)}")
        h = as_rational(self.height)
        if h <= 0:
            raise ValueError("height must be positive")
        object.__setattr__(self, "height", h)

    @property
    def vertices(self):
        return BASES[self.base][0]

    @property
    def gram(self):
        return BASES[self.base][1]

    def to_dict(self) -> dict:
        return {"base": self.base, "height": format_rational(self.height)}


# -- the reflection group -------------------------------------------------------


def _dot(g, u, v):
    return g[0] * u[0] * v[0] + g[1] * (u[0] * v[1] + u[1] * v[0]) + g[2] * u[1] * v[1]


def _reflection(gram, p, q):
    """Affine reflection in the line ``pq`` for the metric ``gram``: ``(matrix, translation)``."""
    d = (q[0] - p[0], q[1] - p[1])
    dd = _dot(gram, d, d)
    # x -> 2 <x,d>/<d,d> d - x, columns are images of the basis vectors
    cols = []
    for e in ((mpq(1), mpq(0)), (mpq(0), mpq(1))):
        k = 2 * _dot(gram, e, d) / dd
        cols.append((k * d[0] - e[0], k * d[1] - e[1]))
    m = (cols[0][0], cols[1][0], cols[0][1], cols[1][1])
    mp = (m[0] * p[0] + m[1] * p[1], m[2] * p[0] + m[3] * p[1])
    return m, (p[0] - mp[0], p[1] - mp[1])


def _compose(outer, inner):
    (a, b, c, d), (tx, ty) = outer
    (e, f, g, h), (ux, uy) = inner
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h), (
        a * ux + b * uy + tx,
        c * ux + d * uy + ty,
    )


def _apply(aff, p):
    (a, b, c, d), (tx, ty) = aff
    return (a * p[0] + b * p[1] + tx, c * p[0] + d * p[1] + ty)


def _copies(verts, gram, limit=64):
    """One group element per linear part, found breadth first from the identity.

    Copy ``g`` is the polygon ``g(B)``; its side ``i`` is ``g`` of side ``i``
    of ``B``. Returns the list of elements and, for every copy and side, the
    copy across that side with the lattice translation relating it to its
    representative.
    """
    n = len(verts)
    refl = [_reflection(gram, verts[i], verts[(i + 1) % n]) for i in range(n)]
    ident = ((mpq(1), mpq(0), mpq(0), mpq(1)), (mpq(0), mpq(0)))
    reps = {ident[0]: ident}
    order = [ident[0]]
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for r in refl:
            h = _compose(g, r)
            if h[0] not in reps:
                reps[h[0]] = h
                order.append(h[0])
                queue.append(h)
                if len(reps) > limit:
                    raise UnsupportedBase("reflection group is not finite modulo translations")
    elements = [reps[m] for m in order]
    index = {m: i for i, m in enumerate(order)}
    across = []
    for g in elements:
        row = []
        for r in refl:
            h = _compose(g, r)
            j = index[h[0]]
            t = reps[h[0]][1]
            row.append((j, (h[1][0] - t[0], h[1][1] - t[1])))
        across.append(row)
    return elements, across


def _parallel_classes(verts):
    n = len(verts)
    dirs = []
    for i in range(n):
        p, q = verts[i], verts[(i + 1) % n]
        dirs.append((q[0] - p[0], q[1] - p[1]))
    cls = []
    for i, d in enumerate(dirs):
        for j in range(i):
            e = dirs[j]
            if d[0] * e[1] - d[1] * e[0] == 0:
                cls.append(cls[j])
                break
        else:
            cls.append(len(set(cls)))
    return cls


# -- the exchange -----------------------------------------------------------------


@dataclass
class PrismExchange:
    """The section exchange of a prism with its three labelings (one entry per cell)."""

    model: PrismModel
    omega: tuple
    exchange: object
    meta: list
    labels_m: tuple
    labels_m1: tuple
    identify_parallel: bool
    copies: int

    @property
    def b(self) -> int:
        return len(self.exchange.cells)

    def labels(self, kind) -> tuple:
        kind = CodingKind.parse(kind)
        if kind is CodingKind.M:
            return self.labels_m
        if kind is CodingKind.M1:
            return self.labels_m1
        return tuple(c.label for c in self.exchange.cells)

    def coded(self, kind):
        """The exchange relabeled by a coding."""
        labels = self.labels(kind)
        return self.exchange.relabel(lambda i: labels[i])


def build_prism_exchange(model: PrismModel, omega, *, identify_parallel: bool = True) -> PrismExchange:
    """The section exchange of the prism flow in direction ``omega`` (skew coordinates for lattices)."""
    om = tuple(as_rational(w) for w in omega)
    if len(om) != 3 or any(w <= 0 for w in om):
        raise DegenerateDirection("direction components must be positive")
    verts, gram = model.vertices, model.gram
    h = model.height
    n = len(verts)
    elements, across = _copies(verts, gram)
    layers = 1 if identify_parallel else 2
    classes = _parallel_classes(verts)

    copies = []
    for ci, g in enumerate(elements):
        poly = [_apply(g, v) for v in verts]
        flipped = g[0][0] * g[0][3] - g[0][1] * g[0][2] < 0
        ring = poly[::-1] if flipped else poly
        for layer in range(layers):
            faces = []
            for i in range(n):
                p, q = poly[i], poly[(i + 1) % n]
                if flipped:
                    p, q = q, p
                normal = (q[1] - p[1], p[0] - q[0], mpq(0))  # outward for a ccw edge p -> q
                j, lam = across[ci][i]
                nbr = (j * layers + layer, (lam[0], lam[1], mpq(0)))
                fv = ((p[0], p[1], mpq(0)), (q[0], q[1], mpq(0)), (q[0], q[1], h), (p[0], p[1], h))
                faces.append(Face3(("side", i), fv, normal, nbr))
            up = ci * layers + (layer + 1) % layers
            down = ci * layers + (layer - 1) % layers
            bottom = tuple((x, y, mpq(0)) for x, y in ring)
            top = tuple((x, y, h) for x, y in ring)
            faces.append(Face3(("bottom", layer), bottom, (mpq(0), mpq(0), mpq(-1)), (down, (0, 0, -h))))
            faces.append(Face3(("top", layer), top, (mpq(0), mpq(0), mpq(1)), (up, (0, 0, h))))
            copies.append(Copy3((ci, layer), tuple(faces)))

    def m_letter(key):
        kind, x = key
        if kind == "side":
            return f"s{classes[x] if identify_parallel else x}"
        if identify_parallel:
            return "z"
        # a mirrored layer sees the original top through its own bottom
        return "bot" if (kind == "bottom") == (x == 0) else "top"

    ex, meta = build_section(copies, om, lambda m: "c", topology="torus")
    width = len(str(len(meta)))
    labels2 = [f"c{i:0{width}d}" for i in range(len(meta))]
    ex = ex.relabel(lambda i: labels2[i])
    if not all(c.is_translation for c in ex.cells):
        raise AssertionError("prism exchange must consist of translations")
    labels_m = tuple(m_letter(m.near) for m in meta)
    # a face of Q is crossed in one sense only, so (copy, face) names it
    labels_m1 = tuple(f"{lm}/q{m.copy}{_key_tag(m.near)}" for lm, m in zip(labels_m, meta))
    return PrismExchange(model, om, ex, meta, labels_m, labels_m1, identify_parallel, len(copies))


def _key_tag(key) -> str:
    kind, x = key
    return f"{kind[0]}{x}"


# -- complexity under the three codings --------------------------------------------


def _as_prism(model, omega, px=None):
    return px if px is not None else build_prism_exchange(model, omega)


class PrismLanguage:
    """One exact refinement of the natural exchange, read under any coding."""

    def __init__(self, px: PrismExchange, workers: int = 1):
        px.exchange.validate()
        self.px = px
        self.refinement = Refinement(px.exchange, workers)
        self._views = {CodingKind.M2: self.refinement}
        self._tables = {}

    def view(self, kind) -> Refinement:
        kind = CodingKind.parse(kind)
        if kind not in self._views:
            self._views[kind] = self.refinement.relabeled(self.px.coded(kind))
        return self._views[kind]

    def table(self, kind, nmax: int) -> LanguageTable:
        kind = CodingKind.parse(kind)
        ref = self.view(kind)
        t = self._tables.get(kind)
        if t is None:
            t = self._tables[kind] = LanguageTable({}, ref)
        return t.extend(nmax) if nmax > t.nmax else t

    def diagonals(self, kind, nmax: int):
        return generalized_diagonals(self.view(kind).exchange, nmax, refinement=self.view(kind))


def prism_complexity(model: PrismModel, omega, coding="M", nmax: int = 10, *, px=None,
                     workers: int = 1) -> LanguageTable:
    """Language of the prism flow under ``coding``, counted on the natural refinement."""
    return PrismLanguage(_as_prism(model, omega, px), workers).table(coding, nmax)


def coding_projection(px: PrismExchange, word, frm, to) -> tuple:
    """Letterwise image of a word under the coarsening ``frm -> to``.

    Every cell carries one letter in each coding, so a letter of a finer coding
    determines the coarser one; a letter seen under two images is an error.
    """
    frm, to = CodingKind.parse(frm), CodingKind.parse(to)
    if _RANK[frm] < _RANK[to]:
        raise ValueError(f"{frm.value} does not refine {to.value}")
    table = {}
    for a, b in zip(px.labels(frm), px.labels(to)):
        if table.setdefault(a, b) != b:
            raise ValueError(f"letter {a!r} has no single image in {to.value}")
    try:
        return tuple(table[x] for x in word)
    except KeyError as e:
        raise ValueError(f"unknown letter {e.args[0]!r} for coding {frm.value}") from None


def measure_C(lang: PrismLanguage, cmax: int = 8) -> int:
    """Smallest ``c`` such that an ``M1`` word of length ``c + 1`` fixes the cell of its first letter.

    Then a word of length ``n + c`` in ``M1`` determines the ``M2`` word of
    length ``n``, so ``p_M2(n) <= p_M1(n + c)``.
    """
    m1 = lang.px.labels(CodingKind.M1)
    for c in range(cmax + 1):
        first = {}
        ok = True
        for fc in lang.refinement.level(c + 1):
            key = tuple(m1[i] for i in fc.itinerary)
            if first.setdefault(key, fc.itinerary[0]) != fc.itinerary[0]:
                ok = False
                break
        if ok:
            return c
    raise RuntimeError(f"M1 does not determine the cells within {cmax} steps")


# -- bounds -------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundsReport:
    nmax: int
    coding: str
    N: tuple
    N_min: int
    N_max: int
    per_edge_max: int
    vertical_per_edge_max: int
    ratio_min: object
    ratio_max: object
    ratio_from: int
    b: int
    C: int
    copies: int
    N_ratio: tuple

    def to_dict(self) -> dict:
        return {
            "nmax": self.nmax,
            "coding": self.coding,
            "N": list(self.N),
            "N_min": self.N_min,
            "N_max": self.N_max,
            "per_edge_max": self.per_edge_max,
            "vertical_per_edge_max": self.vertical_per_edge_max,
            "ratio_min": format_rational(self.ratio_min),
            "ratio_max": format_rational(self.ratio_max),
            "ratio_from": self.ratio_from,
            "b": self.b,
            "C": self.C,
            "copies": self.copies,
            "N_ratio": [format_rational(r) for r in self.N_ratio],
        }


def diagonal_bounds(model: PrismModel, omega, nmax: int, *, coding="M", ratio_from: int = 5,
                    lang: PrismLanguage | None = None, workers: int = 1) -> BoundsReport:
    """Diagonal counts and ``p(n)/n^2`` bounds under ``coding``.

    ``N_ratio`` is the observed range of natural-exchange diagonals over
    ``coding`` diagonals. Per-edge maxima count diagonals sharing a start
    segment, once over all segments and once over images of vertical edges.
    """
    lang = lang or PrismLanguage(build_prism_exchange(model, omega), workers)
    kind = CodingKind.parse(coding)
    table = lang.table(kind, nmax)
    diag = lang.diagonals(kind, nmax)
    natural = diag if kind is CodingKind.M2 else lang.diagonals(CodingKind.M2, nmax)
    N = tuple(diag.counts())
    om = lang.px.omega

    def vertical(seg):
        return (seg.b[0] - seg.a[0]) * om[1] == (seg.b[1] - seg.a[1]) * om[0]

    per_edge = per_vertical = 0
    for ws in diag.witnesses.values():
        counts = {}
        for w in ws:
            counts[w.start_segment] = counts.get(w.start_segment, 0) + 1
        per_edge = max(per_edge, max(counts.values(), default=0))
        per_vertical = max(
            [per_vertical] + [k for si, k in counts.items() if vertical(diag.segments[si])]
        )
    lo = min(ratio_from, nmax)
    ratios = [mpq(table.p(n), n * n) for n in range(lo, nmax + 1)]
    nr = [mpq(a, b) for a, b in zip(natural.counts(), N) if b]
    return BoundsReport(
        nmax=nmax,
        coding=kind.value,
        N=N,
        N_min=min(N),
        N_max=max(N),
        per_edge_max=per_edge,
        vertical_per_edge_max=per_vertical,
        ratio_min=min(ratios),
        ratio_max=max(ratios),
        ratio_from=lo,
        b=lang.px.b,
        C=measure_C(lang),
        copies=lang.px.copies,
        N_ratio=(min(nr), max(nr)) if nr else (mpq(0), mpq(0)),
    )


@dataclass(frozen=True)
class CorollaryReport:
    """Evaluation of ``p_M(n) <= middle(n) <= p_M1(C + n)``.

    ``middle`` is the closed form built from the natural exchange (its
    ``p(1)``, ``p(2)`` and diagonal counts); ``exact`` tells whether it equals
    ``p_M2(n)``. ``billiard_form`` is the same closed form on the ``M`` coding
    with diagonal counts divided by the copy count.
    """

    nmax: int
    b: int
    C: int
    copies: int
    p_M: tuple
    p_M1: tuple
    middle: tuple
    exact: bool
    billiard_form: tuple
    first_left_violation: int | None
    first_right_violation: int | None

    @property
    def passed(self) -> bool:
        return self.first_left_violation is None and self.first_right_violation is None

    def to_dict(self) -> dict:
        return {
            "nmax": self.nmax,
            "b": self.b,
            "C": self.C,
            "copies": self.copies,
            "p_M": list(self.p_M),
            "p_M1": list(self.p_M1),
            "middle": list(self.middle),
            "exact": self.exact,
            "billiard_form": [format_rational(x) for x in self.billiard_form],
            "first_left_violation": self.first_left_violation,
            "first_right_violation": self.first_right_violation,
            "passed": self.passed,
        }


def corollary_check(model: PrismModel, omega, nmax: int, *, lang: PrismLanguage | None = None,
                    workers: int = 1) -> CorollaryReport:
    """Both inequalities of the quadratic sandwich for ``2 <= n <= nmax``."""
    if nmax < 2:
        raise ValueError("nmax must be at least 2")
    lang = lang or PrismLanguage(build_prism_exchange(model, omega), workers)
    C = measure_C(lang)
    t0 = lang.table(CodingKind.M, nmax)
    t1 = lang.table(CodingKind.M1, nmax + C)
    t2 = lang.table(CodingKind.M2, nmax)
    n2 = lang.diagonals(CodingKind.M2, max(nmax - 2, 1)).counts()
    n0 = lang.diagonals(CodingKind.M, max(nmax - 2, 1)).counts()
    copies = lang.px.copies
    middle, billiard, left, right = [], [], None, None
    for n in range(2, nmax + 1):
        if n == 2:
            mid, bf = t2.p(2), mpq(t0.p(2))
        else:
            mid = prop1_complexity(t2.p(1), t2.p(2), n2, n)
            bf = (2 - n) * t0.p(1) + (n - 1) * t0.p(2) + sum(
                mpq(n0[j - 1], copies) for i in range(2, n) for j in range(1, i)
            )
        middle.append(mid)
        billiard.append(bf)
        if left is None and t0.p(n) > mid:
            left = n
        if right is None and mid > t1.p(C + n):
            right = n
    return CorollaryReport(
        nmax=nmax,
        b=lang.px.b,
        C=C,
        copies=copies,
        p_M=tuple(t0.p(n) for n in range(2, nmax + 1)),
        p_M1=tuple(t1.p(C + n) for n in range(2, nmax + 1)),
        middle=tuple(middle),
        exact=all(m == t2.p(n) for n, m in zip(range(2, nmax + 1), middle)),
        billiard_form=tuple(billiard),
        first_left_violation=left,
        first_right_violation=right,
    )


@dataclass(frozen=True)
class Stabilization:
    m: int | None
    first_equal: int | None
    lost: tuple

    def to_dict(self) -> dict:
        return {"m": self.m, "first_equal": self.first_equal, "lost": list(self.lost)}


def stabilization_check(model: PrismModel, omega, nmax: int, *, lang: PrismLanguage | None = None,
                        workers: int = 1) -> Stabilization:
    """Smallest ``m`` with ``p_M(n) = p_M1(n)`` for ``m < n <= nmax``.

    ``lost`` lists lengths where equality held and then failed at the next
    length; the check reports this, it does not assume persistence.
    """
    lang = lang or PrismLanguage(build_prism_exchange(model, omega), workers)
    t0 = lang.table(CodingKind.M, nmax)
    t1 = lang.table(CodingKind.M1, nmax)
    eq = [t0.p(n) == t1.p(n) for n in range(1, nmax + 1)]
    first = next((n for n, e in enumerate(eq, 1) if e), None)
    lost = tuple(n for n in range(1, nmax) if eq[n - 1] and not eq[n])
    m = None
    if eq[-1]:
        m = nmax - 1
        while m >= 1 and eq[m - 1]:
            m -= 1
    return Stabilization(m, first, lost)


def certify_prism_direction(model: PrismModel, omega, horizon: int):
    """IDOC2 certificate of the prism exchange; a degenerate direction raises on construction."""
    px = build_prism_exchange(model, omega)
    return idoc2_certify(px.exchange, horizon)
