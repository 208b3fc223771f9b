from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from polyexchange.core import (
    BallScalar,
    ConvexPolygon,
    HalfPlane,
    IntervalDivisionError,
    Segment,
    SubdivisionCount,
    as_rational,
    clip_polygon,
    enclose,
    euler_faces,
    format_rational,
    intersect_polygons,
    parse_rational,
    point_on_segment,
    rectangle,
    segment_intersection,
)

UNIT = rectangle(0, 0, 1, 1)
rationals = st.fractions(min_value=-4, max_value=4, max_denominator=50)
unit_coord = st.fractions(min_value=0, max_value=1, max_denominator=40)


def q(x):
    return as_rational(Fraction(x)) if isinstance(x, Fraction) else as_rational(x)


# -- scalars -------------------------------------------------------------------------


def test_rational_round_trip():
    assert format_rational(mpq(6, -4)) == "-3/2"
    assert parse_rational(" -3/2 ") == mpq(-3, 2)
    assert format_rational(5) == "5/1"


@pytest.mark.parametrize("bad", ["", "1/0", "x", "1.5"])
def test_parse_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_rational(bad)


def test_floats_are_refused():
    with pytest.raises(TypeError):
        as_rational(0.5)


@given(rationals, rationals)
def test_exact_cancellation(a, b):
    assert (q(a) + q(b)) - q(b) == q(a)


# -- clipping -----------------------------------------------------------------------


def test_clip_axis_cut():
    half = clip_polygon(UNIT, HalfPlane(1, 0, mpq(1, 2)))  # x <= 1/2
    assert half == rectangle(0, 0, mpq(1, 2), 1)


def test_clip_containment_and_empty():
    assert clip_polygon(UNIT, HalfPlane(1, 0, 2)) == UNIT
    assert clip_polygon(UNIT, HalfPlane(1, 0, 0)) is None


def test_intersections_of_squares():
    assert intersect_polygons(UNIT, UNIT) == UNIT
    assert intersect_polygons(UNIT, UNIT.translate(1, 0)) is None
    quarter = intersect_polygons(UNIT, UNIT.translate(mpq(1, 2), mpq(1, 2)))
    assert quarter.area() == mpq(1, 4)


def test_canonical_vertex_order():
    p = ConvexPolygon([(1, 1), (0, 1), (0, 0), (1, 0)])
    assert p.vertices[0] == (0, 0)
    assert p == UNIT


def test_polygon_rejects_collinear_or_flat():
    with pytest.raises(ValueError):
        ConvexPolygon([(0, 0), (1, 0), (2, 0)])


@st.composite
def halfplanes(draw):
    a, b = draw(rationals), draw(rationals)
    if a == 0 and b == 0:
        a = Fraction(1)
    return HalfPlane(q(a), q(b), q(draw(rationals)))


@given(halfplanes())
def test_clip_is_exact_and_monotone(h):
    out = clip_polygon(UNIT, h)
    if out is None:
        return
    assert out.area() <= UNIT.area()
    assert all(h.value(v) >= 0 for v in out.vertices)
    assert all(UNIT.locate(v) >= 0 for v in out.vertices)


@st.composite
def boxes(draw):
    x0, y0 = draw(unit_coord), draw(unit_coord)
    w = draw(st.fractions(min_value=Fraction(1, 20), max_value=1, max_denominator=40))
    h = draw(st.fractions(min_value=Fraction(1, 20), max_value=1, max_denominator=40))
    return rectangle(q(x0), q(y0), q(x0 + w), q(y0 + h))


@given(boxes(), boxes(), boxes())
@settings(max_examples=60)
def test_intersection_commutes_and_associates(a, b, c):
    assert intersect_polygons(a, b) == intersect_polygons(b, a)
    ab = intersect_polygons(a, b)
    bc = intersect_polygons(b, c)
    left = intersect_polygons(ab, c) if ab else None
    right = intersect_polygons(a, bc) if bc else None
    assert left == right


# -- segments ------------------------------------------------------------------------


def test_segment_crossing():
    hit = segment_intersection(Segment((0, 0), (1, 1)), Segment((0, 1), (1, 0)))
    assert hit == (mpq(1, 2), mpq(1, 2))


def test_segment_parallel_disjoint():
    assert segment_intersection(Segment((0, 0), (1, 0)), Segment((0, 1), (1, 1))) is None


def test_segment_collinear_overlap():
    hit = segment_intersection(Segment((0, 0), (1, 0)), Segment((mpq(1, 2), 0), (2, 0)))
    assert isinstance(hit, Segment)
    assert {hit.a, hit.b} == {(mpq(1, 2), 0), (1, 0)}


def test_point_on_segment_strictness():
    assert point_on_segment((0, 0), (0, 0), (1, 1))
    assert not point_on_segment((0, 0), (0, 0), (1, 1), strict=True)


# -- Euler ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "V,E,topology,F",
    [(4, 5, "disk", 2), (5, 8, "disk", 4), (1, 2, "torus", 1)],
)
def test_euler_examples(V, E, topology, F):
    assert euler_faces(V, E, topology) == F


def test_euler_rejects_malformed():
    with pytest.raises(ValueError):
        euler_faces(5, 3)
    with pytest.raises(ValueError):
        SubdivisionCount(4, 5, 3)


def test_torus_loop_pair_by_brute_force():
    # loops x = 0 and y = x on the unit torus meet once (V=1, E=2)
    lower = clip_polygon(UNIT, HalfPlane(-1, 1, 0))
    upper = clip_polygon(UNIT, HalfPlane(1, -1, 0))
    # the edge x = 1 of the lower triangle is glued to x = 0 of the upper one
    right = {(0, v[1]) for v in lower.vertices if v[0] == 1}
    left = {v for v in upper.vertices if v[0] == 0}
    assert len(right & left) == 2
    # only the wrap-around gluing joins the two triangles: one face
    assert euler_faces(1, 2, "torus") == 1


def _chord(p1, p2):
    """The line through two points, as coefficients of ``a x + b y + c = 0``."""
    a = p2[1] - p1[1]
    b = p1[0] - p2[0]
    return a, b, -(a * p1[0] + b * p1[1])


def _arrangement_counts(lines):
    """Vertices and edges of the unit square cut by chords (general position assumed)."""
    boundary_pts = {(0, 0), (1, 0), (1, 1), (0, 1)}
    chords = []
    for a, b, c in lines:
        pts = set()
        for t in (UNIT.edges()):
            hit = segment_intersection(Segment(*t), _long_segment(a, b, c))
            if isinstance(hit, tuple):
                pts.add(hit)
        pts = sorted(pts)
        chords.append(Segment(pts[0], pts[-1]))
        boundary_pts.update(pts)
    interior = {}
    for i in range(len(chords)):
        for j in range(i + 1, len(chords)):
            hit = segment_intersection(chords[i], chords[j])
            if isinstance(hit, tuple) and hit not in boundary_pts:
                interior.setdefault(i, set()).add(hit)
                interior.setdefault(j, set()).add(hit)
    all_interior = set().union(*interior.values()) if interior else set()
    V = len(boundary_pts) + len(all_interior)
    E = len(boundary_pts) + sum(len(interior.get(i, ())) + 1 for i in range(len(chords)))
    return V, E


def _long_segment(a, b, c):
    if b != 0:
        return Segment((mpq(-10), (-c + 10 * a) / b), (mpq(10), (-c - 10 * a) / b))
    return Segment((-c / a, mpq(-10)), (-c / a, mpq(10)))


def _faces(lines):
    cells = [UNIT]
    for a, b, c in lines:
        nxt = []
        for cell in cells:
            for h in (HalfPlane(a, b, -c), HalfPlane(-a, -b, c)):
                piece = clip_polygon(cell, h)
                if piece is not None:
                    nxt.append(piece)
        cells = nxt
    return len(cells)


inner = st.fractions(min_value=Fraction(1, 50), max_value=Fraction(49, 50), max_denominator=97)


@st.composite
def chord_sets(draw):
    # chords joining the left and right sides, or the bottom and top
    k = draw(st.integers(1, 4))
    lines = []
    for _ in range(k):
        u, v = q(draw(inner)), q(draw(inner))
        if draw(st.booleans()):
            lines.append(_chord((mpq(0), u), (mpq(1), v)))
        else:
            lines.append(_chord((u, mpq(0)), (v, mpq(1))))
    return lines


@given(chord_sets())
@settings(max_examples=100, deadline=None)
def test_euler_matches_direct_face_count(lines):
    # skip configurations that are not in general position
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            a1, b1, _ = lines[i]
            a2, b2, _ = lines[j]
            if a1 * b2 - a2 * b1 == 0:
                return
    triples = [(i, j, k) for i in range(len(lines)) for j in range(i + 1, len(lines))
               for k in range(j + 1, len(lines))]
    if any(_concurrent(lines[i], lines[j], lines[k]) for i, j, k in triples):
        return
    V, E = _arrangement_counts(lines)
    assert _faces(lines) == euler_faces(V, E, "disk")


def _concurrent(l1, l2, l3):
    m = [[*l1], [*l2], [*l3]]
    det = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    return det == 0


# -- intervals -----------------------------------------------------------------------


def test_pi_enclosure():
    ball = BallScalar.pi(53)
    assert mpq(314159265358979, 10**14) < ball.lower < ball.upper < mpq(314159265358980, 10**14)
    assert ball.width < mpq(1, 2**50)


@pytest.mark.parametrize("expr", ["(6-pi)/(12-pi)", "1 - pi/6"])
def test_pi_expressions_in_unit_interval(expr):
    assert enclose(expr, 128).strictly_inside(0, 1)


def test_width_shrinks_with_precision():
    widths = [enclose("(6-pi)/(12-pi)", p).width for p in (53, 128, 256)]
    assert widths[0] > widths[1] > widths[2] > 0


def test_division_by_straddling_interval():
    with pytest.raises(IntervalDivisionError):
        enclose("1/(pi - pi)", 64)


small = st.integers(-30, 30)


@st.composite
def expressions(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        n = draw(small)
        return str(n), mpq(n)
    op = draw(st.sampled_from("+-*/"))
    ls, lv = draw(expressions(depth=depth - 1))
    rs, rv = draw(expressions(depth=depth - 1))
    if op == "/" and rv == 0:
        op = "+"
    val = {"+": lv + rv, "-": lv - rv, "*": lv * rv, "/": lv / rv if rv else None}[op]
    return f"({ls}){op}({rs})", val


@given(expressions(), st.sampled_from([53, 80, 200]))
@settings(max_examples=1000, deadline=None)
def test_interval_soundness(pair, prec):
    text, value = pair
    try:
        ball = enclose(text, prec)
    except IntervalDivisionError:
        return
    assert ball.contains(value)

