from itertools import permutations

import pytest
from gmpy2 import mpq

from polyexchange.cube import build_cube_section_exchange
from polyexchange.exchange import language
from polyexchange.prism import (
    BASES,
    CodingKind,
    PrismLanguage,
    PrismModel,
    UnsupportedBase,
    build_prism_exchange,
    certify_prism_direction,
    coding_projection,
    corollary_check,
    diagonal_bounds,
    measure_C,
    prism_complexity,
    stabilization_check,
)

OMEGA = (mpq(104729, 1000003), mpq(224737, 1000003), mpq(350377, 1000003))
NMAX = 12


@pytest.fixture(scope="module", params=sorted(BASES))
def lang(request):
    return PrismLanguage(build_prism_exchange(PrismModel(request.param), OMEGA))


def test_unknown_base():
    with pytest.raises(UnsupportedBase):
        PrismModel("pentagon")
    with pytest.raises(ValueError):
        PrismModel("square", 0)


def test_coding_aliases():
    assert CodingKind.parse("M''") is CodingKind.M2
    with pytest.raises(ValueError):
        CodingKind.parse("M3")


def test_exchange_is_a_translation_exchange(lang):
    ex = lang.px.exchange
    ex.validate()
    assert all(c.is_translation for c in ex.cells)
    assert lang.px.b == len(ex.cells)


def test_codings_are_nested(lang):
    px = lang.px
    for n in (1, 2, 5):
        for w in lang.table("M2", n).words[n]:
            w1 = coding_projection(px, w, "M2", "M1")
            assert w1 in lang.table("M1", n)
            assert coding_projection(px, w1, "M1", "M") in lang.table("M", n)


def test_chain_of_complexities(lang):
    c = measure_C(lang)
    t = {k: lang.table(k, NMAX + c) for k in ("M", "M1", "M2")}
    for n in range(1, NMAX + 1):
        assert t["M"].p(n) <= t["M1"].p(n) <= t["M2"].p(n) <= t["M1"].p(n + c)


def test_C_is_one(lang):
    assert measure_C(lang) == 1


def test_corollary(lang):
    rep = corollary_check(lang.px.model, OMEGA, NMAX, lang=lang)
    assert rep.passed and rep.b == lang.px.b
    assert rep.first_left_violation is None and rep.first_right_violation is None


def test_bounds_have_positive_N(lang):
    rep = diagonal_bounds(lang.px.model, OMEGA, NMAX, lang=lang)
    assert rep.N_min >= 1
    assert rep.vertical_per_edge_max == 1
    assert rep.ratio_min <= rep.ratio_max


def test_projection_errors():
    px = build_prism_exchange(PrismModel("hexagon"), OMEGA)
    with pytest.raises(ValueError, match="does not refine"):
        coding_projection(px, (), "M", "M2")
    with pytest.raises(ValueError, match="unknown letter"):
        coding_projection(px, ("nope",), "M1", "M")


@pytest.mark.parametrize(
    "base,m", [("half-square", 9), ("equilateral", 10), ("hexagon", 11), ("half-equilateral", 13)]
)
def test_stabilization(base, m):
    rep = stabilization_check(PrismModel(base), OMEGA, 15)
    assert rep.m == m and rep.lost == ()


def test_square_does_not_stabilize():
    # the mirror image of each face doubles the M1 count for good
    rep = stabilization_check(PrismModel("square"), OMEGA, 15)
    assert rep.m is None and rep.first_equal is None


def test_square_prism_is_the_cube():
    n = 20
    prism = prism_complexity(PrismModel("square"), OMEGA, "M", n)
    cube = language(build_cube_section_exchange(OMEGA)[0], n)
    assert prism.complexity() == cube.complexity() == [k * k + k + 1 for k in range(1, n + 1)]
    a, b = sorted({w[0] for w in prism.words[1]}), sorted({w[0] for w in cube.words[1]})
    matches = [
        sigma for sigma in permutations(b)
        if all({tuple(dict(zip(a, sigma))[x] for x in w) for w in prism.words[k]} == cube.words[k]
               for k in range(1, n + 1))
    ]
    assert len(matches) >= 1


def test_square_billiard_form():
    rep = corollary_check(PrismModel("square"), OMEGA, 10)
    assert list(rep.billiard_form) == [n * n + n + 1 for n in range(2, 2 + len(rep.billiard_form))]


def test_prism_direction_certified():
    for base in ("hexagon", "half-equilateral"):
        assert certify_prism_direction(PrismModel(base), OMEGA, 10).certified
