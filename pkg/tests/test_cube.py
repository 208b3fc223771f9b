import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from polyexchange.cube import (
    PI_CONTROL,
    PI_DIRECTION,
    PI_POINTS,
    Direction3,
    UncertifiedDirection,
    build_cube_section_exchange,
    certify_generic,
    certify_square_direction,
    combinatorial_length,
    construct_two_diagonals,
    counterexample,
    cube_complexity,
    lattice_diagonals,
    march_faces,
    section_point,
    square_billiard_exchange,
    verify_triple_edge_witness,
)
from polyexchange.exchange import cassaigne_delta, language, prop1_complexity
from polyexchange.section import DegenerateDirection

from conftest import CUBE_OMEGA


def test_direction_parsing_and_reduction():
    d = Direction3.parse("1/2, 1/3,1/5")
    assert d.omega == (mpq(1, 2), mpq(1, 3), mpq(1, 5))
    pos, signs = Direction3.reduce((mpq(-1, 2), mpq(1, 3), mpq(-1, 5)))
    assert pos.omega == d.omega and signs == (-1, 1, -1)
    with pytest.raises(ValueError):
        Direction3((1, 0, 2))


def test_main_diagonal_is_degenerate():
    with pytest.raises(DegenerateDirection):
        build_cube_section_exchange((1, 1, 1))


def test_section_exchange_shape(cube_exchange):
    cube_exchange.validate()
    assert all(c.is_translation for c in cube_exchange.cells)
    assert cube_exchange.alphabet == ("1", "2", "3")
    assert language(cube_exchange, 1).p(1) == 3


# -- certificates -------------------------------------------------------------------


def test_main_diagonal_fails_at_horizon_one():
    cert = certify_generic((1, 1, 1), 1)
    assert not cert.passed
    assert cert.failure()["check"] == "parallel_edge"


@pytest.mark.parametrize("omega", [(2, 2, 3), (5, 3, 3), (1, 7, 1)])
def test_two_equal_components_fail_parallel_edge(omega):
    cert = certify_generic(omega, 2)
    assert not cert.passed
    assert cert.to_dict()["parallel_edge_check"] != "pass"


def test_prime_direction_passes(cube_exchange):
    assert certify_generic(CUBE_OMEGA, 30).passed


@given(st.integers(1, 30))
@settings(max_examples=10, deadline=None)
def test_certificate_is_monotone_in_horizon(h):
    om = (mpq(3, 17), mpq(5, 17), mpq(7, 17))
    if certify_generic(om, h).passed:
        assert all(certify_generic(om, k).passed for k in range(1, h))


# -- complexity -----------------------------------------------------------------------


def test_small_counts():
    rep = cube_complexity(CUBE_OMEGA, 10)
    assert rep.p[:2] == [3, 7] and rep.p[9] == 111
    assert rep.theorem_ok
    assert set(rep.to_dict()) == {"omega", "horizon", "certificate", "p", "N", "theorem_ok"}


def test_uncertified_direction_refused():
    with pytest.raises(UncertifiedDirection):
        cube_complexity((mpq(1, 2), mpq(1, 3), mpq(1, 6)), 5)


def test_short_period_direction_falls_below():
    rep = cube_complexity((mpq(1, 2), mpq(1, 3), mpq(1, 6)), 30, force=True, diagonals=False)
    assert not rep.theorem_ok
    assert any(p < n * n + n + 1 for n, p in enumerate(rep.p, 1))


def test_second_difference_and_closed_form(cube_exchange):
    lang = language(cube_exchange, 14)
    for n in range(1, 13):
        assert cassaigne_delta(lang, n) == 2
    for n in range(3, 15):
        assert prop1_complexity(3, 7, [2] * n, n) == n * n + n + 1 == lang.p(n)


def test_octant_mirror_keeps_language(cube_exchange):
    base = language(cube_exchange, 6)
    for signs in ((-1, 1, 1), (1, 1, -1), (-1, -1, 1)):
        om = tuple(s * w for s, w in zip(signs, CUBE_OMEGA))
        mirrored = language(build_cube_section_exchange(om)[0], 6)
        assert all(mirrored.words[n] == base.words[n] for n in range(1, 7))


def test_section_orbits_match_ray_marching(cube_exchange):
    rng = random.Random(1)
    for _ in range(100):
        face = rng.randrange(3)
        u = [mpq(rng.randrange(1, 10**6), 10**6) for _ in range(3)]
        u[face] = mpq(0)
        assert march_faces(u, CUBE_OMEGA, 50) == cube_exchange.code_orbit(section_point(u, CUBE_OMEGA), 50)


# -- the two diagonals ------------------------------------------------------------------


def test_two_diagonals_against_lattice_search():
    oracle = lattice_diagonals(CUBE_OMEGA, 30)
    for n in range(1, 31):
        pair = construct_two_diagonals(CUBE_OMEGA, n)
        assert len(pair) == 2
        for d in pair:
            assert d.length == n == combinatorial_length(d.start, d.end)
            assert d.start_type != d.end_type
            delta = [e - s for s, e in zip(d.start, d.end)]
            ratio = delta[0] / CUBE_OMEGA[0]
            assert ratio > 0 and all(x == ratio * w for x, w in zip(delta, CUBE_OMEGA))
        assert sorted(pair, key=lambda d: (d.start_type, d.end_type)) == list(pair)
        assert list(pair) == sorted(oracle[n], key=lambda d: (d.start_type, d.end_type))


def test_combinatorial_length_counts_planes():
    # from (0,0,0) to (2, 1/2, 1/2): crosses x = 1 once
    assert combinatorial_length((0, 0, 0), (2, mpq(1, 2), mpq(1, 2))) == 2


# -- the triple-edge witness -----------------------------------------------------------


def test_pi_witness_is_collinear():
    v = verify_triple_edge_witness(PI_DIRECTION, PI_POINTS, precision=128)
    assert v.collinear and v.distinct_types and v.in_range and v.ok
    assert sorted(v.edge_types) == [1, 2, 3]


def test_perturbed_control_fails():
    v = verify_triple_edge_witness(PI_DIRECTION, PI_CONTROL, precision=128)
    assert not v.collinear and not v.ok


def test_counterexample_report():
    assert counterexample(128)["ok"]


def test_rational_direction_has_no_triple_line():
    # a certified direction has no three-type line within reach
    assert certify_generic(CUBE_OMEGA, 12).to_dict()["triple_edge_check"] == "pass"


# -- the square -------------------------------------------------------------------------


def test_square_is_sturmian():
    ex = square_billiard_exchange((18446744073709551557, 12345678910111213141), horizon=100)
    lang = language(ex, 40)
    assert lang.complexity() == [n + 1 for n in range(1, 41)]


def test_square_short_period_refused():
    assert not certify_square_direction((2, 3), 10).passed
    with pytest.raises(UncertifiedDirection):
        square_billiard_exchange((2, 3), horizon=10)
