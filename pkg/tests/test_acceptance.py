"""The ten acceptance criteria at their stated tolerances.

Each test carries a ``criterion`` mark; the terminal summary prints one
PASS/FAIL line per criterion. Measured prism constants are pinned as
regression baselines.
"""
import time

import pytest
import sympy
from click.testing import CliRunner
from gmpy2 import mpq

from polyexchange.cli import main
from polyexchange.cube import (
    PI_CONTROL,
    PI_DIRECTION,
    PI_POINTS,
    certify_generic,
    cube_complexity,
    lattice_diagonals,
    square_billiard_exchange,
    verify_triple_edge_witness,
)
from polyexchange.exchange import (
    cassaigne_delta,
    generalized_diagonals,
    idoc2_certify,
    language,
    prop1_complexity,
    torus_translation,
)
from polyexchange.prism import (
    BASES,
    PrismLanguage,
    PrismModel,
    build_prism_exchange,
    corollary_check,
    diagonal_bounds,
    measure_C,
)

from conftest import CUBE_OMEGA, FIXTURES, random_translation_exchange

criterion = pytest.mark.criterion
PRISM_OMEGA = CUBE_OMEGA
OMEGA_TEXT = "104729/1000003,224737/1000003,350377/1000003"


def prime_direction(seed):
    """Three distinct 64-bit primes over a 65-bit prime."""
    sympy.core.random.seed(seed)
    ps = set()
    while len(ps) < 3:
        ps.add(sympy.randprime(2**63, 2**64))
    q = sympy.randprime(2**64, 2**65)
    return tuple(mpq(int(p), int(q)) for p in sorted(ps))


DIRECTIONS = [prime_direction(k) for k in range(5)]
_cube_reports = {}


def cube_report(k):
    if k not in _cube_reports:
        t = time.perf_counter()
        rep = cube_complexity(DIRECTIONS[k], 30)
        _cube_reports[k] = (rep, time.perf_counter() - t)
    return _cube_reports[k]


@criterion(1, "cube p(n) = n^2+n+1, n <= 30, 5 certified directions")
@pytest.mark.parametrize("k", range(5))
def test_cube_complexity(k):
    assert certify_generic(DIRECTIONS[k], 30).passed
    rep, elapsed = cube_report(k)
    assert rep.p == [n * n + n + 1 for n in range(1, 31)]
    assert elapsed < 120


@criterion(2, "cube N(n) = 2, n <= 30, engine and lattice oracle agree")
@pytest.mark.parametrize("k", range(5))
def test_cube_diagonals(k):
    t = time.perf_counter()
    rep, elapsed = cube_report(k)
    oracle = lattice_diagonals(DIRECTIONS[k], 30)
    assert rep.N == [len(oracle[n]) for n in range(1, 31)] == [2] * 30
    assert elapsed + time.perf_counter() - t < 120


def _prop1_fixtures():
    from polyexchange.cube import build_cube_section_exchange

    yield "cube", build_cube_section_exchange(CUBE_OMEGA)[0]
    for seed in (11, 12, 13):
        yield f"random-{seed}", random_translation_exchange(seed)


@criterion(3, "closed form equals direct refinement, 3 <= n <= 12")
@pytest.mark.parametrize("name,ex", list(_prop1_fixtures()), ids=lambda v: v if isinstance(v, str) else "")
def test_closed_form(name, ex):
    assert idoc2_certify(ex, 12).certified
    lang = language(ex, 12)
    N = generalized_diagonals(ex, 10, refinement=lang.refinement).counts()
    for n in range(3, 13):
        assert prop1_complexity(lang.p(1), lang.p(2), N, n) == lang.p(n)


def _enumerated_fixtures():
    from polyexchange.cube import build_cube_section_exchange

    yield "cube", build_cube_section_exchange(CUBE_OMEGA)[0], 20
    yield "square", square_billiard_exchange((18446744073709551557, 12345678910111213141)), 40
    yield "periodic", torus_translation((mpq(2, 5), mpq(1, 7)), x_cuts=(mpq(1, 2),)), 20
    for seed in (11, 12, 13):
        yield f"random-{seed}", random_translation_exchange(seed), 12
    for base in sorted(BASES):
        px = build_prism_exchange(PrismModel(base), PRISM_OMEGA)
        for kind in ("M", "M1", "M2"):
            yield f"{base}-{kind}", px.coded(kind), 10


@criterion(4, "bispecial sum equals the second difference")
@pytest.mark.parametrize("name,ex,nmax", list(_enumerated_fixtures()), ids=lambda v: v if isinstance(v, str) else "")
def test_cassaigne(name, ex, nmax):
    lang = language(ex, nmax)
    for n in range(1, nmax - 1):
        assert cassaigne_delta(lang, n) == lang.p(n + 2) - 2 * lang.p(n + 1) + lang.p(n)


@criterion(5, "pi witness certified at 128 bits, control fails, under 1 s")
def test_pi_witness():
    t = time.perf_counter()
    good = verify_triple_edge_witness(PI_DIRECTION, PI_POINTS, precision=128)
    bad = verify_triple_edge_witness(PI_DIRECTION, PI_CONTROL, precision=128)
    elapsed = time.perf_counter() - t
    assert good.ok and not bad.ok
    assert elapsed < 1


@criterion(6, "square billiard p(n) = n+1, n <= 100")
def test_sturmian():
    ex = square_billiard_exchange((18446744073709551557, 12345678910111213141), horizon=100)
    assert language(ex, 100).complexity() == [n + 1 for n in range(1, 101)]


# measured at PRISM_OMEGA, n <= 20: ratio bounds of p_M(n)/n^2 on 5 <= n <= 20, N range, b, C
PRISM_BASELINE = {
    "hexagon": dict(ratio=(mpq(138, 25), mpq(215, 24)), N=(12, 24), b=54, C=1),
    "half-equilateral": dict(ratio=(mpq(28, 5), mpq(1865, 169)), N=(16, 28), b=62, C=1),
}
_prism_clock = {}


@criterion(7, "prism bounds and corollary chain, n <= 20, under 10 min")
@pytest.mark.parametrize("base", sorted(PRISM_BASELINE))
def test_prism_bounds(base):
    t = time.perf_counter()
    model = PrismModel(base)
    assert idoc2_certify(build_prism_exchange(model, PRISM_OMEGA).exchange, 15).certified
    lang = PrismLanguage(build_prism_exchange(model, PRISM_OMEGA))
    bounds = diagonal_bounds(model, PRISM_OMEGA, 20, lang=lang)
    cor = corollary_check(model, PRISM_OMEGA, 20, lang=lang)
    _prism_clock[base] = time.perf_counter() - t
    want = PRISM_BASELINE[base]
    assert 0 < bounds.ratio_min <= bounds.ratio_max
    assert (bounds.ratio_min, bounds.ratio_max) == want["ratio"]
    assert bounds.N_min >= 1 and (bounds.N_min, bounds.N_max) == want["N"]
    assert cor.passed and (cor.b, cor.C) == (want["b"], want["C"])
    assert sum(_prism_clock.values()) < 600


@criterion(8, "p_M <= p_M1 <= p_M2 <= p_M1(C+n) on all prism fixtures")
@pytest.mark.parametrize("base", sorted(BASES))
def test_coding_chain(base):
    nmax = 14
    lang = PrismLanguage(build_prism_exchange(PrismModel(base), PRISM_OMEGA))
    c = measure_C(lang)
    t = {k: lang.table(k, nmax) for k in ("M", "M1", "M2")}
    for n in range(1, nmax - c + 1):
        assert t["M"].p(n) <= t["M1"].p(n) <= t["M2"].p(n) <= t["M1"].p(c + n)


@criterion(9, "(1,1,1) and two equal components rejected at horizon <= 2")
@pytest.mark.parametrize("omega", [(1, 1, 1), (1, 1, 2), (3, 5, 5), (mpq(1, 3), mpq(1, 2), mpq(1, 3))])
@pytest.mark.parametrize("horizon", [1, 2])
def test_degenerate_rejected(omega, horizon):
    cert = certify_generic(omega, horizon)
    assert not cert.passed
    assert cert.failure()["check"] == "parallel_edge"


SUITE = [
    ("cube", "--omega", OMEGA_TEXT, "--nmax", 30, "--emit-svg", "--counterexample"),
    ("exchange", FIXTURES / "cube_section.json", "--nmax", 12, "--horizon", 12),
    ("certify", "--omega", OMEGA_TEXT, "--horizon", 30),
    ("certify", "--omega", "18446744073709551557,12345678910111213141", "--horizon", 100),
    ("counterexample",),
] + [("prism", "--base", b, "--omega", OMEGA_TEXT, "--nmax", 10, "--horizon", 10, "--emit-svg") for b in sorted(BASES)]


def _run_suite(root, workers):
    for i, cmd in enumerate(SUITE):
        extra = ("--workers", workers) if cmd[0] in ("cube", "exchange", "prism") else ()
        r = CliRunner().invoke(main, [str(a) for a in (*cmd, *extra, "--out", root / f"{i:02d}-{cmd[0]}")])
        assert r.exit_code == 0, (cmd, r.output)
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@criterion(10, "byte-identical reports with 1 and 8 workers")
def test_determinism(tmp_path):
    one = _run_suite(tmp_path / "w1", 1)
    eight = _run_suite(tmp_path / "w8", 8)
    assert len(one) >= 20
    assert one == eight
