import random
from pathlib import Path

import pytest
from gmpy2 import mpq

from polyexchange.cube import build_cube_section_exchange
from polyexchange.exchange import torus_translation

FIXTURES = Path(__file__).parent / "fixtures"
CUBE_OMEGA = (mpq(104729, 1000003), mpq(224737, 1000003), mpq(350377, 1000003))


def random_translation_exchange(seed: int):
    """A torus translation cut by random grid lines, one letter per cell."""
    rng = random.Random(seed)

    def rq():
        return mpq(rng.randrange(1, 10**9), 10**9 + 7)

    ex = torus_translation(
        (rq(), rq()),
        x_cuts=sorted({rq() for _ in range(rng.randrange(0, 3))}),
        y_cuts=sorted({rq() for _ in range(rng.randrange(0, 2))}),
    )
    return ex.relabel(lambda i: f"c{i:02d}")


@pytest.fixture(scope="session")
def cube_exchange():
    return build_cube_section_exchange(CUBE_OMEGA)[0]


_VERDICTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    key = mark.args
    ok = rep.passed and _VERDICTS.get(key, True)
    _VERDICTS[key] = ok


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), ok in sorted(_VERDICTS.items()):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
