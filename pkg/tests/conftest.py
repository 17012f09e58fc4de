import random

import pytest
from hypothesis import HealthCheck, settings

from aspolylog.cinf import CInf
from aspolylog.context import precision
from aspolylog.ffield import FieldTower

settings.register_profile("desk", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("desk")

QS = (2, 3, 4, 5)


@pytest.fixture(autouse=True)
def _window():
    with precision(cap=64, rho=1):
        yield


@pytest.fixture(params=QS, ids=lambda q: f"q{q}")
def tower(request):
    return FieldTower.for_q(request.param)


def rand_cinf(tw, rng, lo, hi, density=1.0):
    """Random element with F_q digits on integer exponents lo..hi."""
    from aspolylog.aschreier import fq_elements

    elems = list(fq_elements(tw))
    c = CInf.zero(tw)
    for j in range(lo, hi + 1):
        if rng.random() <= density:
            c = c + CInf.const(tw, elems[rng.randrange(len(elems))]) * CInf.theta(tw, j)
    return c


@pytest.fixture
def rng():
    return random.Random(12345)


# acceptance bookkeeping: one PASS/FAIL line per criterion in the terminal summary

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion implemented by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": 0, "failed": 0})
    entry["passed" if rep.passed else "failed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        verdict = "PASS" if e["failed"] == 0 and e["passed"] > 0 else "FAIL"
        terminalreporter.write_line(
            f"criterion {number:2d} {verdict}  {e['title']} ({e['passed']} passed, {e['failed']} failed)")
