import os
import sys
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from schottky.bt_tree import TreeIsometry, pingpong_sets, schottky_check  # noqa: E402
from schottky.exact_arith import Matrix  # noqa: E402

DEMO_G1 = Matrix.diag(5, Fraction(1, 5))
DEMO_T = Matrix([[1, 1], [1, 2]])


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")
    config._criteria = {}


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    table = _config._criteria
    num, title = crit
    entry = table.setdefault(num, {"title": title, "ok": True, "tests": 0})
    if report.when == "call":
        entry["tests"] += 1
    if report.failed or (report.when == "call" and report.skipped):
        entry["ok"] = False


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result().criterion = tuple(mark.args)


_config = None


@pytest.hookimpl(tryfirst=True)
def pytest_sessionstart(session):
    global _config
    _config = session.config


def pytest_terminal_summary(terminalreporter, config):
    table = getattr(config, "_criteria", {})
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(table):
        e = table[num]
        status = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {status}  {e['title']} ({e['tests']} tests)")


@pytest.fixture(scope="session")
def demo_pair():
    g1 = TreeIsometry(DEMO_G1, 5, "g1")
    g2 = g1.conjugate(DEMO_T)
    return [g1, g2]


@pytest.fixture(scope="session")
def demo_sets(demo_pair):
    verdict = schottky_check(demo_pair)
    assert verdict.certified
    return pingpong_sets(demo_pair, verdict.domains)
