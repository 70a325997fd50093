import time

import pytest

from kakeya_conic.classify import SearchConfig, enumerate_all
from kakeya_conic.gf import field_of_order

_FULL_RUNS: dict[int, tuple] = {}


def full_run(q: int):
    """Unpruned enumeration for q <= 4, shared across test modules: (report, seconds)."""
    if q not in _FULL_RUNS:
        t0 = time.perf_counter()
        report = enumerate_all(SearchConfig(field_of_order(q)))
        _FULL_RUNS[q] = (report, time.perf_counter() - t0)
    return _FULL_RUNS[q]


@pytest.fixture(scope="session")
def full_runs():
    return full_run


# one pass/fail line per acceptance criterion

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    num, title = marker
    if report.when == "call" or report.outcome != "passed":
        prev = _CRITERIA.get(num, (title, "PASS"))[1]
        status = "PASS" if report.outcome == "passed" and prev == "PASS" else "FAIL"
        _CRITERIA[num] = (title, status)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = tuple(m.args)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, status = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {status}  {title}")
