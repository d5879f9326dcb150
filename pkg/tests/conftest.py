import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"

_criteria = {}


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture(scope="session")
def synthetic_corpus(tmp_path_factory):
    from synthetic import write_corpus

    return write_corpus(tmp_path_factory.mktemp("corpus"))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        if hasattr(report, "wasxfail"):
            status = "XFAIL"
        note = ""
        if report.outcome == "skipped" and isinstance(report.longrepr, tuple):
            note = f" ({report.longrepr[2]})"
        _criteria[number] = f"[{status}] criterion {number}: {title}{note}"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria, key=int):
        terminalreporter.write_line(_criteria[number])
