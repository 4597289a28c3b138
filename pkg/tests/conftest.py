import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

_CRITERIA: dict[int, tuple[str, str, float]] = {}


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=20240601, help="seed for the randomized acceptance suites")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion with a one-line report")


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.outcome == "passed" else "FAIL"
        _CRITERIA[number] = (title, status, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status, duration = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}  {status}  {duration:6.2f}s  {title}")
