import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from plie.groups import GLCongruence, Heisenberg, Multiplicative, parse_group  # noqa: E402

# criterion number -> (title, all runs passed so far)
ACCEPTANCE: dict[int, tuple[str, bool]] = {}


def all_groups(p):
    return [Multiplicative(p), GLCongruence(p, 2), Heisenberg(p)]


@pytest.fixture(params=["mult", "gl:2", "heis"])
def group5(request):
    return parse_group(request.param, 5)



@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    if report.when == "setup" and report.passed:
        return
    number, title = marker.args
    _, ok = ACCEPTANCE.get(number, (title, True))
    ACCEPTANCE[number] = (title, ok and report.passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {number:2d}. {title}")
