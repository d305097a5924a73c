import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    details = [v for k, v in item.user_properties if k == "detail"]
    _ACCEPTANCE[number] = (title, rep.passed, details)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, details = _ACCEPTANCE[number]
        tr.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}")
        for d in details:
            tr.write_line(f"        {d}")
