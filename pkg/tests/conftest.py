import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_verdicts = {}


def pytest_runtest_logreport(report):
    # one verdict per acceptance criterion; a failure in any phase sticks
    mark = dict(report.user_properties).get("criterion")
    if mark is None:
        return
    if report.when == "call" or report.failed:
        key, title = mark
        detail = dict(report.user_properties).get("detail", "")
        prev = _verdicts.get(key)
        if prev is None or prev[1]:
            _verdicts[key] = (title, report.passed, detail)


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        item.user_properties.append(("criterion", tuple(mark.args)))


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_verdicts):
        title, ok, detail = _verdicts[key]
        line = f"[{'PASS' if ok else 'FAIL'}] {key:>2}. {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
