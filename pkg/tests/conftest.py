from __future__ import annotations

import re

_CRITERIA: dict[int, tuple[str, str]] = {}
_PATTERN = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if not m:
        return
    num, label = int(m.group(1)), m.group(2).replace("_", " ")
    if report.when == "call" or report.outcome != "passed":
        prev = _CRITERIA.get(num, (label, "PASS"))[1]
        status = "PASS" if report.outcome == "passed" and prev == "PASS" else "FAIL"
        _CRITERIA[num] = (label, status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        label, status = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d} {status}  {label}")
