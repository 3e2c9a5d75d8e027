import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_criteria: dict[str, str] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    key = name[len("test_criterion_"):]
    if report.when == "call" or report.outcome != "passed":
        if report.outcome == "passed" and report.when != "call":
            return
        prev = _criteria.get(key)
        _criteria[key] = report.outcome.upper() if prev in (None, "PASSED") else prev


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: int(k.split("_")[0])):
        number, _, label = key.partition("_")
        verdict = "PASS" if _criteria[key] == "PASSED" else "FAIL"
        terminalreporter.write_line(f"criterion {number} ({label.replace('_', ' ')}): {verdict}")
