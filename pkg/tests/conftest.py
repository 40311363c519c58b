import re

_results: dict[int, str] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_", report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        if _results.get(num) != "FAIL":
            _results[num] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        terminalreporter.write_line(f"{_results[num]} criterion {num}: {CRITERIA[num]}")
