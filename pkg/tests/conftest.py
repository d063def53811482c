import re

_CRITERIA: dict[int, list] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or report.failed:
        _CRITERIA.setdefault(int(m.group(1)), []).append((m.group(2), report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        runs = _CRITERIA[n]
        status = "PASS" if all(ok for _, ok in runs) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {runs[0][0].replace('_', ' ')}")
