import re
import sys

_ERRORED: set[int] = set()


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if m and report.failed:
        _ERRORED.add(int(m.group(1)))


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    verdicts = getattr(mod, "VERDICTS", None) or {}
    if not verdicts and not _ERRORED:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in range(1, 13):
        if n in verdicts:
            title, passed, detail = verdicts[n]
            tr.write_line(f"[{'PASS' if passed else 'FAIL'}] {n:2d}. {title}: {detail}")
        elif n in _ERRORED:
            tr.write_line(f"[FAIL] {n:2d}. raised before reaching a verdict")
        else:
            tr.write_line(f"[SKIP] {n:2d}. not selected in this run")
