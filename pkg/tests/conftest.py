import os

import pytest

os.environ.setdefault("MPLBACKEND", "Agg")

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record a named pass/fail line for the acceptance summary."""

    def record(name, ok, detail=""):
        _CRITERIA.append((name, bool(ok), detail))
        line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
