from __future__ import annotations

from typing import List, Tuple

# (criterion, passed, detail) rows recorded by the acceptance suite
ACCEPTANCE: List[Tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
