"""Shared fixtures and the acceptance verdict board.

Acceptance tests register one (criterion, status, detail, seconds) row each;
the terminal-summary hook prints the whole board after the run so every
criterion gets exactly one visible pass/fail line regardless of capture
settings.
"""

import numpy as np
import pytest

ACCEPTANCE_BOARD: list[tuple[str, str, str, float]] = []


def record_verdict(criterion: str, passed: bool, detail: str, seconds: float) -> None:
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_BOARD.append((criterion, status, detail, seconds))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_BOARD:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion, status, detail, seconds in ACCEPTANCE_BOARD:
        tr.write_line(f"[{status}] {criterion} ({seconds:.1f}s) — {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20260817)
