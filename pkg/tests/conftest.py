"""Shared test plumbing: the acceptance verdict board.

Acceptance tests record one line per criterion; the hook below prints
them after the run summary, outside pytest's output capture, so the
verdicts are visible in any log.
"""

import pytest

_ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def acceptance_line():
    def record(criterion: int, status: str, detail: str):
        _ACCEPTANCE_LINES[criterion] = (
            f"ACCEPTANCE {criterion}: {status} - {detail}")
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for criterion in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(_ACCEPTANCE_LINES[criterion])
