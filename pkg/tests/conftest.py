"""Shared pytest plumbing.

The acceptance tests register one [PASS]/[FAIL] line apiece; printing
them from inside a test would be swallowed by fd-level capture, so they
are replayed here as a terminal summary section instead.
"""

import pytest

CRITERION_LINES: list[str] = []


@pytest.fixture(scope="session")
def criterion_log() -> list[str]:
    return CRITERION_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
