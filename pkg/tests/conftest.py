"""Shared fixtures and the acceptance-criteria summary hook."""

import pytest

_acceptance_lines: list[str] = []


def record_criterion(number: str, passed: bool, detail: str) -> None:
    _acceptance_lines.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def criterion_report():
    """Tests call this with (number, passed, detail); results print after the run."""
    return record_criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
