import os

import pytest

os.environ.setdefault("MPLBACKEND", "Agg")

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def report_criterion(request):
    """Record one pass/fail line; the lines are repeated in the terminal summary."""
    lines = request.config.stash[_LINES]

    def record(label: str, ok: bool, detail: str = "") -> None:
        line = f"criterion {label}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
