import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record a one-line acceptance verdict, then fail the test if it did not pass."""

    def record(number, title, passed, detail):
        _VERDICTS.append((number, f"criterion {number} [{title}]: {'PASS' if passed else 'FAIL'} ({detail})"))
        assert passed, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_VERDICTS):
        terminalreporter.write_line(line)
