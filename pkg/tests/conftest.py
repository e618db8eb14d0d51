from __future__ import annotations

import pytest

# criterion number -> (passed, description)
CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record the outcome of one acceptance criterion; assertion failures mark it FAIL."""

    class Recorder:
        def __call__(self, number: int, description: str, passed: bool) -> None:
            CRITERIA[number] = (bool(passed), description)
            assert passed, f"criterion {number} failed: {description}"

    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        passed, description = CRITERIA[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  [{number:2d}] {description}")
