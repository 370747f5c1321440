import contextlib
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: list[str] = []


@pytest.fixture
def criterion():
    """Context manager recording one acceptance line: ``[PASS]`` or ``[FAIL]``."""

    @contextlib.contextmanager
    def record(number: int, title: str):
        try:
            yield
        except BaseException:
            line = f"[FAIL] criterion {number}: {title}"
            _RESULTS.append(line)
            print(line)
            raise
        line = f"[PASS] criterion {number}: {title}"
        _RESULTS.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance")
        for line in sorted(_RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
