import time

import pytest

_RESULTS = []


class Criterion:
    """Records one acceptance criterion's outcome and prints a PASS/FAIL line."""

    def __init__(self, name: str, limit_s: float):
        self.name, self.limit_s = name, limit_s
        self.start = time.perf_counter()

    def finish(self, ok: bool, detail: str):
        elapsed = time.perf_counter() - self.start
        within = elapsed < self.limit_s
        line = (f"{'PASS' if ok and within else 'FAIL'}  {self.name}: {detail} "
                f"[{elapsed:.1f}s, limit {self.limit_s:g}s]")
        _RESULTS.append(line)
        print(line)
        assert ok, line
        assert within, line


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in _RESULTS:
            terminalreporter.write_line(line)
