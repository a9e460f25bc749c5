import time
from contextlib import contextmanager

import pytest

ACCEPTANCE_RESULTS = {}


class _Recorder:
    @contextmanager
    def __call__(self, number: int, text: str):
        start = time.perf_counter()
        try:
            yield
        except BaseException:
            ACCEPTANCE_RESULTS[number] = ("FAIL", text, time.perf_counter() - start)
            raise
        ACCEPTANCE_RESULTS[number] = ("PASS", text, time.perf_counter() - start)


@pytest.fixture
def criterion():
    """Context manager that records the outcome of one acceptance criterion."""
    return _Recorder()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        status, text, _ = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {text}")
