import time
from contextlib import contextmanager

import pytest


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``with criterion(3, "CHSH orbit"): ...``."""
    log = request.config.__dict__.setdefault("_acceptance_lines", [])

    @contextmanager
    def run(number, title):
        t0 = time.perf_counter()
        notes = []
        try:
            yield notes
        except BaseException:
            log.append((number, False, title, time.perf_counter() - t0, notes))
            raise
        log.append((number, True, title, time.perf_counter() - t0, notes))
    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, title, secs, notes in sorted(lines, key=lambda r: r[0]):
        extra = f" ({'; '.join(notes)})" if notes else ""
        terminalreporter.write_line(
            f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} [{secs:.1f} s]{extra}")
