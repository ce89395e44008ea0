import time

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("repo", deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

_ACCEPTANCE = []


class Criterion:
    """Times one acceptance criterion and records its PASS/FAIL line."""

    def __init__(self, number, title, limit=None):
        self.number, self.title, self.limit = number, title, limit
        self.notes = []

    def note(self, s):
        self.notes.append(s)

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0
        ok = exc_type is None and (self.limit is None or dt < self.limit)
        budget = f" (limit {self.limit:g} s)" if self.limit else ""
        detail = "; ".join(self.notes)
        line = f"{'PASS' if ok else 'FAIL'} criterion {self.number:>2}: {self.title} [{dt:.2f} s{budget}]"
        _ACCEPTANCE.append((self.number, line + (f" {detail}" if detail else "")))
        if exc_type is None and not ok:
            raise AssertionError(f"criterion {self.number} took {dt:.2f} s, limit {self.limit} s")
        return False


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
