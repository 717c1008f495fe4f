import pytest

_RESULTS = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(n, title, ok, detail)``; returns ``ok``."""

    def record(n, title, ok, detail=""):
        _RESULTS[n] = (title, bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_RESULTS):
        title, ok, detail = _RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
