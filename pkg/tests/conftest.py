import contextlib
import time

import pytest

_RESULTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS] = []


@pytest.fixture
def criterion(request):
    """Context manager recording one PASS/FAIL line for an acceptance item."""
    results = request.config.stash[_RESULTS]

    @contextlib.contextmanager
    def record(label, title):
        notes = []
        start = time.perf_counter()
        try:
            yield notes
        except BaseException as exc:
            msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
            results.append((label, "FAIL", title, f"{msg[:160]}"))
            raise
        else:
            elapsed = time.perf_counter() - start
            detail = "; ".join(notes + [f"{elapsed:.2f}s"])
            results.append((label, "PASS", title, detail))

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, title, detail in results:
        terminalreporter.write_line(f"{status} criterion {label}: {title} ({detail})")
