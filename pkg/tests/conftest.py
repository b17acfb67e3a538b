import numpy as np
import pytest

from stablegini import _backend

_ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail):
    """Store one pass/fail line for the end-of-run acceptance summary."""
    status = "PASS" if passed else "FAIL"
    line = f"criterion {number} [{status}] {title}: {detail}"
    _ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
        terminalreporter.write_line(line)


def _available_backends():
    names = ["python"]
    try:
        _backend.load("cython")
        names.insert(0, "cython")
    except ImportError:
        pass
    return names


BACKENDS = _available_backends()


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
