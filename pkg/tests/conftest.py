import pytest

from sp4cert import _accel

_LINES = "_sp4cert_acceptance"


def pytest_configure(config):
    setattr(config, _LINES, [])


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion, then assert it."""
    lines = getattr(request.config, _LINES)

    def record(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} -- {detail}"
        lines.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, _LINES, [])
    if lines:
        terminalreporter.section(f"acceptance criteria (backend: {_accel.BACKEND})")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    return request.param
