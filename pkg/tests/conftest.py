import pytest

from ringactors import MemoryTrace, Runtime

_acceptance_lines: list[str] = []


@pytest.fixture
def rt():
    runtime = Runtime()
    yield runtime
    runtime.shutdown()


@pytest.fixture
def traced():
    trace = MemoryTrace()
    runtime = Runtime(trace=trace)
    yield runtime, trace
    runtime.shutdown()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    label = request.node.name

    def record(ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'} {label}" + (f": {detail}" if detail else "")
        _acceptance_lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
