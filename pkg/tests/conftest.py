import pytest

_CRITERIA = []


class _Recorder:
    def __init__(self, nodeid):
        self.nodeid = nodeid

    def check(self, label, ok, detail=""):
        _CRITERIA.append((label, bool(ok), detail))
        assert ok, f"{label}: {detail}"


@pytest.fixture
def criterion(request):
    """Records one acceptance line per check, printed in the terminal summary."""
    return _Recorder(request.node.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label}  {detail}")
