from __future__ import annotations

import pytest

from twyangian.exactalg import QQ, FieldSpec

F101 = FieldSpec.parse("Fp:101")
FIELDS = [QQ, F101]


@pytest.fixture(params=FIELDS, ids=lambda F: F.name)
def field(request):
    return request.param


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_line(request):
    """Print a criterion verdict now and again in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def emit(line: str) -> None:
        print(line)
        lines.append(line)

    return emit


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
