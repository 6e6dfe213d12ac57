from __future__ import annotations

import pytest

from epsreason.bench import builtin_instances
from epsreason.logic import KnowledgeBase


class AcceptanceLog:
    def __init__(self):
        self.lines: list[str] = []

    def record(self, criterion: str, ok: bool, detail: str = "") -> bool:
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] {criterion}"
        if detail:
            line += f" :: {detail}"
        self.lines.append(line)
        print(line)
        return ok


_LOG = AcceptanceLog()


@pytest.fixture(scope="session")
def acceptance() -> AcceptanceLog:
    return _LOG


@pytest.fixture(scope="session")
def instances():
    return builtin_instances()


@pytest.fixture
def kb_of(instances):
    def get(name: str) -> KnowledgeBase:
        return instances[name].kb

    return get


def pytest_terminal_summary(terminalreporter):
    if _LOG.lines:
        terminalreporter.section("acceptance criteria")
        for line in _LOG.lines:
            terminalreporter.write_line(line)
