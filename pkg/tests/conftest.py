from __future__ import annotations

import pytest

from qgcb.rootdata import load_datum
from qgcb.tensorcb import Context

ACCEPTANCE_LINES: list[str] = []


def _ctx(name):
    return Context.build(load_datum(name))


@pytest.fixture(scope="session")
def a1():
    return _ctx("A1")


@pytest.fixture(scope="session")
def a2():
    return _ctx("A2")


@pytest.fixture(scope="session")
def b2():
    return _ctx("B2")


@pytest.fixture(scope="session")
def aff():
    return _ctx("A1^(1)")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
