import pytest

from crgames.core import Configuration, GameInstance, Semantics, SingleConfig, make_system


def game(dim, locs, edges, semantics, objective, initial):
    """Build an instance from names: ``objective`` and ``initial`` are
    ``(loc_name, counters)`` pairs; a set of names as objective is passed
    through unchanged."""
    system = make_system(dim, locs, edges)
    if isinstance(objective, tuple):
        objective = SingleConfig(Configuration(system.index(objective[0]), tuple(objective[1])))
    return GameInstance(system, semantics, objective, Configuration(system.index(initial[0]), tuple(initial[1])))


@pytest.fixture
def build():
    return game


Z, VASS, NB = Semantics.Z, Semantics.VASS, Semantics.NONBLOCKING_VASS


ACCEPTANCE_LINES = []


def record(criterion, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
