import pytest

from stepnet import Marking, NetStructure
from stepnet.compiler import Backend, gadget_zero_check


@pytest.fixture
def addition():
    """Sum of two numbers: t1 moves p1 to p3, t2 moves p2 to p3; marking (2,3,0)."""
    net = NetStructure(
        ["p1", "p2", "p3"], ["t1", "t2"],
        pre={("p1", "t1"): 1, ("p2", "t2"): 1},
        post={("t1", "p3"): 1, ("t2", "p3"): 1},
    )
    return net, Marking(net.places, (2, 3, 0))


@pytest.fixture
def zero_check():
    return gadget_zero_check(Backend.STRONG_SLEPTSOV)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
