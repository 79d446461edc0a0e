import pytest
from hypothesis import settings

from nonreduced.algebra import Ideal, Ring

# fixed example streams keep the run reproducible and bounded in time
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")


@pytest.fixture(scope="session")
def S():
    return Ring(("z1", "z2"), ("w1", "w2"))


@pytest.fixture(scope="session")
def J_monomial(S):
    """Three quadratic monomials in w (free of rank 3 over Z)."""
    return Ideal.parse(S, ["w1^2", "w1*w2", "w2^2"])


@pytest.fixture(scope="session")
def J_twisted(S):
    """The monomials plus the linear relation z1*w2 - z2*w1."""
    return Ideal.parse(S, ["w1^2", "w1*w2", "w2^2", "z1*w2-z2*w1"])


@pytest.fixture(scope="session")
def J_reduced(S):
    return Ideal.parse(S, ["w1", "w2"])


@pytest.fixture(scope="session")
def R1():
    return Ring(("z",), ("w",))


@pytest.fixture(scope="session")
def J_cross(R1):
    """Two crossing lines, z*w = 0."""
    return Ideal.parse(R1, ["z*w"])


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
