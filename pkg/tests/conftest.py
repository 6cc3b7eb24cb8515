import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tropmartin.core import TropicalMatrix

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile("default")

NEG = -np.inf


def chain(n: int, zero_loop: bool = False) -> TropicalMatrix:
    """Chain truncation on 0..n-1: i->i+1 weight 0, i->0 weight -1, optional 0->0 loop."""
    W = np.full((n, n), NEG)
    for i in range(n - 1):
        W[i, i + 1] = 0.0
    for i in range(1, n):
        W[i, 0] = -1.0
    if zero_loop:
        W[0, 0] = 0.0
    return TropicalMatrix.from_dense(W)


def z_line(r: int) -> TropicalMatrix:
    """Nearest-neighbour walk on -r..r with weight -1 per step."""
    labels = [str(i) for i in range(-r, r + 1)]
    arcs = [(str(i), str(i + d), -1.0) for i in range(-r, r + 1) for d in (-1, 1) if -r <= i + d <= r]
    return TropicalMatrix.from_arcs(labels, arcs)


@pytest.fixture
def ex1():
    return chain(4)


@pytest.fixture
def ex2():
    return chain(4, zero_loop=True)


@pytest.fixture
def zline():
    return z_line(3)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
