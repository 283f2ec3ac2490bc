import numpy as np
import pytest
from hypothesis import strategies as st

from pathwise.paths import CadlagPath


@st.composite
def step_paths(draw, max_events=30, initial=None, scale=5.0):
    """Random step paths on dyadic event times (exact in binary floating point)."""
    k = draw(st.integers(min_value=0, max_value=max_events))
    ticks = draw(st.lists(st.integers(1, 1024), min_size=k, max_size=k, unique=True))
    times = np.sort(np.array(ticks, dtype=float)) / 1024
    values = draw(
        st.lists(st.floats(-scale, scale, allow_nan=False, width=64), min_size=k, max_size=k)
    )
    if initial is None:
        initial = draw(st.floats(-scale, scale, allow_nan=False))
    return CadlagPath(times, np.array(values, dtype=float), initial)


@pytest.fixture
def rng():
    return np.random.default_rng(20111408)


def brownian_skeleton(rng, exponent, variance=1.0):
    n = 2**exponent
    inc = rng.normal(0.0, np.sqrt(variance / n), n)
    grid = np.arange(n + 1) / n
    return grid, CadlagPath(grid[1:], np.cumsum(inc), 0.0)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
