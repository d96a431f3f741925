from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from eulermix.chain import build
from eulermix.graph import gen_directed_cycle, gen_random_eulerian

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def eulerian_graphs(draw, min_n=2, max_n=8, max_factor=4):
    n = draw(st.integers(min_n, max_n))
    m = draw(st.integers(n, max_factor * n))
    seed = draw(st.integers(0, 2**31 - 1))
    return gen_random_eulerian(n, m, seed)


@st.composite
def lazy_chains(draw, min_n=2, max_n=8):
    g = draw(eulerian_graphs(min_n, max_n))
    hold = draw(st.lists(st.floats(0.05, 0.9), min_size=g.n, max_size=g.n))
    return build(g, np.array(hold))


@pytest.fixture
def lazy_cycle3():
    return build(gen_directed_cycle(3), 0.5)


def brute_power(P: np.ndarray, t: int) -> np.ndarray:
    M = np.eye(P.shape[0])
    for _ in range(t):
        M = M @ P
    return M


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    """Print and remember one PASS/FAIL line, then fail the test if the criterion failed."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
