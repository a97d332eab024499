import numpy as np
import pytest

from dmdif import graph, mirror, objective


@pytest.fixture(scope="session")
def paper_instance():
    return objective.generate_paper_instance(42)


@pytest.fixture(scope="session")
def cycle10():
    return graph.cycle(10)


@pytest.fixture(scope="session")
def entropy100():
    return mirror.NegativeEntropy(100)


@pytest.fixture(scope="session")
def small_instance():
    # 4 agents, d=6, each A_i rank 3: only the sum is strongly convex
    return objective.generate_paper_instance(5, n=4, d=6, rows=4, rank=3, center=3.0,
                                             spectral_norm=1.5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def central_diff(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        out[j] = (f(x + e) - f(x - e)) / (2 * h)
    return out


#: (criterion, passed, detail) lines printed at the end of the session
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
