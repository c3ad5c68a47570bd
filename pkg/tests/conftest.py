import numpy as np
import pytest

from graphtherm import accel
from graphtherm.data import load_bundled_graph
from graphtherm.graphs import build_transition_structure


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation once so timed tests measure compute, not compile."""
    ts = build_transition_structure(load_bundled_graph("theta"))
    accel.enumerate_cycles(ts.adjacency, 4, 10_000)
    accel.periodic_weight_sum(ts.adjacency, np.zeros((6, 6)), 4, 0.0)
    accel.power_iteration(ts.adjacency.astype(float) + np.eye(6))


@pytest.fixture
def theta():
    return load_bundled_graph("theta")


@pytest.fixture
def theta_ts(theta):
    return build_transition_structure(theta)


@pytest.fixture
def two_loop():
    return load_bundled_graph("two_loop")


@pytest.fixture
def dumbbell():
    return load_bundled_graph("dumbbell")


@pytest.fixture
def k4():
    return load_bundled_graph("k4")


def trace_power(ts, p):
    """Oracle: number of period-p sequences as trace(A^p) via integer matrix powers."""
    a = ts.adjacency.astype(np.int64)
    return int(np.trace(np.linalg.matrix_power(a, p)))
