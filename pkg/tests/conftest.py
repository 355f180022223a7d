import numpy as np
import pytest
from hypothesis import strategies as st

from causalab.dag import Dag, parse_dot

CONFOUNDED = parse_dot("digraph { Z -> X; Z -> Y; X -> W; W -> Y; }")
INSTRUMENTED = parse_dot("digraph { W -> X; Z -> X; Z -> Y; X -> Y; }")
MEDIATED = parse_dot("digraph { X -> Y; X -> W -> Y; }")
TIDES = parse_dot("digraph { ESd -> EMd -> h; ESd -> h; }")
CHAIN = parse_dot("digraph { A -> B -> C; }")
COLLIDER = parse_dot("digraph { A -> C; B -> C; }")


@st.composite
def dags(draw, max_nodes=8):
    """Random DAG: edges only from lower to higher index, names shuffled."""
    n = draw(st.integers(1, max_nodes))
    names = draw(st.permutations([f"v{i}" for i in range(n)]))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Dag(names, [(names[i], names[j]) for (i, j), k in zip(pairs, keep) if k])


def linear_sem(g: Dag, n, rng, weight=1.0, noise=None):
    """Sample a linear SEM on ``g`` with unit weights and standard-normal noise."""
    noise = noise or (lambda size: rng.standard_normal(size))
    cols = {}
    for v in g.topological_order():
        cols[v] = noise(n) + sum(weight * cols[p] for p in sorted(g.parents(v)))
    import pandas as pd

    return pd.DataFrame({v: cols[v] for v in g.nodes})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
