import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SRC = os.path.join(ROOT, "src")
for path in (ROOT, SRC):
    if path not in sys.path:
        sys.path.insert(0, path)

from graph_epd.filtration import build_filtration  # noqa: E402
from graph_epd.graph import SbmConfig, build_graph, sbm_generate  # noqa: E402

CYCLE4_EDGES = [(0, 1), (1, 2), (2, 3), (0, 3)]
# six vertices with values 1..6, two independent cycles
EXAMPLE_EDGES = [(0, 2), (0, 3), (0, 4), (1, 2), (1, 5), (2, 3), (3, 4)]


def random_graph(rng, max_vertices=9, p=None):
    n = int(rng.integers(1, max_vertices + 1))
    p = rng.uniform(0.2, 0.8) if p is None else p
    rows, cols = np.triu_indices(n, 1)
    keep = rng.random(len(rows)) < p
    return build_graph(n, np.stack([rows[keep], cols[keep]], axis=1))


@pytest.fixture
def cycle4():
    return build_graph(4, CYCLE4_EDGES)


@pytest.fixture
def cycle4_fg(cycle4):
    return build_filtration(cycle4, [1.0, 2.0, 3.0, 4.0])


@pytest.fixture
def example_fg():
    return build_filtration(build_graph(6, EXAMPLE_EDGES), [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])


@pytest.fixture
def path3():
    return build_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def triangle():
    return build_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def star3():
    return build_graph(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def sbm_small():
    return sbm_generate(SbmConfig(20, 2, 0.5, 0.1, seed=3))
