import math

import numpy as np
import pytest

from qpagerank.graph import DirectedGraph, ErdosRenyiParams, generate_erdos_renyi


def pytest_addoption(parser):
    parser.addoption(
        "--extended",
        action="store_true",
        default=False,
        help="run extended-budget acceptance criteria (128-node heatmap ensemble)",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--extended"):
        return
    skip = pytest.mark.skip(reason="extended-budget tier; run with --extended")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


def random_digraph(n, p, seed, loops=False):
    """Random graph for oracle checks; optionally sprinkles self-loops."""
    g = generate_erdos_renyi(n, ErdosRenyiParams(p, seed))
    if not loops:
        return g
    rng = np.random.default_rng(seed + 1)
    extra = {(v, v) for v in range(n) if rng.random() < 0.3}
    return DirectedGraph(n, g.edges | extra)


@pytest.fixture
def two_node():
    return DirectedGraph(2, frozenset({(0, 1)}))


PI = math.pi
