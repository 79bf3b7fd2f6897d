import sys
from pathlib import Path

import pytest
from hypothesis import settings

# Add project root to Python path
PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from core.graph import EPSILON, build_graph
from tools.graphgen import derive_seed, random_dag

settings.register_profile("wfst", deadline=None, max_examples=60)
settings.load_profile("wfst")

# a..g = 0..6, t..z = 19..25
A_, B_, C_, D_, E_, F_, G_ = range(7)
T_, U_, V_, W_, X_, Y_, Z_ = range(19, 26)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run acceptance-sized suites")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-sized corpora and timing runs")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def layout_graph():
    """Four-node transducer with seven arcs; node 2 is entered by f:y and g:z."""
    arcs = [
        (0, 1, A_, T_),
        (0, 1, B_, U_),
        (1, 3, C_, V_),
        (1, 3, D_, W_),
        (2, 3, E_, X_),
        (0, 2, F_, Y_),
        (1, 2, G_, Z_),
    ]
    return build_graph(4, [0], [3], arcs)


@pytest.fixture
def round_profile_pair():
    """Acceptor pair whose forward sweep explores 6, 8 and then 0 arc-pair tasks."""
    x, y, z, w, q, r = range(6)
    A = build_graph(3, [0], [1, 2], [
        (0, 0, x, x), (0, 1, y, y), (1, 2, w, w), (1, 1, q, q),
    ])
    B = build_graph(4, [0], [3], [
        (0, 1, x, x), (0, 2, y, y), (0, 3, z, z), (1, 1, x, x),
        (1, 3, y, y), (2, 3, w, w), (2, 2, r, r),
    ])
    return A, B


@pytest.fixture
def trivial_pair():
    """a:b / 1.0 composed with b:c / 2.0."""
    A = build_graph(2, [0], [1], [(0, 1, 0, 1, 1.0)])
    B = build_graph(2, [0], [1], [(0, 1, 1, 2, 2.0)])
    return A, B


@pytest.fixture
def epsilon_pair():
    """A writes epsilon where B reads epsilon: one alignment with the filter, two without."""
    A = build_graph(2, [0], [1], [(0, 1, 0, EPSILON, 0.0)])
    B = build_graph(2, [0], [1], [(0, 1, EPSILON, 5, 0.0)])
    return A, B


def make_dag_pair(seed, num_nodes=6, max_degree=2, num_tokens=3, eps_prob=0.2):
    A = random_dag(num_nodes, max_degree, num_tokens, eps_prob, derive_seed(seed, 0))
    B = random_dag(num_nodes, max_degree, num_tokens, eps_prob, derive_seed(seed, 1))
    return A, B


@pytest.fixture
def dag_pair():
    return make_dag_pair


@pytest.fixture
def dag_corpus():
    return [make_dag_pair(seed, eps_prob=0.2 if seed % 2 else 0.0) for seed in range(20)]
