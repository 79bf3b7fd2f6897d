import hypothesis.strategies as st

from core.graph import build_graph
from core.oracle import matched_path_counts
from tools.graphgen import derive_seed, random_dag, random_graph

labels = st.integers(min_value=-1, max_value=3)
weights = st.floats(min_value=-4.0, max_value=0.0, width=32)
seeds = st.integers(min_value=0, max_value=2**63)


@st.composite
def graphs(draw, max_nodes=6, max_arcs=12):
    num_nodes = draw(st.integers(min_value=1, max_value=max_nodes))
    node = st.integers(min_value=0, max_value=num_nodes - 1)
    arcs = draw(st.lists(st.tuples(node, node, labels, labels, weights), max_size=max_arcs))
    starts = draw(st.lists(node, max_size=2))
    accepts = draw(st.lists(node, max_size=2))
    return build_graph(num_nodes, starts, accepts, arcs)


@st.composite
def dag_pairs(draw, max_nodes=6, max_degree=2, max_tokens=3, eps_probs=(0.0, 0.2), tries=32):
    """Seeded DAG pairs, re-seeded up to `tries` times until some path pair matches."""
    seed = draw(seeds)
    num_nodes = draw(st.integers(min_value=2, max_value=max_nodes))
    max_degree = draw(st.integers(min_value=1, max_value=max_degree))
    num_tokens = draw(st.integers(min_value=1, max_value=max_tokens))
    eps_prob = draw(st.sampled_from(eps_probs))
    for attempt in range(tries):
        pair = tuple(
            random_dag(num_nodes, max_degree, num_tokens, eps_prob, derive_seed(seed, attempt, side)) for side in (0, 1)
        )
        if matched_path_counts(*pair, 2 * num_nodes):
            break
    return pair


@st.composite
def random_pairs(draw, max_nodes=24, max_degree=4, max_tokens=6):
    seed = draw(seeds)
    num_nodes = draw(st.integers(min_value=2, max_value=max_nodes))
    degree = draw(st.integers(min_value=0, max_value=max_degree))
    num_tokens = draw(st.integers(min_value=1, max_value=max_tokens))
    return tuple(random_graph(num_nodes, degree, num_tokens, derive_seed(seed, side)) for side in (0, 1))
