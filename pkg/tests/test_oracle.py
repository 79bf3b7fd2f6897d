import math
import random

import numpy as np
import pytest

from core.compose_par import compose_parallel
from core.compose_seq import ComposedGraph, compose_sequential
from core.errors import ContractError, ResourceLimitError
from core.graph import EPSILON, Graph, build_graph
from core.oracle import (
    PathLabeling, bruteforce_compose_score, canonical_text, canonicalize, enumerate_accepting_paths,
    graphs_equivalent, lookup, path_counts, score_table, transduce_score,
)
from core.semiring import ZERO, LogSemiring, close


@pytest.fixture
def two_way_graph():
    """Two parallel a:b arcs carrying probabilities 1/4 and 3/4, then an epsilon:c arc."""
    return build_graph(3, [0], [2], [
        (0, 1, 0, 1, math.log(0.25)),
        (0, 1, 0, 1, math.log(0.75)),
        (1, 2, EPSILON, 2, 0.0),
    ])


def test_enumerate_strips_epsilon(two_way_graph):
    paths = enumerate_accepting_paths(two_way_graph, 2)
    assert [(p.x, p.y) for p in paths] == [((0,), (1, 2)), ((0,), (1, 2))]
    assert isinstance(paths[0], PathLabeling)
    assert enumerate_accepting_paths(two_way_graph, 1) == []


def test_scores_log_add_over_paths(two_way_graph):
    table = score_table(two_way_graph, 2)
    assert list(table) == [((0,), (1, 2))]
    assert close(table[((0,), (1, 2))], 0.0)
    assert close(transduce_score(two_way_graph, [0], [1, 2], 2), 0.0)
    assert transduce_score(two_way_graph, [0], [1], 2) == ZERO
    assert path_counts(two_way_graph, 2) == {((0,), (1, 2)): 2}


def test_lookup_defaults_to_zero():
    table = {((0,), (1,)): -1.5}
    assert lookup(table, [0], [1]) == -1.5
    assert lookup(table, [1], [0]) == ZERO


def test_bruteforce_trivial(trivial_pair):
    assert bruteforce_compose_score(*trivial_pair, 2) == {((0,), (2,)): 3.0}


def test_path_cap():
    loop = build_graph(1, [0], [0], [(0, 0, 0, 0, 0.0), (0, 0, 1, 1, 0.0)])
    with pytest.raises(ResourceLimitError):
        enumerate_accepting_paths(loop, 10, max_paths=5)
    assert len(enumerate_accepting_paths(loop, 2)) == 1 + 2 + 4


def test_canonicalize_orders_nodes_and_arcs(round_profile_pair):
    seq = compose_sequential(*round_profile_pair)
    canonical = canonicalize(seq)
    assert canonical.pair_keys.tolist() == sorted(seq.pair_keys.tolist())
    g = canonical.graph
    order = list(zip(g.src_nodes.tolist(), g.dst_nodes.tolist(), g.ilabels.tolist()))
    assert order == sorted(order)
    assert canonicalize(canonical).graph.identical(g)


def test_canonicalize_needs_pair_keys(layout_graph):
    with pytest.raises(ContractError):
        canonicalize(layout_graph)


def test_canonical_text(round_profile_pair):
    text = canonical_text(compose_sequential(*round_profile_pair))
    assert text.splitlines()[0] == "# pair keys: 0 3 18 21 33"
    assert text == canonical_text(compose_parallel(*round_profile_pair, workers=2))


def test_equivalence_sees_weight_differences(trivial_pair):
    A, B = trivial_pair
    heavier = build_graph(2, [0], [1], [(0, 1, 1, 2, 2.5)])
    assert graphs_equivalent(compose_sequential(A, B), compose_parallel(A, B))
    assert not graphs_equivalent(compose_sequential(A, B), compose_sequential(A, heavier))


def test_equivalence_is_bit_exact_on_weights(trivial_pair):
    cg = compose_sequential(*trivial_pair)
    g = cg.graph
    nudged = np.nextafter(g.weights, np.float32(np.inf))
    assert nudged[0] != g.weights[0]
    shifted = Graph.from_arrays(g.num_nodes, g.start, g.accept, g.src_nodes, g.dst_nodes, g.ilabels, g.olabels, nudged)
    assert graphs_equivalent(cg, ComposedGraph(g, cg.pair_keys, cg.num_nodes_b))
    assert not graphs_equivalent(cg, ComposedGraph(shifted, cg.pair_keys, cg.num_nodes_b))


def test_parallel_zero_weight_arcs_add_to_log_two():
    g = build_graph(2, [0], [1], [(0, 1, 0, 1, 0.0), (0, 1, 0, 1, 0.0)])
    assert close(transduce_score(g, [0], [1], 1), math.log(2))
    B = build_graph(2, [0], [1], [(0, 1, 1, 1, 0.0)])
    assert close(lookup(score_table(compose_sequential(g, B).graph, 2), [0], [1]), math.log(2))


@pytest.mark.parametrize("seed", range(5))
def test_transduce_score_ignores_path_order(seed):
    weights = [math.log(p) for p in (0.05, 0.1, 0.15, 0.2, 0.5, 0.01, 0.3)]
    g = build_graph(2, [0], [1], [(0, 1, 0, 1, w) for w in weights])
    scores = [p.score for p in enumerate_accepting_paths(g, 1)]
    random.Random(seed).shuffle(scores)
    assert math.isclose(LogSemiring.sums(scores), transduce_score(g, [0], [1], 1), rel_tol=1e-6, abs_tol=1e-6)
