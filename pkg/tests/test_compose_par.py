import numpy as np
import pytest
from hypothesis import given

from core import compose_par
from core.compose_par import ParallelComposer, compose_parallel, exclusive_scan, frontier_round, initial_frontier
from core.compose_seq import ComposeOptions, compose_sequential
from core.errors import ConfigError, ResourceLimitError
from core.oracle import canonical_text, graphs_equivalent
from strategies import dag_pairs, random_pairs
from tools.validation import check_trim, validate

NAIVE = ComposeOptions(epsilon_filter=False)


def test_exclusive_scan():
    assert exclusive_scan([3, 0, 2]).tolist() == [0, 3, 3, 5]
    assert exclusive_scan([]).tolist() == [0]


def test_round_profile_task_counts(round_profile_pair):
    A, B = round_profile_pair
    with ParallelComposer(A, B) as composer:
        frontier = composer.initial_frontier(composer.backward_sweep())
        assert frontier.current.tolist() == [0]
        rounds = []
        while frontier.current.size:
            result = composer.frontier_round(frontier)
            rounds.append((result.tasks, result.nodes.tolist()))
            frontier = result.frontier
    assert rounds == [(6, [3, 18]), (8, [21, 33]), (0, [])]


def test_module_level_round_helpers(round_profile_pair):
    A, B = round_profile_pair
    frontier = initial_frontier(A, B)
    first = frontier_round(A, B, frontier, workers=2)
    assert first.tasks == 6
    assert first.frontier.current.tolist() == [3, 18]
    assert first.frontier.seen[[0, 3, 18]].all()


def test_round_profile_compose_stats(round_profile_pair):
    cg = compose_parallel(*round_profile_pair, workers=2)
    assert cg.pair_keys.tolist() == [0, 3, 18, 21, 33]
    assert cg.graph.num_arcs == 5
    assert cg.stats["rounds"] == 3
    assert cg.stats["tasks"] == 14
    assert graphs_equivalent(cg, compose_sequential(*round_profile_pair))


def test_trivial_and_empty(trivial_pair):
    A, B = trivial_pair
    cg = compose_parallel(A, B)
    assert (cg.graph.num_nodes, cg.graph.num_arcs) == (2, 1)
    assert cg.graph.weights[0] == np.float32(3.0)
    empty = compose_parallel(A, A, workers=4)
    assert (empty.graph.num_nodes, empty.graph.num_arcs) == (0, 0)


def test_epsilon_pair_matches_sequential(epsilon_pair):
    for opts in (ComposeOptions(), NAIVE, ComposeOptions(trim_output=False)):
        par = compose_parallel(*epsilon_pair, opts, workers=2, check_slots=True)
        assert graphs_equivalent(par, compose_sequential(*epsilon_pair, opts))


def test_out_arcs_are_slot_order(round_profile_pair):
    g = compose_parallel(*round_profile_pair, ComposeOptions(trim_output=False), workers=3, chunk_tasks=1).graph
    assert g.out_arcs.tolist() == list(range(g.num_arcs))
    assert np.all(np.diff(g.src_nodes) >= 0)
    assert validate(g) == {"ok": True}


def test_bad_arguments(round_profile_pair):
    with pytest.raises(ConfigError):
        compose_parallel(*round_profile_pair, workers=0)
    with pytest.raises(ResourceLimitError):
        compose_parallel(*round_profile_pair, ComposeOptions(max_pair_states=11))


@given(pair=dag_pairs(max_nodes=8, max_degree=3, max_tokens=4))
def test_dag_pairs_match_sequential(pair):
    for opts in (ComposeOptions(), NAIVE):
        seq = compose_sequential(*pair, opts)
        for workers in (1, 4):
            par = compose_parallel(*pair, opts, workers=workers, chunk_tasks=5, check_slots=True)
            assert graphs_equivalent(seq, par)
            assert validate(par.graph) == {"ok": True}


@given(pair=random_pairs())
def test_random_graphs_match_sequential(pair):
    seq = compose_sequential(*pair)
    par = compose_parallel(*pair, workers=4, chunk_tasks=16, check_slots=True)
    assert graphs_equivalent(seq, par)
    assert par.stats["coaccessible"] == seq.stats["coaccessible"]
    if par.graph.num_nodes:
        assert check_trim(par.graph) == {"ok": True}


def test_canonical_text_is_worker_independent(dag_corpus):
    for A, B in dag_corpus:
        texts = {canonical_text(compose_parallel(A, B, workers=w, chunk_tasks=3)) for w in (1, 2, 8)}
        assert len(texts) == 1


def test_each_state_is_expanded_once_per_direction(round_profile_pair, monkeypatch):
    expanded = []
    expand = compose_par._expand

    def counting(a, b, ua, *rest):
        expanded.append(ua.size)
        return expand(a, b, ua, *rest)

    monkeypatch.setattr(compose_par, "_expand", counting)
    cg = compose_parallel(*round_profile_pair, ComposeOptions(trim_output=False))
    assert cg.stats["coaccessible"] == 5
    assert sum(expanded) == cg.stats["coaccessible"] + cg.graph.num_nodes
