import dataclasses

import numpy as np

from core.graph import build_graph
from tools.validation import check_trim, validate


def _tampered(g, **arrays):
    return dataclasses.replace(g, **{name: np.array(values) for name, values in arrays.items()})


def test_fixture_is_valid(layout_graph):
    assert validate(layout_graph) == {"ok": True}


def test_offset_sum_mismatch(layout_graph):
    report = validate(_tampered(layout_graph, in_arc_offset=[0, 0, 2, 4, 6]))
    assert report["ok"] is False
    assert report["violation"] == "offset sum mismatch"


def test_offset_not_monotone(layout_graph):
    report = validate(_tampered(layout_graph, out_arc_offset=[0, 4, 3, 7, 7]))
    assert report["violation"] == "offset not monotone"
    assert report["location"] == "out_arc_offset[1] > out_arc_offset[2]"


def test_node_index_out_of_range(layout_graph):
    report = validate(_tampered(layout_graph, src_nodes=[0, 0, 1, 1, 2, 0, 9]))
    assert report == {"ok": False, "violation": "node index out of range", "location": "src_nodes[6]"}


def test_adjacency_not_a_permutation(layout_graph):
    report = validate(_tampered(layout_graph, in_arcs=[0, 0, 5, 6, 2, 3, 4]))
    assert report["violation"] == "adjacency not a permutation"


def test_adjacency_destination_mismatch(layout_graph):
    report = validate(_tampered(layout_graph, in_arcs=[0, 5, 1, 6, 2, 3, 4]))
    assert report["violation"] == "adjacency/destination mismatch"
    assert report["location"] == "in_arcs[1] = arc 5 in span of node 1"


def test_label_below_epsilon(layout_graph):
    report = validate(_tampered(layout_graph, olabels=[19, 20, 21, -3, 23, 24, 25]))
    assert report == {"ok": False, "violation": "label below epsilon", "location": "olabels[3]"}


def test_flag_length_mismatch(layout_graph):
    report = validate(_tampered(layout_graph, accept=[False, True]))
    assert report["violation"] == "flag length mismatch"


def test_check_trim(layout_graph):
    assert check_trim(layout_graph) == {"ok": True}

    dead_end = build_graph(3, [0], [1], [(0, 1, 0, 0), (0, 2, 0, 0)])
    assert check_trim(dead_end) == {"ok": False, "violation": "not co-accessible", "location": "node 2"}

    unreached = build_graph(3, [0], [1], [(0, 1, 0, 0), (2, 1, 0, 0)])
    assert check_trim(unreached) == {"ok": False, "violation": "not accessible", "location": "node 2"}
