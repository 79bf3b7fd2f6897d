"""
Sequential, queue-driven composition (the reference engine).

Composition runs in two stages: a backward sweep marks the pair states
(u_a, u_b) that can reach an accept pair, then a FIFO expansion from the
start pairs adds every co-accessible state it meets. Epsilon moves are
constrained by a three-state filter so each matched path pair yields exactly
one composed path.
"""

import logging
from array import array
from dataclasses import dataclass, field
from enum import IntEnum
from typing import NamedTuple, Optional

import numpy as np

from core.errors import ResourceLimitError
from core.graph import EPSILON, WEIGHT_DTYPE, Graph, reachable, subgraph

logger = logging.getLogger(__name__)


class FilterState(IntEnum):
    MATCH = 0
    A_EPS = 1
    B_EPS = 2


class MoveKind(IntEnum):
    MATCH = 0
    EPS_BOTH = 1
    EPS_A = 2
    EPS_B = 3


class PairState(NamedTuple):
    ua: int
    ub: int
    f: FilterState = FilterState.MATCH

    def key(self, num_nodes_b):
        return (self.ua * num_nodes_b + self.ub) * 3 + int(self.f)

    @classmethod
    def from_key(cls, key, num_nodes_b):
        pair, f = divmod(int(key), 3)
        ua, ub = divmod(pair, num_nodes_b)
        return cls(ua, ub, FilterState(f))


class Move(NamedTuple):
    kind: MoveKind
    arc_a: Optional[int]
    arc_b: Optional[int]
    next: PairState


@dataclass(frozen=True)
class ComposeOptions:
    epsilon_filter: bool = True
    trim_output: bool = True
    max_pair_states: int = 100_000_000


@dataclass(frozen=True, eq=False)
class ComposedGraph:
    graph: Graph
    pair_keys: np.ndarray
    num_nodes_b: int
    stats: dict = field(default_factory=dict)

    def pair_states(self):
        return [PairState.from_key(k, self.num_nodes_b) for k in self.pair_keys]


def check_pair_space(A, B, opts):
    pairs = A.num_nodes * B.num_nodes
    if pairs > opts.max_pair_states:
        raise ResourceLimitError(
            f"pair space {A.num_nodes} x {B.num_nodes} = {pairs} exceeds max_pair_states={opts.max_pair_states}"
        )


class _LabelIndex:
    """Per-node arc lists of one adjacency direction, bucketed by the matching tape's label."""

    def __init__(self, g, labels, forward=True):
        if forward:
            offset, adjacency, self.ends = g.out_arc_offset.tolist(), g.out_arcs.tolist(), g.dst_nodes.tolist()
        else:
            offset, adjacency, self.ends = g.in_arc_offset.tolist(), g.in_arcs.tolist(), g.src_nodes.tolist()
        labels = labels.tolist()
        self.spans = []
        self.by_label = []
        for v in range(g.num_nodes):
            span = adjacency[offset[v]:offset[v + 1]]
            buckets = {}
            for e in span:
                buckets.setdefault(labels[e], []).append(e)
            self.spans.append(span)
            self.by_label.append(buckets)
        self.labels = labels


class _MatchIndex:
    """Label-bucketed views of A's output tape and B's input tape for one direction."""

    def __init__(self, A, B, forward=True):
        self.a = _LabelIndex(A, A.olabels, forward)
        self.b = _LabelIndex(B, B.ilabels, forward)


def _arc_pairs(index, ua, ub, with_eps_both):
    """(e_a, e_b) pairs with o_a = i_b, in cross-product (e_a, e_b) order."""
    a, b = index.a, index.b
    span_a, span_b = a.spans[ua], b.spans[ub]
    if len(span_a) <= len(span_b):
        buckets = b.by_label[ub]
        pairs = []
        for ea in span_a:
            label = a.labels[ea]
            if label == EPSILON and not with_eps_both:
                continue
            for eb in buckets.get(label, ()):
                pairs.append((ea, eb))
        return pairs
    buckets = a.by_label[ua]
    pairs = []
    for eb in span_b:
        label = b.labels[eb]
        if label == EPSILON and not with_eps_both:
            continue
        for ea in buckets.get(label, ()):
            pairs.append((ea, eb))
    # spans are ascending by arc index, so tuple order is cross-product order
    pairs.sort()
    return pairs


def _moves(index, p, epsilon_filter):
    ua, ub, f = p
    a, b = index.a, index.b
    moves = []
    both_allowed = epsilon_filter and f == FilterState.MATCH
    for ea, eb in _arc_pairs(index, ua, ub, both_allowed):
        kind = MoveKind.EPS_BOTH if a.labels[ea] == EPSILON else MoveKind.MATCH
        moves.append(Move(kind, ea, eb, PairState(a.ends[ea], b.ends[eb], FilterState.MATCH)))

    if not epsilon_filter:
        eps_a_next, eps_b_next = FilterState.MATCH, FilterState.MATCH
        eps_a_allowed = eps_b_allowed = True
    else:
        eps_a_next, eps_b_next = FilterState.A_EPS, FilterState.B_EPS
        eps_a_allowed = f != FilterState.B_EPS
        eps_b_allowed = f != FilterState.A_EPS
    if eps_a_allowed:
        for ea in a.by_label[ua].get(EPSILON, ()):
            moves.append(Move(MoveKind.EPS_A, ea, None, PairState(a.ends[ea], ub, eps_a_next)))
    if eps_b_allowed:
        for eb in b.by_label[ub].get(EPSILON, ()):
            moves.append(Move(MoveKind.EPS_B, None, eb, PairState(ua, b.ends[eb], eps_b_next)))
    return moves


def match_moves(A, B, p, opts=ComposeOptions(), index=None):
    """
    Legal moves out of pair state p: label matches and epsilon:epsilon pairs
    first, in (e_a, e_b) order, then epsilon moves of A alone, then of B alone.
    """
    if index is None:
        index = _MatchIndex(A, B)
    return _moves(index, PairState(*p), opts.epsilon_filter)


def _coaccessible_markers(A, B, opts, index=None):
    """Backward BFS over the (u_a, u_b) pair space, ignoring the filter state."""
    nb = B.num_nodes
    markers = bytearray(A.num_nodes * nb)
    if index is None:
        index = _MatchIndex(A, B, forward=False)
    a, b = index.a, index.b
    accepts_b = B.accepts().tolist()

    queue = array('q')
    for va in A.accepts().tolist():
        for vb in accepts_b:
            markers[va * nb + vb] = 1
            queue.append(va * nb + vb)

    head = 0
    while head < len(queue):
        va, vb = divmod(queue[head], nb)
        head += 1
        preds = [(a.ends[ea], b.ends[eb]) for ea, eb in _arc_pairs(index, va, vb, opts.epsilon_filter)]
        preds.extend((a.ends[ea], vb) for ea in a.by_label[va].get(EPSILON, ()))
        preds.extend((va, b.ends[eb]) for eb in b.by_label[vb].get(EPSILON, ()))
        for ua, ub in preds:
            key = ua * nb + ub
            if not markers[key]:
                markers[key] = 1
                queue.append(key)
    return markers


def coaccessible_set(A, B, opts=ComposeOptions()):
    """Marker table over pair keys u_a * V_B + u_b of pairs that can reach an accept pair."""
    check_pair_space(A, B, opts)
    return np.frombuffer(_coaccessible_markers(A, B, opts), dtype=np.bool_)


def trim(cg):
    """Drop nodes that are not on a start-to-accept path, keeping relative order."""
    g = cg.graph
    keep = reachable(g, g.starts(), forward=True) & reachable(g, g.accepts(), forward=False)
    if keep.all():
        return cg
    return ComposedGraph(subgraph(g, keep), cg.pair_keys[keep], cg.num_nodes_b, dict(cg.stats))


def _to_numpy(buffer, dtype):
    return np.frombuffer(buffer, dtype=dtype) if len(buffer) else np.zeros(0, dtype=dtype)


def compose_sequential(A, B, opts=ComposeOptions()):
    check_pair_space(A, B, opts)
    nb = B.num_nodes
    R = _coaccessible_markers(A, B, opts)
    index = _MatchIndex(A, B)
    accept_a, accept_b = A.accept.tolist(), B.accept.tolist()
    weights_a, weights_b = A.weights.tolist(), B.weights.tolist()
    ilabels_a, olabels_b = A.ilabels.tolist(), B.olabels.tolist()

    # dense node-id table over pair-state keys, -1 = not discovered
    num_keys = 3 * A.num_nodes * nb
    node_of = array('i' if num_keys < 2**31 else 'q', [-1]) * num_keys
    pair_keys, starts, accepts = array('q'), array('q'), array('q')
    src, dst, ilabels, olabels = array('q'), array('q'), array('q'), array('q')
    weights = array('f')

    def add_state(p, key):
        node = len(pair_keys)
        node_of[key] = node
        pair_keys.append(key)
        if accept_a[p.ua] and accept_b[p.ub]:
            accepts.append(node)
        return node

    for sa in A.starts().tolist():
        for sb in B.starts().tolist():
            if R[sa * nb + sb]:
                p = PairState(sa, sb, FilterState.MATCH)
                starts.append(add_state(p, p.key(nb)))

    # node ids are handed out in discovery order, so the FIFO queue is the id range itself
    u = 0
    while u < len(pair_keys):
        p = PairState.from_key(pair_keys[u], nb)
        for kind, ea, eb, q in _moves(index, p, opts.epsilon_filter):
            if not R[q.ua * nb + q.ub]:
                continue
            key = q.key(nb)
            v = node_of[key]
            if v < 0:
                v = add_state(q, key)
            src.append(u)
            dst.append(v)
            if kind == MoveKind.EPS_A:
                ilabels.append(ilabels_a[ea])
                olabels.append(EPSILON)
                weights.append(weights_a[ea])
            elif kind == MoveKind.EPS_B:
                ilabels.append(EPSILON)
                olabels.append(olabels_b[eb])
                weights.append(weights_b[eb])
            else:
                ilabels.append(ilabels_a[ea])
                olabels.append(olabels_b[eb])
                weights.append(float(WEIGHT_DTYPE(weights_a[ea]) + WEIGHT_DTYPE(weights_b[eb])))
        u += 1
    del node_of

    graph = Graph.from_arrays(
        len(pair_keys), _to_numpy(starts, np.int64), _to_numpy(accepts, np.int64),
        _to_numpy(src, np.int64), _to_numpy(dst, np.int64),
        _to_numpy(ilabels, np.int64), _to_numpy(olabels, np.int64), _to_numpy(weights, np.float32),
    )
    stats = {'engine': 'seq', 'expanded': u, 'coaccessible': R.count(1)}
    logger.debug("sequential compose: %d states, %d arcs, %d co-accessible pairs",
                 graph.num_nodes, graph.num_arcs, stats['coaccessible'])
    result = ComposedGraph(graph, _to_numpy(pair_keys, np.int64).copy(), nb, stats)
    return trim(result) if opts.trim_output else result
