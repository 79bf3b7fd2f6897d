"""
Weighted finite-state transducers in structure-of-arrays (SoA) layout.

A Graph keeps two V-entry flag arrays (start, accept), five E-entry arc
arrays (ilabels, olabels, weights, src_nodes, dst_nodes) and, per direction,
an E-entry adjacency array (in_arcs, out_arcs) that is consecutive by node,
indexed by a (V+1)-entry offset array: node v owns
adjacency[offset[v]:offset[v + 1]].
"""

import dataclasses
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from core.errors import GraphConstructionError

EPSILON = -1

INDEX_DTYPE = np.int64
LABEL_DTYPE = np.int64
WEIGHT_DTYPE = np.float32


class Arc(NamedTuple):
    src: int
    dst: int
    ilabel: int
    olabel: int
    weight: float = 0.0


def _frozen(values, dtype):
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


def _offsets(nodes, num_nodes):
    offsets = np.zeros(num_nodes + 1, dtype=INDEX_DTYPE)
    np.cumsum(np.bincount(nodes, minlength=num_nodes), out=offsets[1:])
    return offsets


def _node_mask(nodes, num_nodes, what):
    nodes = np.asarray(nodes)
    if nodes.dtype == np.bool_:
        if nodes.shape != (num_nodes,):
            raise GraphConstructionError(f"{what} mask has {nodes.size} entries for {num_nodes} nodes")
        return nodes.copy()
    nodes = nodes.astype(INDEX_DTYPE).reshape(-1)
    bad = (nodes < 0) | (nodes >= num_nodes)
    if bad.any():
        raise GraphConstructionError(f"{what} node {int(nodes[bad][0])} out of range for {num_nodes} nodes")
    mask = np.zeros(num_nodes, dtype=np.bool_)
    mask[nodes] = True
    return mask


def gather_spans(offset, nodes):
    """Flatten the adjacency spans of `nodes`.

    Returns (owner, positions): positions index the adjacency array, owner[i]
    is the index into `nodes` whose span positions[i] belongs to. Spans are
    laid out in `nodes` order, each in adjacency order.
    """
    nodes = np.asarray(nodes, dtype=INDEX_DTYPE)
    lo = offset[nodes]
    counts = offset[nodes + 1] - lo
    owner = np.repeat(np.arange(nodes.size, dtype=INDEX_DTYPE), counts)
    starts = np.cumsum(counts) - counts
    positions = np.arange(owner.size, dtype=INDEX_DTYPE) - starts[owner] + lo[owner]
    return owner, positions


@dataclass(frozen=True, eq=False)
class Graph:
    start: np.ndarray
    accept: np.ndarray
    ilabels: np.ndarray
    olabels: np.ndarray
    weights: np.ndarray
    src_nodes: np.ndarray
    dst_nodes: np.ndarray
    in_arcs: np.ndarray
    out_arcs: np.ndarray
    in_arc_offset: np.ndarray
    out_arc_offset: np.ndarray

    @classmethod
    def from_arrays(cls, num_nodes, starts, accepts, src, dst, ilabels, olabels, weights):
        """Build the SoA layout from parallel arc arrays given in arc-index order.

        starts/accepts are node index lists or boolean masks of length num_nodes.
        Within each node's span arc indices appear in ascending order.
        """
        if num_nodes < 0:
            raise GraphConstructionError(f"negative node count {num_nodes}")
        src = np.asarray(src, dtype=INDEX_DTYPE).reshape(-1)
        dst = np.asarray(dst, dtype=INDEX_DTYPE).reshape(-1)
        ilabels = np.asarray(ilabels, dtype=LABEL_DTYPE).reshape(-1)
        olabels = np.asarray(olabels, dtype=LABEL_DTYPE).reshape(-1)
        weights = np.asarray(weights, dtype=WEIGHT_DTYPE).reshape(-1)
        num_arcs = src.size
        if not (dst.size == ilabels.size == olabels.size == weights.size == num_arcs):
            raise GraphConstructionError("arc arrays differ in length")

        bad = (src < 0) | (src >= num_nodes) | (dst < 0) | (dst >= num_nodes)
        if bad.any():
            e = int(np.flatnonzero(bad)[0])
            node = int(src[e]) if not 0 <= src[e] < num_nodes else int(dst[e])
            raise GraphConstructionError(
                f"arc {e} ({int(src[e])} -> {int(dst[e])}): node {node} out of range for {num_nodes} nodes"
            )
        bad = (ilabels < EPSILON) | (olabels < EPSILON)
        if bad.any():
            e = int(np.flatnonzero(bad)[0])
            raise GraphConstructionError(f"arc {e}: label below epsilon ({int(ilabels[e])}:{int(olabels[e])})")

        return cls(
            start=_frozen(_node_mask(starts, num_nodes, 'start'), np.bool_),
            accept=_frozen(_node_mask(accepts, num_nodes, 'accept'), np.bool_),
            ilabels=_frozen(ilabels, LABEL_DTYPE),
            olabels=_frozen(olabels, LABEL_DTYPE),
            weights=_frozen(weights, WEIGHT_DTYPE),
            src_nodes=_frozen(src, INDEX_DTYPE),
            dst_nodes=_frozen(dst, INDEX_DTYPE),
            in_arcs=_frozen(np.argsort(dst, kind='stable'), INDEX_DTYPE),
            out_arcs=_frozen(np.argsort(src, kind='stable'), INDEX_DTYPE),
            in_arc_offset=_frozen(_offsets(dst, num_nodes), INDEX_DTYPE),
            out_arc_offset=_frozen(_offsets(src, num_nodes), INDEX_DTYPE),
        )

    @property
    def num_nodes(self):
        return int(self.start.size)

    @property
    def num_arcs(self):
        return int(self.ilabels.size)

    @property
    def out_degrees(self):
        return np.diff(self.out_arc_offset)

    @property
    def max_out_degree(self):
        return int(self.out_degrees.max()) if self.num_nodes else 0

    def _check_node(self, v):
        if not 0 <= v < self.num_nodes:
            raise IndexError(f"node {v} out of range for {self.num_nodes} nodes")

    def incoming_arcs(self, v):
        self._check_node(v)
        return self.in_arcs[self.in_arc_offset[v]:self.in_arc_offset[v + 1]]

    def outgoing_arcs(self, v):
        self._check_node(v)
        return self.out_arcs[self.out_arc_offset[v]:self.out_arc_offset[v + 1]]

    def starts(self):
        return np.flatnonzero(self.start)

    def accepts(self):
        return np.flatnonzero(self.accept)

    def arcs(self):
        for e in range(self.num_arcs):
            yield Arc(
                int(self.src_nodes[e]),
                int(self.dst_nodes[e]),
                int(self.ilabels[e]),
                int(self.olabels[e]),
                float(self.weights[e]),
            )

    def identical(self, other):
        """Every SoA array equal; weights compared bit for bit."""
        for f in dataclasses.fields(self):
            mine, theirs = getattr(self, f.name), getattr(other, f.name)
            if f.name == 'weights':
                mine, theirs = mine.view(np.uint32), theirs.view(np.uint32)
            if not np.array_equal(mine, theirs):
                return False
        return True


def build_graph(num_nodes, starts, accepts, arcs):
    """Build a Graph from Arc records (or (src, dst, ilabel, olabel[, weight]) tuples)."""
    records = [Arc(*arc) for arc in arcs]
    if records:
        src, dst, ilabels, olabels, weights = zip(*records)
    else:
        src = dst = ilabels = olabels = weights = ()
    return Graph.from_arrays(num_nodes, list(starts), list(accepts), src, dst, ilabels, olabels, weights)


def closure(g):
    """Kleene closure with one new node that is both start and accept.

    The new node s = V gets epsilon:epsilon arcs of weight 0 to every former
    start node and from every former accept node; former flags are cleared.
    """
    s = g.num_nodes
    starts, accepts = g.starts(), g.accepts()
    extra = starts.size + accepts.size
    src = np.concatenate([g.src_nodes, np.full(starts.size, s), accepts])
    dst = np.concatenate([g.dst_nodes, starts, np.full(accepts.size, s)])
    ilabels = np.concatenate([g.ilabels, np.full(extra, EPSILON)])
    olabels = np.concatenate([g.olabels, np.full(extra, EPSILON)])
    weights = np.concatenate([g.weights, np.zeros(extra, dtype=WEIGHT_DTYPE)])
    return Graph.from_arrays(s + 1, [s], [s], src, dst, ilabels, olabels, weights)


def invert(g):
    """Swap input and output tapes."""
    return dataclasses.replace(g, ilabels=g.olabels, olabels=g.ilabels)


def reverse(g):
    """Reverse every arc and swap start with accept flags."""
    return Graph.from_arrays(
        g.num_nodes, g.accept, g.start, g.dst_nodes, g.src_nodes, g.ilabels, g.olabels, g.weights
    )


def reachable(g, sources, forward=True):
    """Boolean node mask of everything reachable from `sources` (frontier sweep)."""
    if forward:
        offset, adjacency, ends = g.out_arc_offset, g.out_arcs, g.dst_nodes
    else:
        offset, adjacency, ends = g.in_arc_offset, g.in_arcs, g.src_nodes
    seen = np.zeros(g.num_nodes, dtype=np.bool_)
    frontier = np.unique(np.asarray(sources, dtype=INDEX_DTYPE))
    seen[frontier] = True
    while frontier.size:
        _, positions = gather_spans(offset, frontier)
        nxt = np.unique(ends[adjacency[positions]])
        frontier = nxt[~seen[nxt]]
        seen[frontier] = True
    return seen


def subgraph(g, keep):
    """Restrict g to the nodes in `keep`, renumbering them in their original order."""
    keep = np.asarray(keep, dtype=np.bool_)
    new_id = np.cumsum(keep) - 1
    kept = keep[g.src_nodes] & keep[g.dst_nodes]
    return Graph.from_arrays(
        int(keep.sum()),
        g.start[keep],
        g.accept[keep],
        new_id[g.src_nodes[kept]],
        new_id[g.dst_nodes[kept]],
        g.ilabels[kept],
        g.olabels[kept],
        g.weights[kept],
    )
