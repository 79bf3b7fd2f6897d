"""
Brute-force reference semantics.

Paths are enumerated explicitly, so everything here is exponential and meant
for small (typically acyclic) fixtures only.
"""

import io
from collections import Counter, defaultdict
from typing import NamedTuple

import numpy as np

from core.errors import ContractError, ResourceLimitError
from core.graph import EPSILON, Graph
from core.semiring import ZERO, LogSemiring
from core.text_format import write_text

DEFAULT_MAX_PATHS = 1_000_000


class PathLabeling(NamedTuple):
    x: tuple
    y: tuple
    score: float


def enumerate_accepting_paths(g, max_len, max_paths=DEFAULT_MAX_PATHS):
    """Every start-to-accept path with at most max_len arcs; epsilon stripped from both tapes."""
    out_arcs = [g.outgoing_arcs(v).tolist() for v in range(g.num_nodes)]
    dst, ilabels, olabels = g.dst_nodes.tolist(), g.ilabels.tolist(), g.olabels.tolist()
    weights = g.weights.tolist()
    accept = g.accept.tolist()
    paths = []

    def record(arcs):
        if len(paths) >= max_paths:
            raise ResourceLimitError(f"more than {max_paths} accepting paths (max_len={max_len})")
        x = tuple(ilabels[e] for e in arcs if ilabels[e] != EPSILON)
        y = tuple(olabels[e] for e in arcs if olabels[e] != EPSILON)
        paths.append(PathLabeling(x, y, LogSemiring.products(weights[e] for e in arcs)))

    for s in g.starts().tolist():
        stack = [(s, [])]
        while stack:
            v, arcs = stack.pop()
            if accept[v]:
                record(arcs)
            if len(arcs) < max_len:
                for e in reversed(out_arcs[v]):
                    stack.append((dst[e], arcs + [e]))
    return paths


def score_table(g, max_len, max_paths=DEFAULT_MAX_PATHS):
    """ScoreTable of a single graph: (x, y) -> log-add over its accepting paths."""
    grouped = defaultdict(list)
    for path in enumerate_accepting_paths(g, max_len, max_paths):
        grouped[(path.x, path.y)].append(path.score)
    return {key: LogSemiring.sums(scores) for key, scores in grouped.items()}


def path_counts(g, max_len, max_paths=DEFAULT_MAX_PATHS):
    return Counter((p.x, p.y) for p in enumerate_accepting_paths(g, max_len, max_paths))


def transduce_score(g, x, z, max_len, max_paths=DEFAULT_MAX_PATHS):
    x, z = tuple(x), tuple(z)
    return LogSemiring.sums(
        p.score for p in enumerate_accepting_paths(g, max_len, max_paths) if p.x == x and p.y == z
    )


def _matched_pairs(A, B, max_len, max_paths):
    by_y = defaultdict(list)
    for pb in enumerate_accepting_paths(B, max_len, max_paths):
        by_y[pb.x].append(pb)
    for pa in enumerate_accepting_paths(A, max_len, max_paths):
        for pb in by_y.get(pa.y, ()):
            yield pa, pb


def bruteforce_compose_score(A, B, max_len, max_paths=DEFAULT_MAX_PATHS):
    """(x, z) -> log-add over matched path pairs of score_a + score_b."""
    grouped = defaultdict(list)
    for pa, pb in _matched_pairs(A, B, max_len, max_paths):
        grouped[(pa.x, pb.y)].append(LogSemiring.times(pa.score, pb.score))
    return {key: LogSemiring.sums(scores) for key, scores in grouped.items()}


def matched_path_counts(A, B, max_len, max_paths=DEFAULT_MAX_PATHS):
    return Counter((pa.x, pb.y) for pa, pb in _matched_pairs(A, B, max_len, max_paths))


def lookup(table, x, z):
    return table.get((tuple(x), tuple(z)), ZERO)


def canonicalize(cg):
    """Renumber nodes by ascending pair key and order arcs by (src, dst, ilabel, olabel, weight)."""
    if getattr(cg, "pair_keys", None) is None:
        raise ContractError("composed graph carries no pair keys")
    g = cg.graph
    order = np.argsort(cg.pair_keys, kind='stable')
    new_id = np.empty_like(order)
    new_id[order] = np.arange(order.size)
    src, dst = new_id[g.src_nodes], new_id[g.dst_nodes]
    # weights by bit pattern so -0.0 and 0.0 never tie
    arcs = np.lexsort((g.weights.view(np.uint32), g.olabels, g.ilabels, dst, src))
    graph = Graph.from_arrays(
        g.num_nodes, g.start[order], g.accept[order],
        src[arcs], dst[arcs], g.ilabels[arcs], g.olabels[arcs], g.weights[arcs],
    )
    return type(cg)(graph, cg.pair_keys[order], cg.num_nodes_b, dict(cg.stats))


def canonical_text(cg):
    buffer = io.StringIO()
    canonical = canonicalize(cg)
    buffer.write("# pair keys: " + " ".join(str(k) for k in canonical.pair_keys) + "\n")
    write_text(canonical.graph, buffer)
    return buffer.getvalue()


def graphs_equivalent(g1, g2):
    """Equal after canonicalization, weights bit-exact."""
    c1, c2 = canonicalize(g1), canonicalize(g2)
    return np.array_equal(c1.pair_keys, c2.pair_keys) and c1.graph.identical(c2.graph)
