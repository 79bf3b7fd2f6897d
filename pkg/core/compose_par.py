"""
Frontier-synchronous parallel composition.

Each round expands every arc pair of every pair state in the frontier at
once. The task domain of a state is the cross product of its two out-spans
followed by its epsilon-only moves; an exclusive scan over per-state task
counts gives every task a unique index, and chunks of tasks run on a thread
pool. Tasks communicate only through test-and-set claims on the seen table
and fetch-and-add on counters and cursors; both happen under one lock, which
gives them atomic read-modify-write semantics. Collecting all chunk results
is the barrier between rounds.

Discovery records every move that lands on a co-accessible pair, so each
state is expanded once. After discovery, a count pass over the recorded
batches tallies per-node out/in arcs, a scan turns the counts into SoA
offsets and a fill pass writes each arc at a slot reserved from its node's
cursor.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from core.compose_seq import ComposedGraph, ComposeOptions, FilterState, MoveKind, check_pair_space, trim
from core.errors import ConfigError, ContractError
from core.graph import EPSILON, INDEX_DTYPE, LABEL_DTYPE, WEIGHT_DTYPE, Graph

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_TASKS = 262_144

MATCH, EPS_BOTH, EPS_A, EPS_B = (int(k) for k in MoveKind)
F_MATCH, F_A_EPS, F_B_EPS = (int(s) for s in FilterState)


def exclusive_scan(counts):
    counts = np.asarray(counts, dtype=INDEX_DTYPE).reshape(-1)
    offsets = np.zeros(counts.size + 1, dtype=INDEX_DTYPE)
    np.cumsum(counts, out=offsets[1:])
    return offsets


@dataclass
class Frontier:
    current: np.ndarray     # sorted pair-state keys (ua * V_B + ub) * 3 + f
    seen: np.ndarray        # marker table over 3 * V_A * V_B keys
    reachable: np.ndarray   # marker table over V_A * V_B pairs


@dataclass
class CountTable:
    num_out: np.ndarray
    num_in: np.ndarray
    out_cursor: np.ndarray
    in_cursor: np.ndarray

    @classmethod
    def zeros(cls, num_nodes):
        return cls(*(np.zeros(num_nodes, dtype=INDEX_DTYPE) for _ in range(4)))


class RoundResult(NamedTuple):
    frontier: Frontier
    nodes: np.ndarray   # keys claimed this round
    arcs: int           # moves landing on co-accessible pairs
    tasks: int          # arc-pair tasks explored


class MoveBatch(NamedTuple):
    state: np.ndarray
    kind: np.ndarray
    arc_a: np.ndarray
    arc_b: np.ndarray
    va: np.ndarray
    vb: np.ndarray
    vf: np.ndarray


class ArcBatch(NamedTuple):
    src: np.ndarray     # source pair-state keys, node ids after the count pass
    dst: np.ndarray
    arc_a: np.ndarray   # -1 when A stays put
    arc_b: np.ndarray


class _Side:
    """One input seen from one direction: spans, matching-tape labels and epsilon sub-spans."""

    def __init__(self, g, labels, forward):
        if forward:
            self.offset, self.adjacency, self.ends = g.out_arc_offset, g.out_arcs, g.dst_nodes
        else:
            self.offset, self.adjacency, self.ends = g.in_arc_offset, g.in_arcs, g.src_nodes
        self.labels = labels
        self.degree = np.diff(self.offset)
        owner = np.repeat(np.arange(g.num_nodes, dtype=INDEX_DTYPE), self.degree)
        eps = labels[self.adjacency] == EPSILON
        self.eps_arcs = self.adjacency[eps]
        self.eps_offset = exclusive_scan(np.bincount(owner[eps], minlength=g.num_nodes))
        self.eps_degree = np.diff(self.eps_offset)


def _task_counts(a, b, ua, ub):
    return a.degree[ua] * b.degree[ub] + a.eps_degree[ua] + b.eps_degree[ub]


def _expand(a, b, ua, ub, f, epsilon_filter):
    """Run every task of the given pair states; returns the legal moves in task order."""
    cross = a.degree[ua] * b.degree[ub]
    eps_a_count = a.eps_degree[ua]
    offsets = exclusive_scan(cross + eps_a_count + b.eps_degree[ub])
    total = int(offsets[-1])
    owner = np.repeat(np.arange(ua.size, dtype=INDEX_DTYPE), np.diff(offsets))
    local = np.arange(total, dtype=INDEX_DTYPE) - offsets[owner]

    in_cross = local < cross[owner]
    in_eps_a = ~in_cross & (local < cross[owner] + eps_a_count[owner])
    in_eps_b = ~(in_cross | in_eps_a)

    kind = np.full(total, -1, dtype=np.int8)
    arc_a = np.full(total, -1, dtype=INDEX_DTYPE)
    arc_b = np.full(total, -1, dtype=INDEX_DTYPE)
    va = np.zeros(total, dtype=INDEX_DTYPE)
    vb = np.zeros(total, dtype=INDEX_DTYPE)
    vf = np.full(total, F_MATCH, dtype=np.int8)

    idx = np.flatnonzero(in_cross)
    o = owner[idx]
    width = b.degree[ub[o]]
    ea = a.adjacency[a.offset[ua[o]] + local[idx] // width]
    eb = b.adjacency[b.offset[ub[o]] + local[idx] % width]
    la, lb = a.labels[ea], b.labels[eb]
    is_match = (la == lb) & (la != EPSILON)
    if epsilon_filter:
        is_both = (la == EPSILON) & (lb == EPSILON) & (f[o] == F_MATCH)
    else:
        is_both = np.zeros(idx.size, dtype=np.bool_)
    kind[idx] = np.where(is_match, MATCH, np.where(is_both, EPS_BOTH, -1))
    arc_a[idx], arc_b[idx] = ea, eb
    va[idx], vb[idx] = a.ends[ea], b.ends[eb]

    idx = np.flatnonzero(in_eps_a)
    o = owner[idx]
    ea = a.eps_arcs[a.eps_offset[ua[o]] + local[idx] - cross[o]]
    allowed = f[o] != F_B_EPS if epsilon_filter else np.ones(idx.size, dtype=np.bool_)
    kind[idx] = np.where(allowed, EPS_A, -1)
    arc_a[idx] = ea
    va[idx], vb[idx] = a.ends[ea], ub[o]
    vf[idx] = F_A_EPS if epsilon_filter else F_MATCH

    idx = np.flatnonzero(in_eps_b)
    o = owner[idx]
    eb = b.eps_arcs[b.eps_offset[ub[o]] + local[idx] - cross[o] - eps_a_count[o]]
    allowed = f[o] != F_A_EPS if epsilon_filter else np.ones(idx.size, dtype=np.bool_)
    kind[idx] = np.where(allowed, EPS_B, -1)
    arc_b[idx] = eb
    va[idx], vb[idx] = ua[o], b.ends[eb]
    vf[idx] = F_B_EPS if epsilon_filter else F_MATCH

    keep = kind >= 0
    return MoveBatch(owner[keep], kind[keep], arc_a[keep], arc_b[keep], va[keep], vb[keep], vf[keep])


class ParallelComposer:
    def __init__(self, A, B, opts=ComposeOptions(), workers=1, chunk_tasks=DEFAULT_CHUNK_TASKS):
        if workers < 1:
            raise ConfigError(f"workers must be >= 1, got {workers}")
        check_pair_space(A, B, opts)
        self.A, self.B = A, B
        self.opts = opts
        self.workers = workers
        self.chunk_tasks = max(1, chunk_tasks)
        self.nb = B.num_nodes
        self._forward = (_Side(A, A.olabels, True), _Side(B, B.ilabels, True))
        self._backward = (_Side(A, A.olabels, False), _Side(B, B.ilabels, False))
        self._lock = threading.Lock()
        self._pool = None
        self._record_arcs = False
        self._arc_batches = []
        self.round_tasks = []

    def __enter__(self):
        if self.workers > 1:
            self._pool = ThreadPoolExecutor(max_workers=self.workers)
        return self

    def __exit__(self, *exc):
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def _ranges(self, counts):
        """Split items into contiguous chunks of about chunk_tasks units of work (at least one chunk per worker)."""
        if counts.size == 0:
            return []
        total = int(counts.sum())
        budget = max(1, min(self.chunk_tasks, -(-total // self.workers)))
        chunk_of = (np.cumsum(counts) - counts) // budget
        cuts = np.flatnonzero(np.diff(chunk_of)) + 1
        bounds = np.concatenate([[0], cuts, [counts.size]])
        return list(zip(bounds[:-1].tolist(), bounds[1:].tolist()))

    def _run(self, work, ranges):
        """Run one bulk-synchronous step; returning means every chunk has finished."""
        if self._pool is None:
            return [work(lo, hi) for lo, hi in ranges]
        return list(self._pool.map(lambda r: work(*r), ranges))

    def _claim(self, table, keys):
        """Test-and-set: each key is claimed by exactly one caller."""
        keys = np.unique(keys)
        with self._lock:
            fresh = keys[~table[keys]]
            table[fresh] = True
        return fresh

    def _reserve(self, cursor, offset, nodes):
        """Fetch-and-add one slot per entry on its node's cursor; returns absolute slots."""
        order = np.argsort(nodes, kind='stable')
        ordered = nodes[order]
        uniq, first, count = np.unique(ordered, return_index=True, return_counts=True)
        rank = np.arange(nodes.size, dtype=INDEX_DTYPE) - np.repeat(first, count)
        with self._lock:
            base = cursor[uniq].copy()
            cursor[uniq] += count
        slots = np.empty(nodes.size, dtype=INDEX_DTYPE)
        slots[order] = offset[ordered] + np.repeat(base, count) + rank
        return slots

    def _decode(self, keys):
        pair, f = np.divmod(keys, 3)
        ua, ub = np.divmod(pair, self.nb)
        return ua, ub, f

    def backward_sweep(self):
        """Marker table of pairs (ignoring the filter state) that can reach an accept pair."""
        a, b = self._backward
        reach = np.zeros(self.A.num_nodes * self.nb, dtype=np.bool_)
        frontier = np.sort((self.A.accepts()[:, None] * self.nb + self.B.accepts()[None, :]).ravel())
        reach[frontier] = True
        rounds = 0
        while frontier.size:
            ua, ub = np.divmod(frontier, self.nb)
            f = np.zeros(frontier.size, dtype=np.int8)

            def work(lo, hi):
                moves = _expand(a, b, ua[lo:hi], ub[lo:hi], f[lo:hi], self.opts.epsilon_filter)
                return self._claim(reach, moves.va * self.nb + moves.vb)

            parts = self._run(work, self._ranges(_task_counts(a, b, ua, ub)))
            frontier = np.sort(np.concatenate(parts)) if parts else frontier[:0]
            rounds += 1
        logger.debug("backward sweep: %d rounds, %d co-accessible pairs", rounds, int(reach.sum()))
        return reach

    def initial_frontier(self, reach):
        seen = np.zeros(3 * self.A.num_nodes * self.nb, dtype=np.bool_)
        pairs = (self.A.starts()[:, None] * self.nb + self.B.starts()[None, :]).ravel()
        keys = np.unique(pairs[reach[pairs]] * 3 + F_MATCH)
        seen[keys] = True
        return Frontier(keys, seen, reach)

    def frontier_round(self, frontier):
        a, b = self._forward
        ua, ub, f = self._decode(frontier.current)
        counts = _task_counts(a, b, ua, ub)

        def work(lo, hi):
            moves = _expand(a, b, ua[lo:hi], ub[lo:hi], f[lo:hi], self.opts.epsilon_filter)
            pairs = moves.va * self.nb + moves.vb
            hit = np.flatnonzero(frontier.reachable[pairs])
            dst_keys = pairs[hit] * 3 + moves.vf[hit]
            batch = None
            if self._record_arcs:
                src_keys = frontier.current[lo + moves.state[hit]]
                batch = ArcBatch(src_keys, dst_keys, moves.arc_a[hit], moves.arc_b[hit])
            return self._claim(frontier.seen, dst_keys), hit.size, batch

        parts = self._run(work, self._ranges(counts))
        claimed = np.sort(np.concatenate([p[0] for p in parts])) if parts else frontier.current[:0]
        arcs = sum(p[1] for p in parts)
        if self._record_arcs:
            self._arc_batches.extend(p[2] for p in parts if p[1])
        tasks = int(counts.sum())
        self.round_tasks.append(tasks)
        logger.debug("round %d: frontier %d, tasks %d, arcs %d, claimed %d",
                     len(self.round_tasks), frontier.current.size, tasks, arcs, claimed.size)
        return RoundResult(Frontier(claimed, frontier.seen, frontier.reachable), claimed, arcs, tasks)

    def compose(self, check_slots=False):
        A, B = self.A, self.B
        self._reach = self.backward_sweep()
        frontier = self.initial_frontier(self._reach)
        start_keys = frontier.current
        self._record_arcs, self._arc_batches = True, []
        try:
            while frontier.current.size:
                frontier = self.frontier_round(frontier).frontier
        finally:
            self._record_arcs = False
        batches, self._arc_batches = self._arc_batches, []
        node_keys = np.flatnonzero(frontier.seen)
        num_nodes = node_keys.size
        ua, ub, _ = self._decode(node_keys)
        ranges = self._ranges(np.array([batch.src.size for batch in batches], dtype=INDEX_DTYPE))

        table = CountTable.zeros(num_nodes)

        def count(lo, hi):
            arcs = 0
            for i in range(lo, hi):
                batch = batches[i]
                src = np.searchsorted(node_keys, batch.src)
                dst = np.searchsorted(node_keys, batch.dst)
                batches[i] = batch._replace(src=src, dst=dst)
                with self._lock:
                    np.add.at(table.num_out, src, 1)
                    np.add.at(table.num_in, dst, 1)
                arcs += src.size
            return arcs

        counted = sum(self._run(count, ranges))
        out_offset = exclusive_scan(table.num_out)
        in_offset = exclusive_scan(table.num_in)
        num_arcs = int(out_offset[-1])

        src_nodes = np.empty(num_arcs, dtype=INDEX_DTYPE)
        dst_nodes = np.empty(num_arcs, dtype=INDEX_DTYPE)
        ilabels = np.empty(num_arcs, dtype=LABEL_DTYPE)
        olabels = np.empty(num_arcs, dtype=LABEL_DTYPE)
        weights = np.empty(num_arcs, dtype=WEIGHT_DTYPE)
        in_arcs = np.empty(num_arcs, dtype=INDEX_DTYPE)
        written = np.zeros(num_arcs, dtype=INDEX_DTYPE) if check_slots else None

        def fill_batch(batch):
            src, dst, arc_a, arc_b = batch
            slots = self._reserve(table.out_cursor, out_offset, src)
            in_arcs[self._reserve(table.in_cursor, in_offset, dst)] = slots
            has_a, has_b = arc_a >= 0, arc_b >= 0
            both = has_a & has_b
            arc_weights = np.zeros(src.size, dtype=WEIGHT_DTYPE)
            arc_weights[both] = A.weights[arc_a[both]] + B.weights[arc_b[both]]
            arc_weights[has_a & ~has_b] = A.weights[arc_a[has_a & ~has_b]]
            arc_weights[has_b & ~has_a] = B.weights[arc_b[has_b & ~has_a]]
            arc_ilabels = np.full(src.size, EPSILON, dtype=LABEL_DTYPE)
            arc_ilabels[has_a] = A.ilabels[arc_a[has_a]]
            arc_olabels = np.full(src.size, EPSILON, dtype=LABEL_DTYPE)
            arc_olabels[has_b] = B.olabels[arc_b[has_b]]

            src_nodes[slots], dst_nodes[slots] = src, dst
            ilabels[slots], olabels[slots], weights[slots] = arc_ilabels, arc_olabels, arc_weights
            if written is not None:
                with self._lock:
                    np.add.at(written, slots, 1)
            return src.size

        def fill(lo, hi):
            arcs = 0
            for i in range(lo, hi):
                arcs += fill_batch(batches[i])
                batches[i] = None
            return arcs

        filled = sum(self._run(fill, ranges))

        if not (counted == filled == num_arcs):
            raise ContractError(f"slot accounting: counted {counted}, filled {filled}, E = {num_arcs}")
        if not (np.array_equal(table.out_cursor, table.num_out) and np.array_equal(table.in_cursor, table.num_in)):
            raise ContractError("fill cursors do not match count pass")
        if written is not None and not (written == 1).all():
            raise ContractError(f"slot {int(np.flatnonzero(written != 1)[0])} not written exactly once")

        accept = A.accept[ua] & B.accept[ub]
        start = np.zeros(num_nodes, dtype=np.bool_)
        start[np.searchsorted(node_keys, start_keys)] = True
        arrays = dict(
            start=start, accept=accept, ilabels=ilabels, olabels=olabels, weights=weights,
            src_nodes=src_nodes, dst_nodes=dst_nodes, in_arcs=in_arcs,
            out_arcs=np.arange(num_arcs, dtype=INDEX_DTYPE),
            in_arc_offset=in_offset, out_arc_offset=out_offset,
        )
        for array in arrays.values():
            array.setflags(write=False)
        stats = {
            'engine': 'par',
            'workers': self.workers,
            'rounds': len(self.round_tasks),
            'tasks': int(sum(self.round_tasks)),
            'coaccessible': int(self._reach.sum()),
        }
        logger.debug("parallel compose: %d states, %d arcs in %d rounds", num_nodes, num_arcs, stats['rounds'])
        result = ComposedGraph(Graph(**arrays), node_keys.astype(np.int64), self.nb, stats)
        return trim(result) if self.opts.trim_output else result


def initial_frontier(A, B, opts=ComposeOptions()):
    """Start frontier of the forward sweep (runs the backward sweep first)."""
    with ParallelComposer(A, B, opts) as composer:
        return composer.initial_frontier(composer.backward_sweep())


def frontier_round(A, B, frontier, opts=ComposeOptions(), workers=1):
    with ParallelComposer(A, B, opts, workers) as composer:
        return composer.frontier_round(frontier)


def compose_parallel(A, B, opts=ComposeOptions(), workers=1, chunk_tasks=DEFAULT_CHUNK_TASKS, check_slots=False):
    with ParallelComposer(A, B, opts, workers, chunk_tasks) as composer:
        return composer.compose(check_slots=check_slots)
