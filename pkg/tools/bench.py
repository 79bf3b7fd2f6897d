"""Benchmark protocols: random-graph node and degree sweeps, and the lexicon/emissions sweep."""

import csv
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from core.compose_par import DEFAULT_CHUNK_TASKS, compose_parallel
from core.compose_seq import ComposeOptions, compose_sequential
from core.errors import ConfigError, ContractError, ResourceLimitError
from core.graph import closure
from core.oracle import graphs_equivalent
from tools.graphgen import derive_seed, emissions_graph, lexicon_graph, load_lexicon, random_graph, sample_lexicon, synthetic_lexicon
from tools.validation import check_trim

logger = logging.getLogger(__name__)

ALGORITHMS = ('seq', 'par')
SWEEP_AXIS = {'rand-nodes': 'nodes_a', 'rand-arcs': 'degree', 'lexicon': 'words'}


@dataclass
class BenchRecord:
    benchmark: str
    algorithm: str
    nodes_a: int = 0
    nodes_b: int = 0
    degree: int = 0
    tokens: int = 0
    words: int = 0
    frames: int = 0
    workers: int = 1
    trial: int = 0
    seconds: float = 0.0
    composed_nodes: int = 0
    composed_arcs: int = 0


CSV_FIELDS = [f.name for f in fields(BenchRecord)]


def doubling(lo, hi):
    """lo, 2*lo, 4*lo, ... up to hi; a zero start contributes one point before 1."""
    if lo > hi:
        raise ConfigError(f"sweep start {lo} exceeds end {hi}")
    points = []
    if lo <= 0:
        points.append(0)
        lo = 1
    while lo <= hi:
        points.append(lo)
        lo *= 2
    return points


def trials_for(index, num_points, trials):
    """Explicit trial count, or 5 per point and 2 for the largest one."""
    if trials is not None:
        return trials
    return 2 if index == num_points - 1 else 5


def compose(A, B, algorithm, opts, workers, chunk_tasks=DEFAULT_CHUNK_TASKS):
    """Run one engine; returns (ComposedGraph, seconds spent composing)."""
    began = time.perf_counter()
    if algorithm == 'seq':
        result = compose_sequential(A, B, opts)
    elif algorithm == 'par':
        result = compose_parallel(A, B, opts, workers, chunk_tasks)
    else:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    return result, max(time.perf_counter() - began, 1e-9)


class BenchRunner:
    def __init__(self, algos=ALGORITHMS, workers=1, opts=ComposeOptions(), verify=False,
                 chunk_tasks=DEFAULT_CHUNK_TASKS, out=None):
        for algo in algos:
            if algo not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {algo!r}")
        self.algos = tuple(algos)
        self.workers = workers
        self.opts = opts
        self.verify = verify
        self.chunk_tasks = chunk_tasks
        self.out = out or sys.stderr
        if verify and len(set(self.algos)) < len(ALGORITHMS):
            self._warn(f"verify needs both engines; with --algos {','.join(self.algos)} nothing is compared")

    def _warn(self, message):
        logger.warning(message)
        print(f"⚠️  {message}", file=self.out)

    def _point(self, benchmark, A, B, trial, **dims):
        records, results = [], {}
        for algo in self.algos:
            result, seconds = compose(A, B, algo, self.opts, self.workers, self.chunk_tasks)
            results[algo] = result
            records.append(BenchRecord(
                benchmark, algo, nodes_a=A.num_nodes, nodes_b=B.num_nodes,
                workers=self.workers if algo == 'par' else 1, trial=trial, seconds=seconds,
                composed_nodes=result.graph.num_nodes, composed_arcs=result.graph.num_arcs, **dims,
            ))
        if self.verify and len(results) == 2 and not graphs_equivalent(results['seq'], results['par']):
            raise ContractError(f"{benchmark} {dims} trial {trial}: seq and par outputs differ")
        return records, results

    def rand_nodes(self, min_nodes, max_nodes, degree, tokens, trials=None, seed=0):
        sizes = doubling(min_nodes, max_nodes)
        records = []
        for i, n in enumerate(sizes):
            for trial in range(trials_for(i, len(sizes), trials)):
                A = random_graph(n, degree, tokens, derive_seed(seed, n, trial, 0))
                B = random_graph(n, degree, tokens, derive_seed(seed, n, trial, 1))
                try:
                    point, _ = self._point('rand-nodes', A, B, trial, degree=degree, tokens=tokens)
                except ResourceLimitError as e:
                    self._warn(f"rand-nodes nodes={n} trial {trial} skipped: {e}")
                    continue
                records.extend(point)
            logger.info("rand-nodes: finished nodes=%d", n)
        return records

    def rand_arcs(self, nodes, min_degree, max_degree, trials=None, seed=0):
        degrees = doubling(min_degree, max_degree)
        records = []
        for i, degree in enumerate(degrees):
            tokens = max(1, 2 * degree)
            for trial in range(trials_for(i, len(degrees), trials)):
                A = random_graph(nodes, degree, tokens, derive_seed(seed, degree, trial, 0))
                B = random_graph(nodes, degree, tokens, derive_seed(seed, degree, trial, 1))
                try:
                    point, _ = self._point('rand-arcs', A, B, trial, degree=degree, tokens=tokens)
                except ResourceLimitError as e:
                    self._warn(f"rand-arcs degree={degree} trial {trial} skipped: {e}")
                    continue
                records.extend(point)
            logger.info("rand-arcs: finished degree=%d", degree)
        return records

    def lexicon(self, word_counts, phonemes, frames, trials=None, seed=0, lexicon_path=None,
                master_words=None, min_len=3, max_len=10):
        """compose(emissions, closure(lexicon)) for growing samples of one master lexicon."""
        word_counts = list(word_counts)
        if word_counts != sorted(word_counts):
            raise ConfigError(f"word counts must be ascending, got {word_counts}")
        if lexicon_path:
            with open(lexicon_path, 'r', encoding='utf-8') as f:
                master = load_lexicon(f)
            phonemes = master.phoneme_count
        else:
            size = max([master_words or 0] + word_counts)
            master = synthetic_lexicon(size, phonemes, min_len, max_len, derive_seed(seed, 0))

        emissions = emissions_graph(frames, phonemes, seed=derive_seed(seed, 1))
        print(f"📊 emissions: {emissions.num_nodes} nodes, {emissions.num_arcs} arcs; "
              f"lexicon: {len(master)} words, {phonemes} phonemes", file=self.out)

        records = []
        for i, count in enumerate(word_counts):
            for trial in range(trials_for(i, len(word_counts), trials)):
                words = sample_lexicon(master, count, derive_seed(seed, count, trial))
                B = closure(lexicon_graph(words))
                try:
                    point, results = self._point('lexicon', emissions, B, trial, words=count, frames=frames)
                except ResourceLimitError as e:
                    self._warn(f"lexicon words={count} trial {trial} skipped: {e}")
                    continue
                self._check_lexicon_point(count, trial, results)
                records.extend(point)
            logger.info("lexicon: finished words=%d", count)
        return records

    def _check_lexicon_point(self, count, trial, results):
        sizes = {(r.graph.num_nodes, r.graph.num_arcs) for r in results.values()}
        if len(sizes) > 1:
            raise ContractError(f"lexicon words={count} trial {trial}: engines disagree on size {sizes}")
        for algo, result in results.items():
            if result.graph.num_nodes == 0:
                raise ContractError(f"lexicon words={count} trial {trial}: empty {algo} composition")
            if self.opts.trim_output:
                report = check_trim(result.graph)
                if not report["ok"]:
                    raise ContractError(f"lexicon words={count} {algo}: {report['violation']} at {report['location']}")


def point_means(records):
    """{(benchmark, algorithm, sweep value): (mean seconds, trials)}"""
    grouped = {}
    for r in records:
        key = (r.benchmark, r.algorithm, getattr(r, SWEEP_AXIS[r.benchmark]))
        grouped.setdefault(key, []).append(r.seconds)
    return {key: (float(np.mean(times)), len(times)) for key, times in grouped.items()}


def loglog_slope(records, benchmark='rand-nodes', algorithm='seq'):
    """Least-squares slope of log(mean seconds) against log(sweep value); None with < 2 points."""
    points = sorted((x, mean) for (b, a, x), (mean, _) in point_means(records).items()
                    if b == benchmark and a == algorithm and x > 0)
    if len(points) < 2:
        return None
    xs, ys = zip(*points)
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def summary_lines(records):
    means = point_means(records)
    lines = []
    for (benchmark, algo, x), (mean, n) in sorted(means.items()):
        line = f"📊 {benchmark} {SWEEP_AXIS[benchmark]}={x} {algo}: mean {mean:.4f}s over {n} trial(s)"
        if algo == 'par' and (benchmark, 'seq', x) in means:
            line += f" (par/seq {mean / means[(benchmark, 'seq', x)][0]:.2f})"
        lines.append(line)
    slope = loglog_slope(records)
    if slope is not None and not math.isnan(slope):
        lines.append(f"📊 rand-nodes seq log-log slope: {slope:.2f}")
    return lines


def write_csv(records, path):
    """Append records; the header is written when the file is new or empty."""
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    with open(path, 'a', newline='', encoding='utf-8') as f:
        writer = csv.DictWriter(f, fieldnames=CSV_FIELDS)
        if fresh:
            writer.writeheader()
        for record in records:
            writer.writerow(asdict(record))


def read_csv(path):
    with open(path, 'r', newline='', encoding='utf-8') as f:
        rows = list(csv.DictReader(f))
    types = {f.name: f.type for f in fields(BenchRecord)}
    return [BenchRecord(**{k: (v if types[k] in (str, 'str') else
                              float(v) if types[k] in (float, 'float') else int(v))
                           for k, v in row.items()}) for row in rows]
