#!/usr/bin/env python3

import argparse
import logging
import sys
import time
from pathlib import Path

# Add project root to Python path
sys.path.insert(0, str(Path(__file__).parent))

from core.compose_seq import ComposeOptions
from core.config import load_config, resolve_workers
from core.errors import ContractError, ResourceLimitError
from core.oracle import graphs_equivalent
from core.text_format import load_graph, save_graph
from tools.bench import ALGORITHMS, BenchRunner, compose, summary_lines, write_csv

logger = logging.getLogger("wfst")


def _int_list(text):
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _algo_list(text):
    algos = [part.strip() for part in text.split(',') if part.strip()]
    unknown = [a for a in algos if a not in ALGORITHMS]
    if not algos or unknown:
        raise argparse.ArgumentTypeError(f"algorithms must be drawn from {','.join(ALGORITHMS)}, got {text!r}")
    return algos


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--workers', type=int, help='Worker threads for the parallel engine (overrides WFST_WORKERS)')
    common.add_argument('--epsilon-filter', choices=['on', 'off'], default='on',
                        help='Three-state epsilon filter (off = naive epsilon handling)')
    common.add_argument('--no-trim', action='store_true', help='Skip the final trim sweep')
    common.add_argument('--verify', action='store_true', help='Run both engines and check their outputs agree')
    common.add_argument('--config', help='Alternative config.yaml')
    common.add_argument('-v', '--verbose', action='store_true', help='Debug logging')

    sweep = argparse.ArgumentParser(add_help=False, parents=[common])
    sweep.add_argument('--seed', type=int, default=0, help='Base seed (default: 0)')
    sweep.add_argument('--csv', help='Append BenchRecords to this CSV file')
    sweep.add_argument('--trials', type=int, help='Trials per point (default: 5, and 2 for the largest point)')
    sweep.add_argument('--algos', type=_algo_list, default=list(ALGORITHMS), help='Engines to time (default: seq,par)')

    parser = argparse.ArgumentParser(
        prog='wfst',
        description="Weighted finite-state transducer composition in the log semiring",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s compose a.fst b.fst -o c.fst
  %(prog)s compose a.fst b.fst -o c.fst --algo par --workers 8 --verify
  %(prog)s bench rand-nodes --min-nodes 256 --max-nodes 2048 --trials 3 --csv nodes.csv
  %(prog)s bench rand-arcs --nodes 256 --min-degree 4 --max-degree 64
  %(prog)s bench lexicon --word-counts 1000,2000,4000 --frames 250 --verify

Exit status:
  0 success, 1 usage/parse/contract errors, 2 resource cap exceeded
        """
    )
    commands = parser.add_subparsers(dest='command', required=True)

    cmd = commands.add_parser('compose', parents=[common], help='Compose two graphs stored in text format')
    cmd.add_argument('file_a')
    cmd.add_argument('file_b')
    cmd.add_argument('-o', '--out', required=True, help='Where to write the composed graph')
    cmd.add_argument('--algo', choices=ALGORITHMS, default='seq', help='Engine (default: seq)')

    bench = commands.add_parser('bench', help='Benchmark protocols').add_subparsers(dest='protocol', required=True)

    nodes = bench.add_parser('rand-nodes', parents=[sweep], help='Node-count sweep over random graphs')
    nodes.add_argument('--min-nodes', type=int)
    nodes.add_argument('--max-nodes', type=int)
    nodes.add_argument('--degree', type=int)
    nodes.add_argument('--tokens', type=int)

    arcs = bench.add_parser('rand-arcs', parents=[sweep], help='Out-degree sweep over random graphs')
    arcs.add_argument('--nodes', type=int)
    arcs.add_argument('--min-degree', type=int)
    arcs.add_argument('--max-degree', type=int)

    lexicon = bench.add_parser('lexicon', parents=[sweep], help='Emissions x lexicon-closure sweep')
    lexicon.add_argument('--word-counts', type=_int_list)
    lexicon.add_argument('--phonemes', type=int)
    lexicon.add_argument('--frames', type=int)
    lexicon.add_argument('--lexicon', dest='lexicon_path', help='Lexicon file ("word p1 p2 ..." per line)')
    lexicon.add_argument('--master-words', type=int)
    lexicon.add_argument('--min-len', type=int)
    lexicon.add_argument('--max-len', type=int)
    return parser


def _options(args, settings):
    return ComposeOptions(
        epsilon_filter=args.epsilon_filter == 'on',
        trim_output=not args.no_trim,
        max_pair_states=settings.max_pair_states,
    )


def _flags(args, defaults, names):
    """Explicit flags win over the config's bench section."""
    values = {}
    for name in names:
        value = getattr(args, name, None)
        values[name] = defaults.get(name) if value is None else value
    return values


def run_compose(args, settings, workers):
    A, B = load_graph(args.file_a), load_graph(args.file_b)
    opts = _options(args, settings)

    result, seconds = compose(A, B, args.algo, opts, workers, settings.chunk_tasks)
    if args.verify:
        other = 'par' if args.algo == 'seq' else 'seq'
        check, _ = compose(A, B, other, opts, workers, settings.chunk_tasks)
        if not graphs_equivalent(result, check):
            raise ContractError("seq and par outputs differ")
        print("✅ seq and par outputs are equivalent", file=sys.stderr)

    save_graph(result.graph, args.out)
    print(f"✅ V_C={result.graph.num_nodes} E_C={result.graph.num_arcs} seconds={seconds:.6f} ({args.algo})",
          file=sys.stderr)
    logger.debug("compose stats: %s", result.stats)


def run_bench(args, settings, workers):
    runner = BenchRunner(args.algos, workers, _options(args, settings), args.verify, settings.chunk_tasks)
    protocol = args.protocol.replace('-', '_')
    defaults = settings.bench_defaults(protocol)
    began = time.perf_counter()

    if protocol == 'rand_nodes':
        flags = _flags(args, defaults, ['min_nodes', 'max_nodes', 'degree', 'tokens'])
        records = runner.rand_nodes(trials=args.trials, seed=args.seed, **flags)
    elif protocol == 'rand_arcs':
        flags = _flags(args, defaults, ['nodes', 'min_degree', 'max_degree'])
        records = runner.rand_arcs(trials=args.trials, seed=args.seed, **flags)
    else:
        flags = _flags(args, defaults, ['word_counts', 'phonemes', 'frames', 'master_words', 'min_len', 'max_len'])
        records = runner.lexicon(trials=args.trials, seed=args.seed, lexicon_path=args.lexicon_path, **flags)

    for line in summary_lines(records):
        print(line, file=sys.stderr)
    if args.csv:
        write_csv(records, args.csv)
        print(f"✅ {len(records)} records appended to {args.csv}", file=sys.stderr)
    print(f"✅ {args.protocol} finished in {time.perf_counter() - began:.1f}s", file=sys.stderr)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1

    try:
        settings = load_config(args.config)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else settings.log_level,
            format='%(levelname)s %(name)s: %(message)s',
            stream=sys.stderr,
        )
        workers = resolve_workers(args.workers, settings)

        if args.command == 'compose':
            run_compose(args, settings, workers)
        else:
            run_bench(args, settings, workers)
        return 0

    except KeyboardInterrupt:
        print("\n\n⚠️  Interrupted by user", file=sys.stderr)
        return 1
    except ResourceLimitError as e:
        print(f"\n❌ Resource limit: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"\n❌ Error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
