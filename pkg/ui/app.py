"""Streamlit dashboard over the benchmark protocols."""

from __future__ import annotations

import contextlib
import io
import sys
from dataclasses import asdict
from pathlib import Path

import streamlit as st

# Ensure project root is importable when running via `streamlit run ui/app.py`
PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from core.compose_seq import ComposeOptions
from core.config import load_config
from tools.bench import BenchRunner, summary_lines

PROTOCOLS = {
    "Random graphs: node sweep": "rand_nodes",
    "Random graphs: out-degree sweep": "rand_arcs",
    "Lexicon x emissions": "lexicon",
}


def run_benchmark(protocol: str, params: dict, algos: list[str], workers: int, trials: int,
                  seed: int, verify: bool, epsilon_filter: bool = True) -> tuple[list, str]:
    """Run one protocol in-process while capturing stdout/stderr."""
    buffer = io.StringIO()
    opts = ComposeOptions(epsilon_filter=epsilon_filter)

    with contextlib.redirect_stdout(buffer), contextlib.redirect_stderr(buffer):
        runner = BenchRunner(algos, workers, opts, verify, out=buffer)
        records = getattr(runner, protocol)(trials=trials, seed=seed, **params)
        for line in summary_lines(records):
            print(line)

    return records, buffer.getvalue()


settings = load_config()

st.set_page_config(page_title="WFST Composition Bench", page_icon="📊", layout="wide")
st.title("WFST Composition Benchmarks")

st.write("Pick a protocol, set the sweep, and compare the sequential and parallel engines.")

label = st.selectbox("Protocol", list(PROTOCOLS))
protocol = PROTOCOLS[label]
defaults = settings.bench_defaults(protocol)

params: dict = {}
if protocol == "rand_nodes":
    col1, col2, col3, col4 = st.columns(4)
    params["min_nodes"] = col1.number_input("Min nodes", min_value=2, value=64)
    params["max_nodes"] = col2.number_input("Max nodes", min_value=2, value=256)
    params["degree"] = col3.number_input("Degree", min_value=0, value=int(defaults.get("degree", 5)))
    params["tokens"] = col4.number_input("Tokens", min_value=1, value=int(defaults.get("tokens", 10)))
elif protocol == "rand_arcs":
    col1, col2, col3 = st.columns(3)
    params["nodes"] = col1.number_input("Nodes", min_value=2, value=int(defaults.get("nodes", 256)))
    params["min_degree"] = col2.number_input("Min degree", min_value=0, value=int(defaults.get("min_degree", 4)))
    params["max_degree"] = col3.number_input("Max degree", min_value=0, value=16)
else:
    col1, col2, col3 = st.columns(3)
    counts = col1.text_input("Word counts", value="100,200,400")
    params["phonemes"] = col2.number_input("Phonemes", min_value=1, value=int(defaults.get("phonemes", 69)))
    params["frames"] = col3.number_input("Frames", min_value=1, value=50)
    params["word_counts"] = [int(c) for c in counts.split(",") if c.strip()]
    params["min_len"] = int(defaults.get("min_len", 3))
    params["max_len"] = int(defaults.get("max_len", 10))

col1, col2, col3, col4 = st.columns(4)
algos = col1.multiselect("Engines", ["seq", "par"], default=["seq", "par"])
workers = col2.number_input("Workers", min_value=1, value=settings.workers)
trials = col3.number_input("Trials", min_value=1, value=2)
seed = col4.number_input("Seed", min_value=0, value=0)
verify = st.toggle("Verify seq/par equivalence", value=False)
epsilon_filter = st.toggle("Epsilon filter", value=True)

run_btn = st.button("Run benchmark")

if run_btn:
    if not algos:
        st.warning("Please pick at least one engine.")
    else:
        with st.spinner("Composing..."):
            try:
                records, output = run_benchmark(
                    protocol, {k: (int(v) if isinstance(v, (int, float)) else v) for k, v in params.items()},
                    algos, int(workers), int(trials), int(seed), verify, epsilon_filter,
                )
                if records:
                    st.dataframe([asdict(r) for r in records], use_container_width=True)
                else:
                    st.info("No records produced.")
                if output:
                    st.code(output, language="text")
            except Exception as exc:  # surface any unexpected errors
                st.error(f"Error: {exc}")

st.caption(
    "Tip: timings cover composition only. Use `main.py bench ... --csv out.csv` for full-size sweeps."
)
