import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from core.errors import ConfigError

DEFAULT_CONFIG = Path(__file__).parent.parent / 'config.yaml'
WORKERS_ENV = 'WFST_WORKERS'

BENCH_DEFAULTS = {
    'rand_nodes': {'min_nodes': 256, 'max_nodes': 8192, 'degree': 5, 'tokens': 10},
    'rand_arcs': {'nodes': 256, 'min_degree': 4, 'max_degree': 64},
    'lexicon': {
        'word_counts': [1000, 2000, 4000],
        'phonemes': 69,
        'frames': 250,
        'master_words': 8000,
        'min_len': 3,
        'max_len': 10,
    },
}


@dataclass(frozen=True)
class Settings:
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    max_pair_states: int = 100_000_000
    chunk_tasks: int = 262_144
    log_level: str = 'WARNING'
    bench: dict = field(default_factory=lambda: {k: dict(v) for k, v in BENCH_DEFAULTS.items()})

    def bench_defaults(self, protocol):
        return self.bench.get(protocol, {})


def _positive_int(value, name):
    try:
        number = int(str(value).strip())
    except ValueError:
        number = 0
    if isinstance(value, bool) or number < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    return number


def load_config(config_path=None):
    """Load Settings from config.yaml (or the given path); absent keys fall back to defaults."""
    config_file = Path(config_path) if config_path else DEFAULT_CONFIG

    config = {}
    if config_file.exists():
        with open(config_file, 'r', encoding='utf-8') as f:
            config = yaml.safe_load(f) or {}
    elif config_path:
        raise ConfigError(f"Config file not found: {config_file}")

    if not isinstance(config, dict):
        raise ConfigError(f"{config_file} must contain a mapping")

    defaults = Settings()
    workers = config.get('workers')
    bench = {k: dict(v) for k, v in BENCH_DEFAULTS.items()}
    for protocol, values in (config.get('bench') or {}).items():
        bench.setdefault(protocol, {}).update(values or {})

    return Settings(
        workers=_positive_int(workers, 'workers') if workers is not None else defaults.workers,
        max_pair_states=_positive_int(config.get('max_pair_states', defaults.max_pair_states), 'max_pair_states'),
        chunk_tasks=_positive_int(config.get('chunk_tasks', defaults.chunk_tasks), 'chunk_tasks'),
        log_level=str(config.get('log_level', defaults.log_level)).upper(),
        bench=bench,
    )


def resolve_workers(flag_value, settings):
    """--workers flag wins over WFST_WORKERS, which wins over the config file."""
    if flag_value is not None:
        return _positive_int(flag_value, '--workers')
    env_value = os.environ.get(WORKERS_ENV)
    if env_value:
        return _positive_int(env_value, WORKERS_ENV)
    return settings.workers
