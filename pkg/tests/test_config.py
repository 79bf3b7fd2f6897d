import os

import pytest

from core.config import DEFAULT_CONFIG, WORKERS_ENV, Settings, load_config, resolve_workers
from core.errors import ConfigError


def test_repo_config_loads():
    assert DEFAULT_CONFIG.exists()
    settings = load_config()
    assert settings.workers == (os.cpu_count() or 1)
    assert settings.max_pair_states == 100_000_000
    assert settings.bench_defaults("rand_nodes") == {"min_nodes": 256, "max_nodes": 8192, "degree": 5, "tokens": 10}
    assert settings.bench_defaults("lexicon")["frames"] == 250


def test_partial_config_keeps_defaults(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("workers: 3\nlog_level: debug\nbench:\n  rand_nodes:\n    degree: 7\n", encoding="utf-8")
    settings = load_config(path)
    assert settings.workers == 3
    assert settings.log_level == "DEBUG"
    assert settings.chunk_tasks == Settings().chunk_tasks
    assert settings.bench_defaults("rand_nodes")["degree"] == 7
    assert settings.bench_defaults("rand_nodes")["tokens"] == 10


def test_empty_config_file(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("", encoding="utf-8")
    assert load_config(path).max_pair_states == 100_000_000
    assert not hasattr(load_config(path), "max_paths")


@pytest.mark.parametrize("text", ["workers: 0\n", "workers: many\n", "max_pair_states: -5\n", "- just\n- a list\n"])
def test_invalid_config(tmp_path, text):
    path = tmp_path / "config.yaml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_explicit_config(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.yaml")


def test_worker_precedence(monkeypatch):
    settings = Settings(workers=3)
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert resolve_workers(None, settings) == 3
    monkeypatch.setenv(WORKERS_ENV, "5")
    assert resolve_workers(None, settings) == 5
    assert resolve_workers(2, settings) == 2
    monkeypatch.setenv(WORKERS_ENV, "zero")
    with pytest.raises(ConfigError):
        resolve_workers(None, settings)
    with pytest.raises(ConfigError):
        resolve_workers(0, settings)
