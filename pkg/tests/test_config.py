import json

import pytest

from randwave.config import ConfigError, RunConfig, parse_config, resolve_seed

BASE = {"torus_dim": 2, "k_range": [8, 16], "observable": [[[1, 0], 0.5, 0.0]]}


def cfg_text(**over):
    d = dict(BASE)
    d.update(over)
    return json.dumps(d)


def test_defaults():
    cfg = parse_config(cfg_text())
    assert cfg.trials == 200 and cfg.C == 4.0 and cfg.workers == 1
    assert cfg.format == "csv" and cfg.solver == "jacobi" and cfg.seed is None
    assert list(cfg.ks) == list(range(8, 17))
    assert cfg.observable.coefficient((-1, 0)) == 0.5


def test_nested_sections():
    cfg = parse_config(cfg_text(haar={"dims": [3], "samples": 50}, concentration={"deltas": [0.3], "dims": [10], "trials": 200}))
    assert cfg.haar_dims == (3,) and cfg.haar_samples == 50
    assert cfg.deltas == (0.3,) and cfg.tail_dims == (10,) and cfg.tail_trials == 200


@pytest.mark.parametrize(
    "over, key",
    [
        ({"k_range": [5]}, "k_range"),
        ({"k_range": [9, 3]}, "k_range"),
        ({"k_range": [-1, 3]}, "k_range"),
        ({"torus_dim": 3}, "torus_dim"),
        ({"trials": 0}, "trials"),
        ({"C": -1}, "C"),
        ({"format": "xml"}, "format"),
        ({"bogus": 1}, "bogus"),
        ({"observable": [[[1, 0], 0.5, 0.0], [[1, 0], 0.5, 0.0]]}, "observable"),
        ({"observable": [[[1], 0.5, 0.0]]}, "observable"),
        ({"haar": {"nope": 1}}, "haar.nope"),
        ({"concentration": {"deltas": [1.5]}}, "concentration.deltas"),
    ],
)
def test_invalid_names_key(over, key):
    with pytest.raises(ConfigError) as exc:
        parse_config(cfg_text(**over))
    assert exc.value.path.startswith(key)
    assert key.split(".")[0] in str(exc.value)


@pytest.mark.parametrize("missing", ["torus_dim", "k_range", "observable"])
def test_required(missing):
    d = dict(BASE)
    del d[missing]
    with pytest.raises(ConfigError, match=missing):
        parse_config(json.dumps(d))


def test_malformed_json():
    with pytest.raises(ConfigError):
        parse_config("{not json")


def test_seed_precedence(monkeypatch):
    monkeypatch.setenv("QML_SEED", "7")
    cfg = RunConfig(seed=5)
    assert resolve_seed(3, cfg) == 3
    assert resolve_seed(None, cfg) == 5
    assert resolve_seed(None, RunConfig()) == 7
    monkeypatch.delenv("QML_SEED")
    with pytest.raises(ConfigError):
        resolve_seed(None, RunConfig())
    monkeypatch.setenv("QML_SEED", "abc")
    with pytest.raises(ConfigError):
        resolve_seed(None, RunConfig())
