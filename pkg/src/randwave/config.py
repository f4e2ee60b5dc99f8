"""Run configuration: a single JSON document, validated into :class:`RunConfig`.

Example::

    {
      "seed": 12345,
      "torus_dim": 2,
      "k_range": [8, 64],
      "observable": [[[1, 0], 0.5, 0.0]],
      "trials": 200,
      "C": 4.0
    }

Observable entries are ``[frequency, re, im]``; the Hermitian partner of each
frequency is added automatically.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from .spectral import Observable

SEED_ENV = "QML_SEED"
FORMATS = ("csv", "json")
SOLVERS = ("jacobi", "lapack")

DEFAULT_HAAR_DIMS = (2, 8, 32)
DEFAULT_HAAR_SAMPLES = 100_000
DEFAULT_DELTAS = (0.05, 0.1, 0.2)
DEFAULT_TAIL_DIMS = (100, 500, 2000)
DEFAULT_TAIL_TRIALS = 100_000


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class RunConfig:
    seed: Optional[int] = None
    torus_dim: int = 2
    window_width: float = 1.0
    k_range: tuple[int, int] = (8, 64)
    observable: Optional[Observable] = None
    trials: int = 200
    C: float = 4.0
    workers: int = 1
    output_dir: Path = Path("out")
    format: str = "csv"
    solver: str = "jacobi"
    haar_dims: tuple[int, ...] = DEFAULT_HAAR_DIMS
    haar_samples: int = DEFAULT_HAAR_SAMPLES
    deltas: tuple[float, ...] = DEFAULT_DELTAS
    tail_dims: tuple[int, ...] = DEFAULT_TAIL_DIMS
    tail_trials: int = DEFAULT_TAIL_TRIALS
    ergodic_grid: Optional[tuple[int, ...]] = None

    @property
    def ks(self) -> range:
        return range(self.k_range[0], self.k_range[1] + 1)


_TOP_KEYS = {
    "seed", "torus_dim", "window_width", "k_range", "observable", "trials", "C",
    "workers", "output_dir", "format", "solver", "haar", "concentration", "ergodic_grid",
}
_HAAR_KEYS = {"dims", "samples"}
_CONC_KEYS = {"deltas", "dims", "trials"}


def _int(path: str, v: Any, lo: Optional[int] = None, hi: Optional[int] = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(path, f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(path, f"must be >= {lo}, got {v}")
    if hi is not None and v > hi:
        raise ConfigError(path, f"must be <= {hi}, got {v}")
    return v


def _real(path: str, v: Any, positive: bool = True) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(path, f"must be positive, got {v}")
    return float(v)


def _list(path: str, v: Any) -> list:
    if not isinstance(v, list) or not v:
        raise ConfigError(path, f"expected a nonempty list, got {v!r}")
    return v


def _check_keys(path: str, obj: Any, allowed: set) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(path or "<root>", f"expected an object, got {type(obj).__name__}")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}" if path else unknown[0], "unknown key")
    return obj


def _observable(raw: Any, n: int) -> Observable:
    entries = _list("observable", raw)
    triples = []
    seen = set()
    for i, entry in enumerate(entries):
        p = f"observable[{i}]"
        if not isinstance(entry, list) or len(entry) != 3:
            raise ConfigError(p, "expected [frequency, re, im]")
        q, re, im = entry
        if not isinstance(q, list) or len(q) != n:
            raise ConfigError(p, f"frequency must be a list of {n} integers")
        q = tuple(_int(f"{p}[0]", c) for c in q)
        if q in seen:
            raise ConfigError(p, f"duplicate frequency {list(q)}")
        seen.add(q)
        triples.append((q, _real(f"{p}[1]", re, False), _real(f"{p}[2]", im, False)))
    try:
        return Observable.from_triples(n, triples)
    except ValueError as exc:
        raise ConfigError("observable", str(exc)) from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration; omitted optional keys take defaults."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"malformed JSON: {exc}") from None
    _check_keys("", raw, _TOP_KEYS)
    cfg = RunConfig()

    if "seed" in raw:
        cfg.seed = _int("seed", raw["seed"], 0, 2**64 - 1)
    if "torus_dim" not in raw:
        raise ConfigError("torus_dim", "required key missing")
    cfg.torus_dim = _int("torus_dim", raw["torus_dim"], 1, 2)
    if "window_width" in raw:
        cfg.window_width = _real("window_width", raw["window_width"])
    if "k_range" not in raw:
        raise ConfigError("k_range", "required key missing")
    kr = raw["k_range"]
    if not isinstance(kr, list) or len(kr) != 2:
        raise ConfigError("k_range", "expected [k_min, k_max]")
    lo, hi = (_int(f"k_range[{i}]", v, 0) for i, v in enumerate(kr))
    if lo > hi:
        raise ConfigError("k_range", f"empty range [{lo}, {hi}]")
    cfg.k_range = (lo, hi)
    if "observable" not in raw:
        raise ConfigError("observable", "required key missing")
    cfg.observable = _observable(raw["observable"], cfg.torus_dim)
    if "trials" in raw:
        cfg.trials = _int("trials", raw["trials"], 1)
    if "C" in raw:
        cfg.C = _real("C", raw["C"])
    if "workers" in raw:
        cfg.workers = _int("workers", raw["workers"], 1)
    if "output_dir" in raw:
        if not isinstance(raw["output_dir"], str) or not raw["output_dir"]:
            raise ConfigError("output_dir", "expected a nonempty path string")
        cfg.output_dir = Path(raw["output_dir"])
    if "format" in raw:
        if raw["format"] not in FORMATS:
            raise ConfigError("format", f"must be one of {FORMATS}")
        cfg.format = raw["format"]
    if "solver" in raw:
        if raw["solver"] not in SOLVERS:
            raise ConfigError("solver", f"must be one of {SOLVERS}")
        cfg.solver = raw["solver"]

    if "haar" in raw:
        h = _check_keys("haar", raw["haar"], _HAAR_KEYS)
        if "dims" in h:
            cfg.haar_dims = tuple(_int(f"haar.dims[{i}]", v, 1) for i, v in enumerate(_list("haar.dims", h["dims"])))
        if "samples" in h:
            cfg.haar_samples = _int("haar.samples", h["samples"], 2)
    if "concentration" in raw:
        c = _check_keys("concentration", raw["concentration"], _CONC_KEYS)
        if "deltas" in c:
            ds = tuple(_real(f"concentration.deltas[{i}]", v) for i, v in enumerate(_list("concentration.deltas", c["deltas"])))
            if any(d >= 1 for d in ds):
                raise ConfigError("concentration.deltas", "each delta must lie in (0, 1)")
            cfg.deltas = ds
        if "dims" in c:
            cfg.tail_dims = tuple(
                _int(f"concentration.dims[{i}]", v, 1) for i, v in enumerate(_list("concentration.dims", c["dims"]))
            )
        if "trials" in c:
            cfg.tail_trials = _int("concentration.trials", c["trials"], 100)
    if "ergodic_grid" in raw:
        cfg.ergodic_grid = tuple(
            _int(f"ergodic_grid[{i}]", v, 1) for i, v in enumerate(_list("ergodic_grid", raw["ergodic_grid"]))
        )
    return cfg


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def resolve_seed(cli_seed: Optional[int], cfg: Optional[RunConfig]) -> int:
    """``--seed`` wins, then the config file, then ``$QML_SEED``."""
    if cli_seed is not None:
        return _int("--seed", cli_seed, 0, 2**64 - 1)
    if cfg is not None and cfg.seed is not None:
        return cfg.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return _int(SEED_ENV, int(env), 0, 2**64 - 1)
        except ValueError:
            raise ConfigError(SEED_ENV, f"not an unsigned 64-bit integer: {env!r}") from None
    raise ConfigError("seed", f"no seed given (config, --seed or ${SEED_ENV})")
