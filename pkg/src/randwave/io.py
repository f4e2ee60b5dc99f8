"""Deterministic CSV/JSON table writers."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

BLOCKS_HEADER = ("k", "d", "lambda_lo", "lambda_hi", "mean", "M", "nu_min", "nu_max")
WEYL_HEADER = ("lambda", "count", "leading_term", "rel_error")
TAILS_HEADER = ("delta", "d", "empirical", "se", "exact", "opt_bound", "quad_bound")
QUE_HEADER = ("k", "d", "alpha", "trials", "exceed", "median_sup", "predicted_bound")
ERGODIC_HEADER = ("N", "cesaro_mean")
SUMMABILITY_HEADER = ("k", "d", "predicted_bound", "partial_sum")
HAAR_HEADER = (
    "d", "samples", "mean_abs2", "se_abs2", "expected_abs2", "mean_abs4", "se_abs4",
    "expected_abs4", "max_unitarity_residual", "sphere_ks_pvalue",
)


def fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def write_table(out_dir: Path, name: str, header: Sequence[str], rows: Iterable[Sequence], fmt: str = "csv") -> Path:
    """Write ``rows`` under ``out_dir/name.{csv,json}`` and return the path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [tuple(r) for r in rows]
    for r in rows:
        if len(r) != len(header):
            raise ValueError(f"{name}: row has {len(r)} fields, header has {len(header)}")
    if fmt == "csv":
        path = out_dir / f"{name}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([fmt_value(v) for v in r])
    elif fmt == "json":
        path = out_dir / f"{name}.json"
        doc = [
            {h: (float(fmt_value(v)) if isinstance(v, float) else v) for h, v in zip(header, r)}
            for r in rows
        ]
        path.write_text(json.dumps(doc, indent=1) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def read_table(path: Path) -> list[dict]:
    path = Path(path)
    if path.suffix == ".json":
        return json.loads(path.read_text())
    with open(path, newline="") as fh:
        return [{k: _parse(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def _parse(s: str):
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s
