"""Command-line entry point: ``randwave <subcommand> [options]``.

Exit status is 0 on success, 1 on invalid input, 2 on internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from types import SimpleNamespace
from typing import Optional

from . import io, runs
from .config import FORMATS, ConfigError, RunConfig, load_config, resolve_seed
from .que import summability_check
from .spectral import growth_exponent

log = logging.getLogger("randwave")

SUBCOMMANDS = ("haar-test", "concentration", "spectrum", "que", "report")
# subcommands that need an observable and block range
_NEEDS_CONFIG = {"spectrum", "que"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="randwave", description=__doc__.splitlines()[0])
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", type=Path, help="JSON run configuration")
    ap.add_argument("--seed", type=int, help="master seed (overrides the config)")
    ap.add_argument("--out", type=Path, help="output directory")
    ap.add_argument("--format", choices=FORMATS, help="output table format")
    ap.add_argument("--workers", type=int, help="worker threads")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _settings(args) -> RunConfig:
    cfg = load_config(args.config) if args.config is not None else RunConfig()
    if args.subcommand in _NEEDS_CONFIG and cfg.observable is None:
        raise ConfigError("--config", f"'{args.subcommand}' requires a configuration file")
    if args.out is not None:
        cfg.output_dir = args.out
    if args.format is not None:
        cfg.format = args.format
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError("--workers", "must be >= 1")
        cfg.workers = args.workers
    if args.subcommand != "report":
        cfg.seed = resolve_seed(args.seed, cfg)
    return cfg


def cmd_haar(cfg: RunConfig) -> None:
    res = runs.run_haar(cfg.seed, cfg.haar_dims, cfg.haar_samples, cfg.workers)
    rows = [
        (m.d, m.samples, m.mean_abs2, m.se_abs2, m.expected_abs2, m.mean_abs4, m.se_abs4,
         m.expected_abs4, m.max_residual, m.sphere_ks_pvalue)
        for m in res
    ]
    io.write_table(cfg.output_dir, "haar", io.HAAR_HEADER, rows, cfg.format)


def cmd_concentration(cfg: RunConfig) -> None:
    reps = runs.run_tails(cfg.seed, cfg.deltas, cfg.tail_dims, cfg.tail_trials, cfg.workers)
    rows = [
        (r.delta_or_alpha, r.dim, r.empirical[0], r.empirical[1], r.exact_tail, r.bound_optimized, r.bound_quadratic)
        for r in reps
    ]
    io.write_table(cfg.output_dir, "tails", io.TAILS_HEADER, rows, cfg.format)


def _blocks(cfg: RunConfig):
    return runs.run_spectrum(cfg.observable, cfg.ks, cfg.window_width, cfg.solver, cfg.workers)


def cmd_spectrum(cfg: RunConfig) -> None:
    projected = _blocks(cfg)
    rows = [
        (p.block.window.index, p.dim, p.block.window.lower, p.block.window.upper, p.mean,
         p.second_moment, float(p.eigs[0]), float(p.eigs[-1]))
        for p in projected
    ]
    io.write_table(cfg.output_dir, "blocks", io.BLOCKS_HEADER, rows, cfg.format)
    io.write_table(cfg.output_dir, "weyl", io.WEYL_HEADER, runs.weyl_rows(projected, cfg.torus_dim), cfg.format)
    eps = growth_exponent([p.block.window.index for p in projected], [p.dim for p in projected])
    if eps is not None:
        log.info("block growth fit: d_k ~ k^%.3f", eps)


def cmd_que(cfg: RunConfig) -> None:
    projected = _blocks(cfg)
    run = runs.run_que(cfg.seed, projected, cfg.trials, cfg.C, cfg.workers, cfg.ergodic_grid)
    rows = [
        (r.block_index, r.dim, r.alpha, r.trial_count, r.exceed_count, r.median_sup, r.predicted_bound)
        for r in run.records
    ]
    io.write_table(cfg.output_dir, "que", io.QUE_HEADER, rows, cfg.format)
    io.write_table(cfg.output_dir, "ergodic", io.ERGODIC_HEADER, [(e.N, e.cesaro_mean) for e in run.ergodic], cfg.format)
    if run.summability is not None:
        s = run.summability
        rows = [
            (r.block_index, r.dim, r.predicted_bound, float(ps))
            for r, ps in zip(run.records, s.partial_sums)
        ]
        io.write_table(cfg.output_dir, "summability", io.SUMMABILITY_HEADER, rows, cfg.format)
        slope = "n/a" if s.slope is None else f"{s.slope:.3f}"
        log.info("summability: slope %s, verdict %s", slope, s.verdict)


def _find(out_dir: Path, name: str) -> Optional[Path]:
    for ext in ("csv", "json"):
        p = out_dir / f"{name}.{ext}"
        if p.exists():
            return p
    return None


def render_report(out_dir: Path) -> str:
    """Plain-text summary of whatever tables exist in ``out_dir``."""
    lines = [f"randwave report for {out_dir}", ""]
    found = False
    if (p := _find(out_dir, "haar")) is not None:
        found = True
        lines.append("Haar moments (|U_11|^2, |U_11|^4):")
        for r in io.read_table(p):
            z2 = (r["mean_abs2"] - r["expected_abs2"]) / r["se_abs2"]
            z4 = (r["mean_abs4"] - r["expected_abs4"]) / r["se_abs4"]
            lines.append(
                f"  d={r['d']:>4}  E|U|^2 z={z2:+.2f}  E|U|^4 z={z4:+.2f}  "
                f"residual={r['max_unitarity_residual']:.1e}  sphere KS p={r['sphere_ks_pvalue']:.3f}"
            )
        lines.append("")
    if (p := _find(out_dir, "tails")) is not None:
        found = True
        lines.append("Exponential-sum upper tails:")
        for r in io.read_table(p):
            chain = r["empirical"] <= r["exact"] + 4 * r["se"] and r["exact"] <= r["opt_bound"] <= r["quad_bound"]
            lines.append(
                f"  delta={r['delta']:<5} d={r['d']:>5}  empirical={r['empirical']:.3e}  exact={r['exact']:.3e}  "
                f"optimized={r['opt_bound']:.3e}  quadratic={r['quad_bound']:.3e}  ordering {'ok' if chain else 'VIOLATED'}"
            )
        lines.append("")
    if (p := _find(out_dir, "blocks")) is not None:
        found = True
        rows = io.read_table(p)
        lines.append(f"Spectral blocks: {len(rows)} (k={rows[0]['k']}..{rows[-1]['k']})" if rows else "Spectral blocks: none")
        for r in rows:
            lines.append(f"  k={r['k']:>4} d={r['d']:>5}  mean={r['mean']:+.3e}  M={r['M']:.4g}  nu in [{r['nu_min']:.4f}, {r['nu_max']:.4f}]")
        lines.append("")
    if (p := _find(out_dir, "que")) is not None:
        found = True
        rows = io.read_table(p)
        lines.append("QUE deviation experiment:")
        for r in rows:
            freq = r["exceed"] / r["trials"]
            lines.append(
                f"  k={r['k']:>4} d={r['d']:>5}  alpha={r['alpha']:.4f}  exceed={r['exceed']}/{r['trials']} ({freq:.3f})  "
                f"median sup={r['median_sup']:.4f}  bound={r['predicted_bound']:.3g}"
            )
        if (s := _find(out_dir, "summability")) is not None:
            res = summability_check([SimpleNamespace(dim=r["d"], predicted_bound=r["predicted_bound"]) for r in io.read_table(s)])
            slope = "n/a" if res.slope is None else f"{res.slope:.3f}"
            lines.append(f"  summability: slope={slope} verdict={res.verdict}")
        lines.append("")
    if (p := _find(out_dir, "ergodic")) is not None:
        found = True
        lines.append("Cesaro means:")
        for r in io.read_table(p):
            lines.append(f"  N={r['N']:>6}  {r['cesaro_mean']:.4e}")
        lines.append("")
    if not found:
        raise ConfigError("--out", f"no result tables found in {out_dir}")
    return "\n".join(lines)


def cmd_report(cfg: RunConfig) -> None:
    text = render_report(Path(cfg.output_dir))
    (Path(cfg.output_dir) / "report.txt").write_text(text + "\n")
    sys.stdout.write(text + "\n")


COMMANDS = {
    "haar-test": cmd_haar,
    "concentration": cmd_concentration,
    "spectrum": cmd_spectrum,
    "que": cmd_que,
    "report": cmd_report,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = _settings(args)
        COMMANDS[args.subcommand](cfg)
    except (ConfigError, OSError) as exc:
        log.error("%s", exc)
        return 1
    except Exception:
        log.exception("internal error")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
