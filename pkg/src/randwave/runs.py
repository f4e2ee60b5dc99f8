"""Experiment drivers behind the CLI subcommands.

Each driver takes a master seed and derives one random stream per work item
(dimension, grid point or block), so outputs do not depend on ``workers``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import rng as rngmod
from .concentration import TailBoundReport, tail_report
from .que import (
    DeviationRecord,
    ErgodicAverageRecord,
    SummabilityResult,
    block_deviation_experiment,
    ergodic_average,
    summability_check,
)
from .randmat import (
    decompose_sphere_vector,
    sample_exponentials,
    sample_haar_unitaries,
    sample_phases,
    sample_sphere_vectors,
)
from .spectral import (
    Observable,
    ProjectedObservable,
    SpectralWindow,
    enumerate_block,
    project,
    weyl_count,
)

log = logging.getLogger(__name__)

HAAR_BATCH = 2000
KS_SAMPLES = 10_000


@dataclass
class HaarMoments:
    d: int
    samples: int
    mean_abs2: float
    se_abs2: float
    mean_abs4: float
    se_abs4: float
    max_residual: float
    sphere_ks_pvalue: float

    @property
    def expected_abs2(self) -> float:
        return 1.0 / self.d

    @property
    def expected_abs4(self) -> float:
        return 2.0 / (self.d * (self.d + 1))


def haar_moments(d: int, samples: int, rng: np.random.Generator) -> HaarMoments:
    """Moments of ``|U_11|^2`` over Haar samples, the worst unitarity residual, and a
    KS comparison of the Gaussian and phase/exponential sphere samplers."""
    x = np.empty(samples)
    worst = 0.0
    eye = np.eye(d)
    for start in range(0, samples, HAAR_BATCH):
        n = min(HAAR_BATCH, samples - start)
        u = sample_haar_unitaries(d, n, rng)
        x[start:start + n] = np.abs(u[:, 0, 0]) ** 2
        res = np.abs(u @ np.conj(np.swapaxes(u, -1, -2)) - eye).max()
        worst = max(worst, float(res))
    x2 = x * x
    m = min(samples, KS_SAMPLES)
    direct = np.abs(sample_sphere_vectors(d, m, rng)[:, 0]) ** 2
    decomposed = np.abs(decompose_sphere_vector(sample_phases((m, d), rng), sample_exponentials((m, d), rng))[:, 0]) ** 2
    pvalue = float(stats.ks_2samp(direct, decomposed).pvalue)
    return HaarMoments(
        d, samples,
        float(x.mean()), float(x.std(ddof=1) / math.sqrt(samples)),
        float(x2.mean()), float(x2.std(ddof=1) / math.sqrt(samples)),
        worst, pvalue,
    )


def run_haar(seed: int, dims, samples: int, workers: int = 1) -> list[HaarMoments]:
    return rngmod.parallel_map(
        lambda d: haar_moments(d, samples, rngmod.make_rng(seed, rngmod.HAAR, d)), dims, workers
    )


def run_tails(seed: int, deltas, dims, trials: int, workers: int = 1) -> list[TailBoundReport]:
    grid = [(i, delta, d) for i, (delta, d) in enumerate((a, b) for a in deltas for b in dims)]
    return rngmod.parallel_map(
        lambda g: tail_report(g[1], g[2], trials, rngmod.make_rng(seed, rngmod.TAILS, g[0])), grid, workers
    )


def run_spectrum(obs: Observable, ks, width: float = 1.0, solver: str = "jacobi", workers: int = 1) -> list[ProjectedObservable]:
    """Projected observables for each nonempty block; empty blocks are logged and skipped."""

    def one(k):
        block = enumerate_block(SpectralWindow.unit(k, width), obs.torus_dim)
        if block.empty:
            log.info("skipping empty block k=%d", k)
            return None
        return project(obs, block, solver)

    return [p for p in rngmod.parallel_map(one, ks, workers) if p is not None]


def weyl_rows(projected: list[ProjectedObservable], n: int) -> list[tuple]:
    rows = []
    for p in projected:
        lam = p.block.window.upper
        count, lead, rel = weyl_count(lam, n)
        rows.append((lam, count, lead, rel))
    return rows


@dataclass
class QueRun:
    records: list[DeviationRecord]
    ergodic: list[ErgodicAverageRecord]
    summability: SummabilityResult | None


def default_ergodic_grid(total: int) -> tuple[int, ...]:
    grid = sorted({max(1, total >> s) for s in (3, 2, 1, 0)})
    return tuple(grid)


def run_que(
    seed: int,
    projected: list[ProjectedObservable],
    trials: int,
    C: float,
    workers: int = 1,
    ergodic_grid=None,
) -> QueRun:
    usable = []
    for p in projected:
        if p.dim < 2:
            log.info("skipping block k=%d with d=%d < 2", p.block.window.index, p.dim)
        else:
            usable.append(p)
    records = rngmod.parallel_map(
        lambda p: block_deviation_experiment(p, trials, C, rngmod.make_rng(seed, rngmod.QUE, p.block.window.index)),
        usable,
        workers,
    )
    total = sum(r.dim for r in records)
    ergodic = []
    if total:
        grid = ergodic_grid or default_ergodic_grid(total)
        ergodic = ergodic_average(records, [n for n in grid if n <= total])
    summ = summability_check(records) if len(records) >= 4 else None
    if summ is None:
        log.warning("summability check needs >= 4 blocks, have %d", len(records))
    return QueRun(records, ergodic, summ)
