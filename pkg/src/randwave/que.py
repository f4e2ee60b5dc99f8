r"""Random bases per spectral block and their diagonal matrix coefficients.

Each block gets an independent Haar unitary. Working in the eigenbasis of
``Pi A Pi``, the coefficient of the j-th random basis vector is

    <A g_j, g_j> = sum_l nu_l |V_{l,j}|^2 = symbol_avg + sum_l eta_l |V_{l,j}|^2,

the second form being exact on the torus since every block trace equals
``d * symbol_avg``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .concentration import LargeDeviationParams, large_deviation_bound, moment_bound
from .randmat import HaarUnitary, sample_haar_unitaries
from .spectral import ProjectedObservable

DEFAULT_C = 4.0
DEFAULT_TRIALS = 200
# unitaries drawn per batch; batching does not change the random stream
_BATCH_BYTES = 64 * 2**20


def _entries(v) -> np.ndarray:
    return v.entries if isinstance(v, HaarUnitary) else np.asarray(v)


def _check(projected: ProjectedObservable, v: np.ndarray, *cols: int) -> None:
    if v.shape != (projected.dim, projected.dim):
        raise ValueError(f"unitary of shape {v.shape} does not match block dimension {projected.dim}")
    for c in cols:
        if not 0 <= c < projected.dim:
            raise IndexError(f"column {c} out of range for dimension {projected.dim}")


def matrix_coefficient(projected: ProjectedObservable, V, i: int, j: int) -> complex:
    """``sum_l nu_l V_{l,i} conj(V_{l,j})`` with ``V`` expressed in the eigenbasis."""
    v = _entries(V)
    _check(projected, v, i, j)
    return complex(np.sum(projected.eigs * v[:, i] * np.conj(v[:, j])))


def direct_matrix_coefficient(projected: ProjectedObservable, U, i: int, j: int) -> complex:
    """``<A U f_i, U f_j>`` by matrix-vector products in the mode basis.

    ``U`` is expressed in the mode basis; the matching eigenbasis unitary is
    ``to_eigenbasis(projected, U)``. No eigenvalues are used.
    """
    u = _entries(U)
    _check(projected, u, i, j)
    return complex(np.vdot(u[:, j], projected.matrix @ u[:, i]))


def to_eigenbasis(projected: ProjectedObservable, U) -> np.ndarray:
    """``V = T^* U`` with ``T`` the eigenvector matrix of ``Pi A Pi``."""
    return projected.eigvecs.conj().T @ _entries(U)


def recentered_diagonals(projected: ProjectedObservable, V) -> np.ndarray:
    """``sum_l eta_l |V_{l,j}|^2`` for every column ``j`` (works on stacks of unitaries)."""
    v = _entries(V)
    return np.einsum("l,...lj->...j", projected.eta, np.abs(v) ** 2)


def recentered_diagonal(projected: ProjectedObservable, V, j: int) -> float:
    v = _entries(V)
    _check(projected, v, j)
    return float(np.dot(projected.eta, np.abs(v[:, j]) ** 2))


def que_threshold(d: int, C: float = DEFAULT_C) -> float:
    """Deviation threshold ``alpha = C log(d) / d``."""
    if d < 2:
        raise ValueError(f"threshold needs d >= 2, got {d}")
    if C <= 0:
        raise ValueError(f"C must be positive, got {C}")
    return C * math.log(d) / d


def predicted_exceedance(projected: ProjectedObservable, alpha: float) -> float:
    """Union bound over the ``d`` columns of the two-sided large-deviation bound."""
    if projected.second_moment == 0.0:
        return 0.0
    params = LargeDeviationParams(projected.eta, projected.sup_bound)
    return min(1.0, projected.dim * large_deviation_bound(params, alpha))


@dataclass
class DeviationRecord:
    block_index: int
    dim: int
    symbol_avg: float
    second_moment: float
    sup_bound: float
    alpha: float
    trial_count: int
    sup_deviations: np.ndarray
    exceed_count: int
    predicted_bound: float
    # recentered diagonal values of the first trial's basis, in column order
    diagonals: np.ndarray = field(repr=False)

    @property
    def median_sup(self) -> float:
        return float(np.median(self.sup_deviations))

    @property
    def frequency(self) -> float:
        return self.exceed_count / self.trial_count

    @property
    def standard_error(self) -> float:
        p = self.frequency
        return math.sqrt(p * (1 - p) / self.trial_count)


def block_deviation_experiment(
    projected: ProjectedObservable,
    trials: int = DEFAULT_TRIALS,
    C: float = DEFAULT_C,
    rng: Optional[np.random.Generator] = None,
) -> DeviationRecord:
    """Sample ``trials`` Haar bases of the block and record the worst column deviation."""
    d = projected.dim
    if d < 2:
        raise ValueError(f"deviation experiment needs d >= 2, got {d}")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    if rng is None:
        rng = np.random.default_rng()
    alpha = que_threshold(d, C)
    batch = max(1, min(trials, _BATCH_BYTES // (16 * d * d)))
    sups = np.empty(trials)
    first = None
    for start in range(0, trials, batch):
        n = min(batch, trials - start)
        vs = sample_haar_unitaries(d, n, rng)
        diag = recentered_diagonals(projected, vs)
        if first is None:
            first = diag[0].copy()
        sups[start:start + n] = np.max(np.abs(diag), axis=1)
    return DeviationRecord(
        block_index=projected.block.window.index,
        dim=d,
        symbol_avg=projected.symbol_avg,
        second_moment=projected.second_moment,
        sup_bound=projected.sup_bound,
        alpha=alpha,
        trial_count=trials,
        sup_deviations=sups,
        exceed_count=int(np.count_nonzero(sups > alpha)),
        predicted_bound=predicted_exceedance(projected, alpha),
        diagonals=first,
    )


def sample_basis_diagonals(projected: ProjectedObservable, rng: np.random.Generator) -> np.ndarray:
    """One random basis of the block: ``<A g_j, g_j> - symbol_avg`` for each ``j``."""
    return recentered_diagonals(projected, sample_haar_unitaries(projected.dim, 1, rng)[0])


@dataclass(frozen=True)
class ErgodicAverageRecord:
    N: int
    cesaro_mean: float


def ergodic_average(blocks: Iterable, N_grid: Sequence[int]) -> list[ErgodicAverageRecord]:
    """Cesaro means ``(1/N) sum_{j<=N} |<A g_j, g_j> - omega(A)|^2``.

    ``blocks`` is an ordered sequence of DeviationRecords or of arrays of
    recentered diagonal values; basis functions are ordered by (block, column).
    """
    parts = [np.asarray(b.diagonals if isinstance(b, DeviationRecord) else b, dtype=float) for b in blocks]
    sq = np.concatenate(parts) ** 2 if parts else np.zeros(0)
    cum = np.cumsum(sq)
    out = []
    for n in N_grid:
        if n < 1 or n > sq.size:
            raise ValueError(f"need {n} basis functions, have {sq.size}")
        out.append(ErgodicAverageRecord(int(n), float(cum[n - 1] / n)))
    return out


@dataclass(frozen=True)
class SummabilityResult:
    partial_sums: np.ndarray
    slope: Optional[float]
    verdict: bool


def summability_check(
    records: Sequence,
    C: Optional[float] = None,
    max_slope: float = -2.0,
) -> SummabilityResult:
    """Partial sums of the per-block exceedance bounds and a decay verdict.

    The verdict holds when the bounds fall off at least like ``d^max_slope``,
    judged by a least-squares fit of ``log bound`` against ``log d`` over the
    positive terms. When ``C`` is given the bounds are recomputed at
    ``alpha = C log(d) / d`` from each record's ``M`` and ``D``.
    """
    if len(records) < 4:
        raise ValueError(f"need at least 4 blocks, got {len(records)}")
    dims = np.array([r.dim for r in records], dtype=float)
    if C is None:
        terms = np.array([r.predicted_bound for r in records], dtype=float)
    else:
        terms = np.array(
            [min(1.0, r.dim * moment_bound(r.dim, r.second_moment, r.sup_bound, que_threshold(r.dim, C)))
             for r in records],
            dtype=float,
        )
    partial = np.cumsum(terms)
    pos = terms > 0
    if pos.sum() < 2:
        return SummabilityResult(partial, None, True)
    slope = float(np.polyfit(np.log(dims[pos]), np.log(terms[pos]), 1)[0])
    return SummabilityResult(partial, slope, slope <= max_slope)

