"""Tail bounds for sums of exponentials and for Haar quadratic forms.

Closed-form and optimized exponential-moment (Chernoff) bounds, the exact
Gamma(d, 1) tail, and a Monte Carlo harness to compare them against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .gamma import gamma_pq
from .randmat import HaarUnitary, sample_exponentials

# the (5/8) t^2 relaxation of log(1 - t) only holds for t < 1/4
_RELAXATION_T_MAX = 0.25


class DomainError(ValueError):
    pass


def _clamp(p: float) -> float:
    return min(1.0, max(0.0, p))


@dataclass
class TailBoundReport:
    """One threshold/dimension row: closed-form, optimized, exact and empirical tails."""

    delta_or_alpha: float
    dim: int
    bound_quadratic: float
    bound_optimized: float
    exact_tail: Optional[float] = None
    empirical: Optional[tuple[float, float, int]] = None
    side: str = "upper"


@dataclass
class LargeDeviationParams:
    recentered_eigs: np.ndarray
    sup_bound: float
    second_moment: float = field(init=False)

    def __post_init__(self):
        eta = np.asarray(self.recentered_eigs, dtype=float)
        if eta.ndim != 1 or eta.size == 0:
            raise ValueError("recentered_eigs must be a nonempty 1-D array")
        self.recentered_eigs = eta
        d = eta.size
        max_abs = float(np.max(np.abs(eta)))
        if self.sup_bound < max_abs:
            raise ValueError(f"sup_bound {self.sup_bound} below max |eta| = {max_abs}")
        if abs(eta.sum()) > 1e-10 * d * max(self.sup_bound, 1e-300):
            raise ValueError(f"recentered eigenvalues do not sum to zero (sum={eta.sum():.3e})")
        self.second_moment = float(np.dot(eta, eta))

    @classmethod
    def from_eigs(cls, eigs) -> "LargeDeviationParams":
        """Recenter ``eigs`` and take ``D = max |eta|``."""
        nu = np.asarray(eigs, dtype=float)
        eta = nu - nu.mean()
        return cls(eta, float(np.max(np.abs(eta))))

    @property
    def dim(self) -> int:
        return self.recentered_eigs.size


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")


def chernoff_upper_exponential_sum(delta: float, d: int) -> TailBoundReport:
    """Bounds on ``P(e_1 + ... + e_d > (1 + delta) d)``.

    ``bound_quadratic`` minimizes ``-t delta + (5/8) t^2`` over ``0 < t <= 1/4``
    (interior optimum ``t = 4 delta / 5`` for ``delta <= 5/16``, giving
    ``exp(-2/5 delta^2 d)``). ``bound_optimized`` is the exact infimum over t of the
    moment-generating-function bound, ``exp(-d (delta - log(1 + delta)))``.
    """
    _check_delta(delta)
    t = min(0.8 * delta, _RELAXATION_T_MAX)
    quad = math.exp(-d * (t * delta - 0.625 * t * t))
    opt = math.exp(-d * (delta - math.log1p(delta)))
    return TailBoundReport(delta, d, _clamp(quad), _clamp(opt), side="upper")


def chernoff_lower_exponential_sum(delta: float, d: int) -> TailBoundReport:
    """Bounds on ``P(e_1 + ... + e_d < (1 - delta) d)``: ``exp(-delta^2 d / 2)`` at
    ``t = delta`` and the exact optimum ``exp(d (delta + log(1 - delta)))``."""
    _check_delta(delta)
    quad = math.exp(-0.5 * delta * delta * d)
    opt = math.exp(d * (delta + math.log1p(-delta)))
    return TailBoundReport(delta, d, _clamp(quad), _clamp(opt), side="lower")


def gamma_tail_exact(d: int, threshold: float, side: str = "upper") -> float:
    """Exact tail of a sum of ``d`` unit exponentials (a Gamma(d, 1) variable)."""
    if threshold <= 0:
        raise DomainError(f"threshold must be positive, got {threshold}")
    p, q = gamma_pq(float(d), float(threshold))
    if side == "upper":
        return _clamp(q)
    if side == "lower":
        return _clamp(p)
    raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")


def lln_decompose(exponentials, delta: float) -> tuple[float, bool]:
    """Write ``sum(e) = (1 + theta) d`` on the event ``|sum(e)/d - 1| < delta``.

    Off the event ``theta`` is 0.
    """
    e = np.asarray(exponentials, dtype=float)
    d = e.size
    s = float(e.sum())
    event = (1.0 - delta) * d < s < (1.0 + delta) * d
    theta = s / d - 1.0 if event else 0.0
    return theta, bool(event)


def lln_failure_bound(delta: float, d: int) -> float:
    """Closed-form bound on the probability that the LLN event fails."""
    up = chernoff_upper_exponential_sum(delta, d).bound_quadratic
    lo = chernoff_lower_exponential_sum(delta, d).bound_quadratic
    return _clamp(up + lo)


def large_deviation_bound(params: LargeDeviationParams, alpha: float) -> float:
    """Two-sided bound on ``P(|sum_l eta_l |U_{l,i}|^2| > alpha)`` for a Haar column.

    Uses ``E exp(t sum eta_l e_l) <= exp(M t^2)`` for ``2 t D <= 1`` (from
    ``-log(1 - x) <= x + x^2`` on ``|x| <= 1/2`` and ``sum eta = 0``), optimized at
    ``t* = min(alpha d / 2M, 1/2D)``. In the interior regime this is
    ``2 exp(-alpha^2 d^2 / 4M)``. The LLN-failure term is not included; see
    :func:`lln_failure_bound`.
    """
    return moment_bound(params.dim, params.second_moment, params.sup_bound, alpha)


def moment_bound(d: int, second_moment: float, sup_bound: float, alpha: float) -> float:
    """:func:`large_deviation_bound` from the summary statistics ``(d, M, D)`` alone."""
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    m = second_moment
    if m == 0.0:
        return 0.0
    t = alpha * d / (2.0 * m)
    if sup_bound > 0:
        t = min(t, 1.0 / (2.0 * sup_bound))
    return _clamp(2.0 * math.exp(-t * alpha * d + m * t * t))


def quadratic_form(eigs, unitary, column: int) -> float:
    """``sum_l eigs_l |U_{l, column}|^2``."""
    u = unitary.entries if isinstance(unitary, HaarUnitary) else np.asarray(unitary)
    eigs = np.asarray(eigs, dtype=float)
    if u.shape[0] != eigs.size:
        raise ValueError(f"dimension mismatch: {eigs.size} eigenvalues, unitary of size {u.shape[0]}")
    if not 0 <= column < u.shape[1]:
        raise IndexError(f"column {column} out of range for dimension {u.shape[1]}")
    return float(np.dot(eigs, np.abs(u[:, column]) ** 2))


def empirical_tail(
    statistic_sampler: Callable[[np.random.Generator, int], np.ndarray],
    threshold: float,
    trials: int,
    rng: np.random.Generator,
    batch: int = 1000,
) -> tuple[float, float]:
    """Monte Carlo frequency of ``|statistic| > threshold``.

    ``statistic_sampler(rng, n)`` returns ``n`` independent draws of the statistic.
    Returns the estimate and its binomial standard error.
    """
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")
    hits = 0
    done = 0
    while done < trials:
        n = min(batch, trials - done)
        x = np.asarray(statistic_sampler(rng, n))
        hits += int(np.count_nonzero(np.abs(x) > threshold))
        done += n
    p = hits / trials
    return p, math.sqrt(p * (1.0 - p) / trials)


def exponential_sum_sampler(d: int) -> Callable[[np.random.Generator, int], np.ndarray]:
    """Sampler of ``e_1 + ... + e_d`` for :func:`empirical_tail`."""
    # keep each batch under ~2e7 draws
    def sample(rng: np.random.Generator, n: int) -> np.ndarray:
        chunk = max(1, 20_000_000 // d)
        out = np.empty(n)
        for start in range(0, n, chunk):
            stop = min(n, start + chunk)
            out[start:stop] = sample_exponentials((stop - start, d), rng).sum(axis=1)
        return out

    return sample


def tail_report(delta: float, d: int, trials: int, rng: np.random.Generator) -> TailBoundReport:
    """Upper-tail report for ``sum e_k > (1 + delta) d``, with a Monte Carlo estimate."""
    rep = chernoff_upper_exponential_sum(delta, d)
    threshold = (1.0 + delta) * d
    rep.exact_tail = gamma_tail_exact(d, threshold, "upper")
    if trials:
        est, se = empirical_tail(exponential_sum_sampler(d), threshold, trials, rng)
        rep.empirical = (est, se, trials)
    return rep
