"""Regularized incomplete gamma functions P(a, x) and Q(a, x).

Series for ``x < a + 1``, Lentz continued fraction otherwise; whichever side is
computed directly, the other is its complement.
"""

from __future__ import annotations

import math
import sys

EPS = 1e-14
_TINY = sys.float_info.min / sys.float_info.epsilon


def _stirling_remainder(a: float) -> float:
    """``lgamma(a) - ((a - 1/2) log a - a + log(2 pi)/2)``."""
    if a < 15.0:
        return math.lgamma(a) - ((a - 0.5) * math.log(a) - a + 0.5 * math.log(2 * math.pi))
    a2 = a * a
    return (1 / 12 - (1 / 360 - (1 / 1260 - 1 / (1680 * a2)) / a2) / a2) / a


def _prefactor(a: float, x: float) -> float:
    # x^a e^-x / Gamma(a), arranged to avoid cancelling large logs when x ~ a
    u = (x - a) / a
    if u < -0.5:
        # far from x ~ a there is no cancellation to guard against
        return math.exp(a * math.log(x) - x - math.lgamma(a))
    log_ratio = -a * (u - math.log1p(u))
    return math.exp(log_ratio + 0.5 * math.log(a / (2 * math.pi)) - _stirling_remainder(a))


def _series_p(a: float, x: float, max_iter: int) -> float:
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(max_iter):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * EPS:
            return total * _prefactor(a, x)
    raise ArithmeticError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _contfrac_q(a: float, x: float, max_iter: int) -> float:
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, max_iter + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h * _prefactor(a, x)
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def gamma_pq(a: float, x: float) -> tuple[float, float]:
    """Return ``(P(a, x), Q(a, x))``."""
    if a <= 0:
        raise ValueError(f"shape a must be positive, got {a}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0:
        return 0.0, 1.0
    max_iter = 1000 + 20 * int(math.sqrt(a) + 1) + int(x)
    if x < a + 1.0:
        p = min(1.0, _series_p(a, x, max_iter))
        return p, 1.0 - p
    q = min(1.0, _contfrac_q(a, x, max_iter))
    return 1.0 - q, q


def gammainc_lower(a: float, x: float) -> float:
    return gamma_pq(a, x)[0]


def gammainc_upper(a: float, x: float) -> float:
    return gamma_pq(a, x)[1]
