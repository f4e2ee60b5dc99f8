"""Cyclic Jacobi eigensolver for dense Hermitian matrices.

Rotations are applied in round-robin (tournament) order: each round rotates
``n/2`` disjoint index pairs at once, so a round is a handful of vectorized
row/column updates. The pairing schedule is fixed, which makes the result
bit-reproducible.
"""

from __future__ import annotations

import numpy as np

TOL = 1e-12
MAX_SWEEPS = 60


def round_robin_pairs(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Circle-method schedule covering every pair ``p < q`` exactly once.

    Odd ``n`` gets a phantom index whose pairs are dropped.
    """
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def off_norm(a: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part."""
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigh(matrix, tol: float = TOL, max_sweeps: int = MAX_SWEEPS):
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a Hermitian matrix.

    Stops once the off-diagonal Frobenius mass is at most ``tol`` times the
    Frobenius norm of the input.
    """
    a = np.array(matrix, dtype=complex, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    v = np.eye(n, dtype=complex)
    if n == 0:
        return np.zeros(0), v
    scale = float(np.linalg.norm(a))
    target = tol * scale
    schedule = round_robin_pairs(n)

    for _ in range(max_sweeps):
        if off_norm(a) <= target:
            break
        for p, q in schedule:
            if p.size == 0:
                continue
            apq = a[p, q]
            mag = np.abs(apq)
            active = mag > 1e-280 * scale
            if not np.any(active):
                continue
            app = a[p, p].real
            aqq = a[q, q].real
            # reduce to a real symmetric 2x2 by the phase of a_pq, then rotate
            phase = np.where(active, apq / np.where(active, mag, 1.0), 1.0)
            safe = np.where(active, mag, 1.0)
            theta = (aqq - app) / (2.0 * safe)
            t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(theta == 0.0, 1.0, t)
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # 2x2 block G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
            g_pp = c
            g_pq = s
            g_qp = -s * np.conj(phase)
            g_qq = c * np.conj(phase)

            # A <- A G (columns)
            ap = a[:, p].copy()
            aq = a[:, q]
            a[:, p] = ap * g_pp + aq * g_qp
            a[:, q] = ap * g_pq + aq * g_qq
            # A <- G^H A (rows)
            ap = a[p, :].copy()
            aq = a[q, :]
            a[p, :] = np.conj(g_pp)[:, None] * ap + np.conj(g_qp)[:, None] * aq
            a[q, :] = np.conj(g_pq)[:, None] * ap + np.conj(g_qq)[:, None] * aq
            a[p, q] = 0.0
            a[q, p] = 0.0
            # V <- V G
            vp = v[:, p].copy()
            vq = v[:, q]
            v[:, p] = vp * g_pp + vq * g_qp
            v[:, q] = vp * g_pq + vq * g_qq
    else:
        if off_norm(a) > target:
            raise ArithmeticError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]
