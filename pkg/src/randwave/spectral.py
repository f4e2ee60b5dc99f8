r"""Spectral blocks of :math:`\sqrt{\Delta}` on the flat torus and compressed observables.

On :math:`T^n = (\mathbb{R}/2\pi\mathbb{Z})^n` the normalized exponentials
:math:`f_m(x) = (2\pi)^{-n/2} e^{i m \cdot x}` are eigenfunctions with eigenvalue
:math:`|m|`. A multiplication observable with Fourier coefficients
:math:`\hat a(q)` acts by :math:`\langle A f_m, f_{m'} \rangle = \hat a(m' - m)`,
so its compression to a block is an exact, banded Hermitian matrix.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from .jacobi import jacobi_eigh

log = logging.getLogger(__name__)

SUPPORTED_DIMS = (1, 2)


@dataclass(frozen=True)
class LatticeMode:
    coords: tuple[int, ...]

    @property
    def norm_sq(self) -> int:
        return sum(c * c for c in self.coords)

    @property
    def eigenvalue(self) -> float:
        return math.sqrt(self.norm_sq)


@dataclass(frozen=True)
class SpectralWindow:
    """Half-open eigenvalue window ``[lower, upper)`` with index ``k``."""

    lower: float
    upper: float
    index: int = 0

    def __post_init__(self):
        if not 0 <= self.lower < self.upper:
            raise ValueError(f"need 0 <= lower < upper, got [{self.lower}, {self.upper})")

    @classmethod
    def unit(cls, k: int, width: float = 1.0) -> "SpectralWindow":
        """The window ``[k w, (k + 1) w)``."""
        return cls(k * width, (k + 1) * width, k)


@dataclass(frozen=True)
class SpectralBlock:
    window: SpectralWindow
    torus_dim: int
    coords: np.ndarray  # (d, n) int64, rows sorted lexicographically

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    @property
    def empty(self) -> bool:
        return self.dim == 0

    @property
    def modes(self) -> list[LatticeMode]:
        return [LatticeMode(tuple(int(c) for c in row)) for row in self.coords]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.sqrt(np.sum(self.coords**2, axis=1).astype(float))

    def permuted(self, order) -> "SpectralBlock":
        """Same block with modes listed in a different order (a different eigenbasis choice)."""
        return SpectralBlock(self.window, self.torus_dim, self.coords[np.asarray(order)])


def _in_window_sq(norm_sq: np.ndarray, lower: float, upper: float) -> np.ndarray:
    # compare squared norms; exact for integer window bounds
    return (norm_sq >= lower * lower) & (norm_sq < upper * upper)


def _box(n: int, radius: int) -> np.ndarray:
    r = np.arange(-radius, radius + 1, dtype=np.int64)
    grids = np.meshgrid(*([r] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def enumerate_block(window: SpectralWindow, n: int) -> SpectralBlock:
    """All ``m`` in Z^n with ``lower <= |m| < upper``, lexicographically sorted."""
    if n not in SUPPORTED_DIMS:
        raise ValueError(f"torus dimension must be one of {SUPPORTED_DIMS}, got {n}")
    pts = _box(n, int(math.ceil(window.upper)))
    keep = _in_window_sq(np.sum(pts**2, axis=1), window.lower, window.upper)
    # meshgrid with 'ij' indexing over a sorted range is already lexicographic
    return SpectralBlock(window, n, pts[keep])


def weyl_count(lam: float, n: int) -> tuple[int, float, float]:
    """Lattice count ``#{m : |m| <= lam}``, the leading Weyl term, and their relative gap.

    Leading term is ``pi lam^2`` on T^2 and ``2 lam`` on T^1.
    """
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if n == 1:
        count = 2 * int(math.floor(lam)) + 1
        lead = 2.0 * lam
    elif n == 2:
        r = int(math.floor(lam))
        xs = np.arange(-r, r + 1, dtype=np.int64)
        lam_sq = lam * lam
        # for each column x, count y with x^2 + y^2 <= lam^2
        ymax = np.floor(np.sqrt(np.maximum(lam_sq - xs**2, 0.0))).astype(np.int64)
        # repair float rounding at exact lattice radii
        ymax += ((ymax + 1) ** 2 + xs**2 <= lam_sq).astype(np.int64)
        ymax -= (ymax**2 + xs**2 > lam_sq).astype(np.int64)
        count = int(np.sum(2 * ymax + 1))
        lead = math.pi * lam_sq
    else:
        raise ValueError(f"torus dimension must be one of {SUPPORTED_DIMS}, got {n}")
    return count, lead, count / lead - 1.0


class Observable:
    """Real trigonometric polynomial ``a(x) = sum_q a_q e^{i q.x}`` on T^n.

    ``coeffs`` maps frequency tuples to complex values; the Hermitian partner
    ``a_{-q} = conj(a_q)`` is filled in when missing.
    """

    def __init__(self, torus_dim: int, coeffs: Mapping[tuple[int, ...], complex]):
        if torus_dim not in SUPPORTED_DIMS:
            raise ValueError(f"torus dimension must be one of {SUPPORTED_DIMS}, got {torus_dim}")
        self.torus_dim = torus_dim
        full: dict[tuple[int, ...], complex] = {}
        for q, val in coeffs.items():
            q = tuple(int(c) for c in q)
            if len(q) != torus_dim:
                raise ValueError(f"frequency {q} has length {len(q)}, expected {torus_dim}")
            val = complex(val)
            neg = tuple(-c for c in q)
            if q == neg:
                if val.imag != 0.0:
                    raise ValueError(f"zero-frequency coefficient must be real, got {val}")
            elif neg in coeffs and complex(coeffs[neg]) != val.conjugate():
                raise ValueError(f"coefficients at {q} and {neg} are not complex conjugates")
            full[q] = val
            full[neg] = val.conjugate()
        self.coeffs = {q: v for q, v in sorted(full.items()) if v != 0}

    @classmethod
    def from_triples(cls, torus_dim: int, triples: Iterable) -> "Observable":
        """Build from ``[q, re, im]`` entries; repeated frequencies are rejected."""
        coeffs: dict[tuple[int, ...], complex] = {}
        for q, re, im in triples:
            q = tuple(int(c) for c in q)
            if q in coeffs:
                raise ValueError(f"duplicate frequency {list(q)}")
            coeffs[q] = complex(re, im)
        return cls(torus_dim, coeffs)

    @classmethod
    def constant(cls, torus_dim: int, c: float = 1.0) -> "Observable":
        return cls(torus_dim, {(0,) * torus_dim: c})

    @classmethod
    def cosine(cls, torus_dim: int, axis: int = 0) -> "Observable":
        """``cos x_{axis}``."""
        q = [0] * torus_dim
        q[axis] = 1
        return cls(torus_dim, {tuple(q): 0.5})

    @property
    def operator_norm_bound(self) -> float:
        return float(sum(abs(v) for v in self.coeffs.values()))

    def coefficient(self, q) -> complex:
        return self.coeffs.get(tuple(int(c) for c in q), 0j)

    def __call__(self, x) -> np.ndarray:
        """Evaluate ``a`` at points ``x`` of shape ``(..., n)``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1], dtype=complex)
        for q, v in self.coeffs.items():
            out += v * np.exp(1j * (x @ np.asarray(q, dtype=float)))
        return out.real

    def key(self) -> tuple:
        return (self.torus_dim, tuple(self.coeffs.items()))

    def __eq__(self, other):
        return isinstance(other, Observable) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Observable(n={self.torus_dim}, coeffs={self.coeffs})"


def symbol_average(obs: Observable) -> float:
    """Torus mean of ``a``, i.e. the zero Fourier coefficient."""
    return obs.coefficient((0,) * obs.torus_dim).real


def observable_matrix(obs: Observable, block: SpectralBlock) -> np.ndarray:
    """Compression to the block: entry ``(row m', col m) = a_{m' - m}``."""
    if obs.torus_dim != block.torus_dim:
        raise ValueError(f"observable on T^{obs.torus_dim} but block on T^{block.torus_dim}")
    d = block.dim
    mat = np.zeros((d, d), dtype=complex)
    index = {tuple(row): i for i, row in enumerate(block.coords.tolist())}
    rows = block.coords.tolist()
    for q, val in obs.coeffs.items():
        for i, m in enumerate(rows):
            j = index.get(tuple(a + b for a, b in zip(m, q)))
            if j is not None:
                mat[j, i] = val
    return mat


def _hermitian_defect(mat: np.ndarray) -> float:
    return float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0


def projected_eigenvalues(matrix, solver: str = "jacobi", return_vectors: bool = False):
    """Sorted eigenvalues of a Hermitian matrix (and eigenvectors as columns on request)."""
    mat = np.asarray(matrix, dtype=complex)
    scale = max(float(np.max(np.abs(mat))) if mat.size else 0.0, 1.0)
    if _hermitian_defect(mat) > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian within 1e-12")
    if solver == "jacobi":
        w, v = jacobi_eigh(mat)
    elif solver == "lapack":
        w, v = np.linalg.eigh(mat)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    return (w, v) if return_vectors else w


def recenter(nu) -> tuple[np.ndarray, float]:
    nu = np.asarray(nu, dtype=float)
    if nu.size == 0:
        raise ValueError("cannot recenter an empty spectrum")
    mean = float(nu.mean())
    return nu - mean, mean


@dataclass
class ProjectedObservable:
    """``Pi_k A Pi_k`` on one block, with its spectrum and recentered statistics."""

    block: SpectralBlock
    observable: Observable
    matrix: np.ndarray
    eigs: np.ndarray
    eigvecs: np.ndarray
    eta: np.ndarray = field(init=False)
    mean: float = field(init=False)
    second_moment: float = field(init=False)

    def __post_init__(self):
        self.eta, self.mean = recenter(self.eigs)
        self.second_moment = float(np.dot(self.eta, self.eta))

    @property
    def dim(self) -> int:
        return self.block.dim

    @property
    def norm_bound(self) -> float:
        return self.observable.operator_norm_bound

    @property
    def symbol_avg(self) -> float:
        return symbol_average(self.observable)

    @property
    def sup_bound(self) -> float:
        return float(np.max(np.abs(self.eta)))


def project(obs: Observable, block: SpectralBlock, solver: str = "jacobi") -> ProjectedObservable:
    if block.empty:
        raise ValueError(f"block k={block.window.index} is empty")
    mat = observable_matrix(obs, block)
    w, v = projected_eigenvalues(mat, solver=solver, return_vectors=True)
    return ProjectedObservable(block, obs, mat, w, v)


def project_blocks(
    obs: Observable,
    ks: Iterable[int],
    width: float = 1.0,
    solver: str = "jacobi",
    min_dim: int = 1,
) -> list[ProjectedObservable]:
    """Project onto each window ``[k w, (k+1) w)``; blocks below ``min_dim`` are skipped and logged."""
    out = []
    for k in ks:
        block = enumerate_block(SpectralWindow.unit(k, width), obs.torus_dim)
        if block.dim < min_dim:
            log.info("skipping block k=%d with d=%d", k, block.dim)
            continue
        out.append(project(obs, block, solver))
    return out


def szego_moment(projected: ProjectedObservable, m: int) -> float:
    """``(1/d) Tr((Pi A Pi)^m) = (1/d) sum nu^m``."""
    if m < 1:
        raise ValueError(f"moment order must be >= 1, got {m}")
    return float(np.mean(projected.eigs**m))


def trivial_bound_check(projected: ProjectedObservable) -> bool:
    bound = projected.norm_bound
    tol = 1e-12 * max(bound, 1.0)
    return bool(projected.eigs[0] >= -bound - tol and projected.eigs[-1] <= bound + tol)


def local_weyl_mean(projected: ProjectedObservable) -> float:
    """``(1/d) Tr(Pi A Pi)`` computed from the matrix diagonal."""
    return float(np.trace(projected.matrix).real / projected.dim)


def eigen_residual(projected: ProjectedObservable) -> float:
    """``max_j ||M v_j - nu_j v_j||``."""
    r = projected.matrix @ projected.eigvecs - projected.eigvecs * projected.eigs
    return float(np.max(np.linalg.norm(r, axis=0)))


def growth_exponent(ks, dims) -> Optional[float]:
    """Slope of ``log d_k`` against ``log k`` (the epsilon in ``d_k > C k^eps``)."""
    ks = np.asarray(ks, dtype=float)
    dims = np.asarray(dims, dtype=float)
    ok = (ks > 0) & (dims > 0)
    if ok.sum() < 2:
        return None
    return float(np.polyfit(np.log(ks[ok]), np.log(dims[ok]), 1)[0])
