r"""Haar unitaries, uniform complex-sphere vectors and their phase/exponential form.

Conventions: for a sampled unitary ``V``, row ``l`` indexes the eigenbasis of the
compressed observable and column ``i`` indexes the original basis, so
``V[l, i]`` is the coefficient :math:`V_{\ell, i}`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import open_uniform

SPHERE_RESAMPLE_NORM = 1e-150


class InvalidDimensionError(ValueError):
    pass


def _check_dim(d) -> int:
    if int(d) != d or d < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    # (re, im) pairs are drawn adjacently, so a batch of n is the same stream as
    # n single draws
    z = rng.standard_normal((*shape, 2))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


@dataclass(frozen=True)
class HaarUnitary:
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def unitarity_residual(self) -> float:
        u = self.entries
        return float(np.max(np.abs(u @ u.conj().T - np.eye(self.dim))))


@dataclass(frozen=True)
class SphereDecomposition:
    phases: np.ndarray
    exponentials: np.ndarray
    vector: np.ndarray


def sample_haar_unitaries(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of ``n`` independent Haar unitaries of size ``d``, shape ``(n, d, d)``.

    QR of a complex Ginibre matrix, with each column of Q multiplied by the phase
    of the matching diagonal entry of R. Without that correction the law of Q
    depends on the QR convention and is not Haar.
    """
    d = _check_dim(d)
    z = _complex_gaussian(rng, (n, d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phase = diag / np.abs(diag)
    return q * phase[..., None, :]


def sample_haar_unitary(d: int, rng: np.random.Generator) -> HaarUnitary:
    return HaarUnitary(sample_haar_unitaries(d, 1, rng)[0])


def sample_sphere_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the unit sphere of C^d (normalized complex Gaussian)."""
    d = _check_dim(d)
    while True:
        g = _complex_gaussian(rng, (d,))
        norm = np.linalg.norm(g)
        if norm >= SPHERE_RESAMPLE_NORM:
            return g / norm


def sample_sphere_vectors(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` sphere vectors as rows; batch version of :func:`sample_sphere_vector`."""
    d = _check_dim(d)
    g = _complex_gaussian(rng, (n, d))
    norms = np.linalg.norm(g, axis=1)
    bad = norms < SPHERE_RESAMPLE_NORM
    while np.any(bad):
        g[bad] = _complex_gaussian(rng, (int(bad.sum()), d))
        norms[bad] = np.linalg.norm(g[bad], axis=1)
        bad = norms < SPHERE_RESAMPLE_NORM
    return g / norms[:, None]


def sample_exponentials(d, rng: np.random.Generator) -> np.ndarray:
    """Unit-rate exponentials by inversion, ``-log(u)`` with ``u`` in (0, 1).

    ``d`` may be an int or a shape tuple.
    """
    shape = (_check_dim(d),) if np.isscalar(d) else tuple(d)
    return -np.log(open_uniform(rng, shape))


def sample_phases(d, rng: np.random.Generator) -> np.ndarray:
    shape = (_check_dim(d),) if np.isscalar(d) else tuple(d)
    return np.exp(2j * np.pi * rng.random(shape))


def decompose_sphere_vector(phases, exponentials) -> np.ndarray:
    """Assemble ``X_k = xi_k * sqrt(e_k / sum(e))``.

    With uniform phases and iid unit exponentials the result is uniform on the
    complex unit sphere. Works row-wise on 2-D input.
    """
    xi = np.asarray(phases, dtype=complex)
    e = np.asarray(exponentials, dtype=float)
    if xi.shape != e.shape:
        raise ValueError(f"shape mismatch: phases {xi.shape}, exponentials {e.shape}")
    if xi.size == 0 or xi.shape[-1] == 0:
        raise InvalidDimensionError("empty input")
    if np.any(~(e > 0)):
        raise ValueError("exponentials must be strictly positive")
    if np.any(np.abs(np.abs(xi) - 1.0) > 1e-12):
        raise ValueError("phases must have unit modulus")
    x = xi * np.sqrt(e / e.sum(axis=-1, keepdims=True))
    # one rescale pass brings the norm to 1 within a couple of ulps
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def sample_sphere_decomposition(d: int, rng: np.random.Generator) -> SphereDecomposition:
    xi = sample_phases(d, rng)
    e = sample_exponentials(d, rng)
    return SphereDecomposition(xi, e, decompose_sphere_vector(xi, e))
