"""Frames on the Stiefel manifold V_{n,m}: Haar sampling, decompositions, volumes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cone_core import PosDefMatrix
from .cone_gamma import log_siegel_gamma
from .errors import DimensionError, DomainError, RankError
from .mc import RngStream

__all__ = [
    "FRAME_TOL",
    "StiefelFrame",
    "stiefel_mass",
    "sample_haar",
    "sample_haar_batch",
    "polar_decompose",
    "triangular_decompose",
    "orthocomplement",
    "projection_volume",
    "coordinate_frame",
    "random_rotation",
]

FRAME_TOL = 1e-10
RANK_RTOL = 1e-10
EIG_FLOOR = 1e-30


@dataclass(frozen=True)
class StiefelFrame:
    """An ``n x m`` matrix with orthonormal columns."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.entries, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < v.shape[1]:
            raise DimensionError(f"a frame needs shape (n, m) with n >= m, got {v.shape}")
        resid = np.max(np.abs(v.T @ v - np.eye(v.shape[1])))
        if resid > FRAME_TOL:
            raise DomainError(f"columns are not orthonormal (residual {resid:.2e})")
        v.setflags(write=False)
        object.__setattr__(self, "entries", v)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, StiefelFrame):
        return x.entries
    x = np.asarray(x, dtype=float)
    return x[:, None] if x.ndim == 1 else x


def stiefel_mass(n: int, m: int) -> float:
    """Total Haar mass ``2**m pi**(nm/2) / Gamma_m(n/2)`` of V_{n,m}."""
    if not (n >= m >= 1):
        raise DimensionError(f"need n >= m >= 1, got n={n}, m={m}")
    log_mass = m * np.log(2.0) + n * m / 2.0 * np.log(np.pi) - log_siegel_gamma(m, n / 2.0).real
    return float(np.exp(log_mass))


def _orthonormalize(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    sign = np.where(d < 0.0, -1.0, 1.0)
    return q * sign[..., None, :], np.abs(d)


def sample_haar_batch(n: int, m: int, size: int, gen: np.random.Generator) -> np.ndarray:
    """``size`` Haar-distributed frames, shape ``(size, n, m)``.

    QR of a Gaussian matrix, with columns flipped so the triangular factor
    has a positive diagonal. Rank-deficient draws (probability zero) are
    redrawn once.
    """
    if not (n >= m >= 1):
        raise DimensionError(f"need n >= m >= 1, got n={n}, m={m}")
    g = gen.standard_normal((size, n, m))
    q, d = _orthonormalize(g)
    bad = np.min(d, axis=-1) <= RANK_RTOL * np.max(d, axis=-1)
    if np.any(bad):
        q2, d2 = _orthonormalize(gen.standard_normal((int(bad.sum()), n, m)))
        if np.any(np.min(d2, axis=-1) <= RANK_RTOL * np.max(d2, axis=-1)):
            raise RankError("Gaussian draw was rank deficient twice")
        q[bad] = q2
    return q


def sample_haar(n: int, m: int, rng: RngStream | np.random.Generator) -> StiefelFrame:
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    return StiefelFrame(sample_haar_batch(n, m, 1, gen)[0])


def _check_rank(x: np.ndarray) -> None:
    sv = np.linalg.svd(x, compute_uv=False)
    if sv.size == 0 or sv[-1] <= RANK_RTOL * sv[0]:
        raise RankError("matrix does not have full column rank")


def polar_decompose(x) -> tuple[StiefelFrame, PosDefMatrix]:
    """``x = v r**(1/2)`` with ``r = x' x`` and the symmetric square root."""
    x = _as_matrix(x)
    if x.shape[0] < x.shape[1]:
        raise DimensionError("need n >= m")
    _check_rank(x)
    r = x.T @ x
    w, e = np.linalg.eigh(r)
    if w[0] < EIG_FLOOR:
        raise RankError("x'x has a vanishing eigenvalue")
    inv_sqrt = (e / np.sqrt(w)) @ e.T
    return StiefelFrame(x @ inv_sqrt), PosDefMatrix.from_array(r)


def triangular_decompose(x) -> tuple[StiefelFrame, np.ndarray]:
    """``x = u t`` with ``t`` upper triangular, positive diagonal, ``t' t = x' x``."""
    x = _as_matrix(x)
    if x.shape[0] < x.shape[1]:
        raise DimensionError("need n >= m")
    _check_rank(x)
    q, r = np.linalg.qr(x)
    sign = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    return StiefelFrame(q * sign), sign[:, None] * r


def orthocomplement(v) -> StiefelFrame:
    """A frame spanning the orthogonal complement of ``span(v)``."""
    v = _as_matrix(v)
    n, m = v.shape
    if n <= m:
        raise DimensionError("orthocomplement needs n > m")
    q, _ = np.linalg.qr(v, mode="complete")
    w = q[:, m:]
    # one Gram-Schmidt pass against v sharpens orthogonality
    w = w - v @ (v.T @ w)
    w, _ = np.linalg.qr(w)
    return StiefelFrame(w)


def projection_volume(u, v, lam: complex = 1.0) -> complex:
    """``|det(v' u)| ** lam``; at ``lam = 1`` the projection volume of the spans."""
    u, v = _as_matrix(u), _as_matrix(v)
    if u.shape != v.shape:
        raise DimensionError(f"frame shapes differ: {u.shape} vs {v.shape}")
    d = abs(np.linalg.det(v.T @ u))
    lam = complex(lam)
    if d == 0.0:
        if lam.real > 0:
            return 0j
        raise DomainError("projection volume is zero and Re lam <= 0")
    return complex(np.exp(lam * np.log(d)))


def coordinate_frame(n: int, m: int, columns=None) -> StiefelFrame:
    """Frame of standard basis vectors (the first ``m`` by default)."""
    cols = list(range(m)) if columns is None else list(columns)
    v = np.zeros((n, len(cols)))
    v[cols, np.arange(len(cols))] = 1.0
    return StiefelFrame(v)


def random_rotation(n: int, gen: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of SO(n)."""
    g = sample_haar_batch(n, n, 1, gen)[0]
    if np.linalg.det(g) < 0:
        g[:, 0] = -g[:, 0]
    return g
