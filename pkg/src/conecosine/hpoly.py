"""H-polynomials ``P_k(x) = det(a' x)**k`` with complex isotropic ``a``.

``a`` is ``n x m`` with ``a' a = 0`` (plain transpose, no conjugation).
Such polynomials are harmonic on R^{nm} and satisfy
``P_k(x g) = det(g)**k P_k(x)`` for every ``g`` in GL(m).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError

__all__ = ["HPolynomial", "make_isotropic", "numeric_laplacian", "isotropy_residual"]

ISOTROPY_RTOL = 1e-12


def isotropy_residual(a: np.ndarray) -> float:
    a = np.asarray(a, dtype=complex)
    # einsum rather than BLAS: fused multiply-adds would leave ~1e-17 where s*s - s*s cancels exactly
    return float(np.max(np.abs(np.einsum("ij,ik->jk", a, a))))


def make_isotropic(n: int, m: int, pairing: Sequence[int] | None = None) -> np.ndarray:
    """Isotropic ``a`` whose column ``j`` is ``(e_p + i e_q) / sqrt(2)``.

    ``pairing`` lists ``2m`` distinct row indices ``(p_1, q_1, p_2, q_2, ...)``;
    the default is ``0, 1, ..., 2m-1``.
    """
    if 2 * m > n:
        raise DimensionError(f"isotropic n x m matrices with disjoint pairs need 2m <= n (n={n}, m={m})")
    idx = list(range(2 * m)) if pairing is None else [int(p) for p in pairing]
    if len(idx) != 2 * m or len(set(idx)) != 2 * m or min(idx) < 0 or max(idx) >= n:
        raise DimensionError("pairing must hold 2m distinct indices in [0, n)")
    a = np.zeros((n, m), dtype=complex)
    s = 1.0 / np.sqrt(2.0)
    for j in range(m):
        a[idx[2 * j], j] = s
        a[idx[2 * j + 1], j] = 1j * s
    return a


@dataclass(frozen=True)
class HPolynomial:
    """``P_k(x) = det(a' x)**k``.

    With ``strict=True`` the constructor enforces isotropy, ``2m <= n`` and
    even degree when ``m = 1``. ``strict=False`` skips these checks, which
    is only useful for building negative controls.
    """

    a: np.ndarray
    k: int
    strict: bool = True

    def __post_init__(self) -> None:
        a = np.array(self.a, dtype=complex)
        if a.ndim == 1:
            a = a[:, None]
        if a.ndim != 2:
            raise DimensionError("a must be an n x m matrix")
        k = int(self.k)
        if k < 0:
            raise DomainError("degree must be non-negative")
        n, m = a.shape
        if self.strict:
            if 2 * m > n:
                raise DimensionError(f"H-polynomials of this form need 2m <= n (n={n}, m={m})")
            scale = float(np.max(np.abs(a))) ** 2
            if isotropy_residual(a) > ISOTROPY_RTOL * max(scale, 1e-300):
                raise DomainError("a is not isotropic: a'a != 0")
            if m == 1 and k % 2:
                raise DomainError("for m = 1 only even degrees are used")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "k", k)

    @classmethod
    def standard(cls, n: int, m: int, k: int, pairing: Sequence[int] | None = None) -> "HPolynomial":
        return cls(make_isotropic(n, m, pairing), k)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.a.shape[1]

    def rotated(self, g: np.ndarray) -> "HPolynomial":
        """The polynomial ``x -> P(g x)`` for orthogonal ``g``."""
        return HPolynomial(np.asarray(g).T @ self.a, self.k, self.strict)

    def eval(self, x) -> complex | np.ndarray:
        """Evaluate at one ``n x m`` matrix or a stack ``(..., n, m)``."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.shape[-2:] != self.a.shape:
            raise DimensionError(f"expected trailing shape {self.a.shape}, got {x.shape[-2:]}")
        if self.k == 0:
            out = np.ones(x.shape[:-2], dtype=complex)
        else:
            out = np.linalg.det(self.a.T @ x) ** self.k
        return complex(out) if out.ndim == 0 else out

    __call__ = eval


def numeric_laplacian(p: HPolynomial, x, h: float = 1e-3) -> complex:
    """Central second-difference Laplacian of ``p`` at ``x`` over all nm coordinates."""
    if h <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, m = x.shape
    steps = np.zeros((n * m, n, m))
    rows, cols = np.unravel_index(np.arange(n * m), (n, m))
    steps[np.arange(n * m), rows, cols] = h
    plus = p.eval(x[None] + steps)
    minus = p.eval(x[None] - steps)
    centre = p.eval(x)
    return complex(np.sum(plus + minus - 2.0 * centre) / h**2)
