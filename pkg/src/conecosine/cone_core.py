"""Composite power functions on the cone of positive-definite matrices.

For ``r`` in the cone of symmetric positive-definite ``m x m`` matrices and
an exponent ``lam = (lam_1, ..., lam_m)`` the composite power is

    r**lam = prod_i (D_i(r) / D_{i-1}(r)) ** (lam_i / 2)

where ``D_i`` are the leading principal minors (``D_0 = 1``). Writing
``r = t' t`` with ``t`` upper triangular with positive diagonal gives the
equivalent character form ``prod_j t_jj ** lam_j``.

Note the convention for ``m = 1``: the composite power of ``[r]`` is
``r ** (lam / 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ConditioningError, DimensionError, DomainError

__all__ = [
    "ConeExponent",
    "PosDefMatrix",
    "as_exponent",
    "principal_minors",
    "composite_power",
    "triangular_character",
    "star_involution",
    "invariant_measure_density",
    "exponent_ops",
    "batch_upper_factor",
    "batch_composite_power",
]

# minor ratio below this fraction of ||r||_max is treated as the cone boundary
CONDITIONING_FLOOR = 1e-30
SYMMETRY_RTOL = 1e-10


@dataclass(frozen=True)
class ConeExponent:
    """A complex exponent vector ``(lam_1, ..., lam_m)``."""

    entries: tuple[complex, ...]

    def __post_init__(self) -> None:
        ent = tuple(complex(e) for e in self.entries)
        if len(ent) < 1:
            raise DimensionError("a cone exponent needs at least one entry")
        object.__setattr__(self, "entries", ent)

    @classmethod
    def constant(cls, m: int, value: complex) -> "ConeExponent":
        """The vector ``(value, ..., value)`` of length ``m``."""
        return cls((value,) * m)

    @property
    def m(self) -> int:
        return len(self.entries)

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=complex)

    def reverse(self) -> "ConeExponent":
        return ConeExponent(self.entries[::-1])

    def trace(self) -> complex:
        return complex(sum(self.entries))

    def shift(self, alpha: complex) -> "ConeExponent":
        return ConeExponent(tuple(e + alpha for e in self.entries))

    def is_constant(self, tol: float = 0.0) -> bool:
        return all(abs(e - self.entries[0]) <= tol for e in self.entries)

    def __add__(self, other: "ConeExponent") -> "ConeExponent":
        other = as_exponent(other)
        if other.m != self.m:
            raise DimensionError(f"exponent lengths differ: {self.m} vs {other.m}")
        return ConeExponent(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "ConeExponent":
        return ConeExponent(tuple(-e for e in self.entries))

    def __sub__(self, other: "ConeExponent") -> "ConeExponent":
        return self + (-as_exponent(other))

    def __len__(self) -> int:
        return self.m

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, j: int) -> complex:
        return self.entries[j]


ExponentLike = Union[ConeExponent, Sequence[complex], np.ndarray, complex, float, int]


def as_exponent(lam: ExponentLike, m: int | None = None) -> ConeExponent:
    """Coerce ``lam`` to a :class:`ConeExponent`.

    A scalar is broadcast to length ``m`` (which must then be given).
    """
    if isinstance(lam, ConeExponent):
        out = lam
    elif np.isscalar(lam):
        if m is None:
            raise DimensionError("scalar exponent needs an explicit length m")
        out = ConeExponent.constant(m, complex(lam))
    else:
        out = ConeExponent(tuple(np.asarray(lam, dtype=complex).ravel()))
    if m is not None and out.m != m:
        raise DimensionError(f"exponent has length {out.m}, expected {m}")
    return out


@dataclass(frozen=True)
class PosDefMatrix:
    """Symmetric positive-definite matrix with its upper-triangular factor.

    ``factor`` is the unique upper-triangular ``t`` with positive diagonal
    such that ``entries == t.T @ t``.
    """

    entries: np.ndarray
    factor: np.ndarray = field(repr=False)

    @classmethod
    def from_array(cls, r: Iterable) -> "PosDefMatrix":
        arr = np.array(r, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
        scale = float(np.max(np.abs(arr))) if arr.size else 0.0
        if not np.all(np.isfinite(arr)):
            raise DomainError("matrix has non-finite entries")
        if np.max(np.abs(arr - arr.T)) > SYMMETRY_RTOL * max(scale, 1.0):
            raise DomainError("matrix is not symmetric")
        arr = 0.5 * (arr + arr.T)
        try:
            lower = np.linalg.cholesky(arr)
        except np.linalg.LinAlgError as exc:
            raise DomainError("matrix is not positive definite") from exc
        t = lower.T.copy()
        pivots = np.diag(t) ** 2
        if np.any(pivots < CONDITIONING_FLOOR * scale):
            raise ConditioningError(
                "minor ratio below conditioning floor; matrix is too close to the cone boundary"
            )
        arr.setflags(write=False)
        t.setflags(write=False)
        return cls(arr, t)

    @classmethod
    def from_factor(cls, t: Iterable) -> "PosDefMatrix":
        """Build ``t' t`` from an upper-triangular ``t`` with positive diagonal."""
        t = _check_triangular(t)
        return cls.from_array(t.T @ t)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def det(self) -> float:
        return float(np.prod(np.diag(self.factor)) ** 2)

    def inverse(self) -> "PosDefMatrix":
        return PosDefMatrix.from_array(np.linalg.inv(self.entries))


def _as_posdef(r) -> PosDefMatrix:
    return r if isinstance(r, PosDefMatrix) else PosDefMatrix.from_array(r)


def _check_triangular(t) -> np.ndarray:
    t = np.array(t, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {t.shape}")
    if np.any(np.tril(t, -1) != 0.0):
        raise DomainError("matrix is not upper triangular")
    if np.any(np.diag(t) <= 0.0):
        raise DomainError("triangular factor needs a strictly positive diagonal")
    return t


def principal_minors(r) -> np.ndarray:
    """Leading principal minors ``(D_1(r), ..., D_m(r))`` from the cached factor."""
    r = _as_posdef(r)
    return np.cumprod(np.diag(r.factor) ** 2)


def triangular_character(t, lam: ExponentLike) -> complex:
    """``prod_j t_jj ** lam_j`` for upper-triangular ``t`` with positive diagonal."""
    t = _check_triangular(t)
    lam = as_exponent(lam, t.shape[0])
    return complex(np.exp(np.sum(lam.as_array() * np.log(np.diag(t)))))


def composite_power(r, lam: ExponentLike, method: str = "triangular") -> complex:
    """Composite power ``r**lam``.

    ``method="triangular"`` reads the diagonal of the cached factor;
    ``method="minors"`` forms ratios of leading-block determinants directly.
    Bases are positive reals, so complex powers use the real logarithm.
    """
    r = _as_posdef(r)
    lam = as_exponent(lam, r.m)
    if method == "triangular":
        log_base = 2.0 * np.log(np.diag(r.factor))
    elif method == "minors":
        minors = np.array([np.linalg.det(r.entries[:i, :i]) for i in range(1, r.m + 1)])
        ratios = minors / np.concatenate(([1.0], minors[:-1]))
        log_base = np.log(ratios)
    else:
        raise ValueError(f"unknown method {method!r}")
    return complex(np.exp(np.sum(lam.as_array() * log_base / 2.0)))


def star_involution(r) -> PosDefMatrix:
    """``omega r omega`` with ``omega`` the anti-diagonal permutation."""
    r = _as_posdef(r)
    return PosDefMatrix.from_array(r.entries[::-1, ::-1])


def invariant_measure_density(r) -> float:
    """Density ``det(r) ** (-(m+1)/2)`` of the GL(m)-invariant measure."""
    r = _as_posdef(r)
    return float(r.det() ** (-(r.m + 1) / 2.0))


def exponent_ops(lam: ExponentLike) -> dict:
    lam = as_exponent(lam)
    return {"reverse": lam.reverse(), "trace": lam.trace(), "shift": lam.shift}


def batch_upper_factor(r: np.ndarray) -> np.ndarray:
    """Upper-triangular factors of a stack of symmetric matrices, shape ``(..., m, m)``.

    Never raises: a non-positive pivot leaves NaN on that diagonal entry
    and everything after it, so callers can mask the bad rows.
    """
    r = np.asarray(r, dtype=float)
    m = r.shape[-1]
    t = np.zeros_like(r)
    with np.errstate(invalid="ignore", divide="ignore"):
        for j in range(m):
            piv = r[..., j, j] - np.sum(t[..., :j, j] ** 2, axis=-1)
            tjj = np.sqrt(np.where(piv > 0.0, piv, np.nan))
            t[..., j, j] = tjj
            if j + 1 < m:
                off = r[..., j, j + 1:] - np.einsum("...k,...kl->...l", t[..., :j, j], t[..., :j, j + 1:])
                t[..., j, j + 1:] = off / tjj[..., None]
    return t


def batch_composite_power(r: np.ndarray, lam: ExponentLike) -> tuple[np.ndarray, np.ndarray]:
    """Composite powers of a stack of matrices.

    Returns ``(values, ok)``; ``ok`` is False where a pivot is non-positive
    or non-finite, and the corresponding value is NaN.
    """
    r = np.asarray(r, dtype=float)
    m = r.shape[-1]
    lam = as_exponent(lam, m).as_array()
    t = batch_upper_factor(r)
    diag = np.diagonal(t, axis1=-2, axis2=-1)
    ok = np.all(np.isfinite(diag) & (diag > 0.0), axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        logs = np.where(ok[..., None], np.log(np.where(ok[..., None], diag, 1.0)), 0.0)
        vals = np.exp(logs @ lam)
    vals = np.where(ok, vals, np.nan + 0j)
    return vals, ok
