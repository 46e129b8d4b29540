"""The composite cosine transform on V_{n,m}.

    (T^lam f)(u) = int_{V_{n,m}} f(v) (u' v v' u)**lam dv

For constant exponents the kernel is ``|det(v' u)|**lam``. On H-polynomials
the transform acts by a scalar ``c * mu_k(lam)`` built from cone gamma
functions; the zeros of ``mu_k`` witness non-injectivity.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .cone_core import ExponentLike, as_exponent, batch_composite_power
from .cone_gamma import (
    classify,
    gamma_shift_ratio,
    log_gamma_omega,
    log_siegel_gamma,
    reciprocal_gamma_omega,
)
from .errors import DimensionError, DomainError, PoleError
from .hpoly import HPolynomial
from .mc import McEstimate, run_sharded
from .stiefel import StiefelFrame, _as_matrix, _check_rank, sample_haar_batch, stiefel_mass

__all__ = [
    "IntegrandSpec",
    "EigenResidual",
    "cosine_mc",
    "avg_closed_form",
    "avg_projection_volume",
    "multiplier",
    "eigen_constant",
    "eigen_residual",
    "funk_hecke_eigenvalue",
    "i_power",
]

GRAM_EIG_FLOOR = 1e-30
VANISH_TOL = 1e-12


def i_power(p: int) -> complex:
    """``1j ** p`` without rounding noise."""
    return (1 + 0j, 1j, -1 + 0j, -1j)[p % 4]


@dataclass(frozen=True)
class IntegrandSpec:
    """The function ``f`` on V_{n,m}: the constant 1 or an H-polynomial."""

    poly: HPolynomial | None = None

    @classmethod
    def one(cls) -> "IntegrandSpec":
        return cls(None)

    @classmethod
    def h_polynomial(cls, p: HPolynomial) -> "IntegrandSpec":
        return cls(p)

    @property
    def kind(self) -> str:
        return "constant_one" if self.poly is None else "h_polynomial"

    def evaluate(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if self.poly is None:
            return np.ones(v.shape[:-2], dtype=complex)
        return np.asarray(self.poly.eval(v))

    def check_dims(self, n: int, m: int) -> None:
        if self.poly is not None and (self.poly.n, self.poly.m) != (n, m):
            raise DimensionError(f"polynomial acts on {self.poly.n}x{self.poly.m}, frame is {n}x{m}")


def _as_integrand(f) -> IntegrandSpec:
    if f is None:
        return IntegrandSpec.one()
    if isinstance(f, HPolynomial):
        return IntegrandSpec.h_polynomial(f)
    return f


def cosine_mc(
    f,
    lam: ExponentLike,
    u,
    n_samples: int = 100_000,
    seed: int = 0,
    *,
    workers: int | None = None,
) -> McEstimate:
    """Monte Carlo estimate of ``(T^lam f)(u)`` over Haar draws of ``v``.

    ``u`` may be any full-rank ``n x m`` matrix; for a non-orthonormal ``y``
    this evaluates the homogeneous extension of the transform. Draws where
    ``u' v v' u`` is numerically singular are rejected and counted.
    """
    f = _as_integrand(f)
    y = _as_matrix(u)
    n, m = y.shape
    _check_rank(y)
    f.check_dims(n, m)
    lam = as_exponent(lam, m)
    report = classify(lam, n, m)
    if not report.in_existence_domain:
        raise DomainError("transform diverges: need Re lam_j > j - m - 1 for all j")
    sigma = stiefel_mass(n, m)
    lam_zero = all(e == 0 for e in lam.entries)

    def sample(gen: np.random.Generator, size: int):
        v = sample_haar_batch(n, m, size, gen)
        b = np.swapaxes(v, 1, 2) @ y
        gram = np.swapaxes(b, 1, 2) @ b
        if m == 1:
            low = gram[:, 0, 0]
        else:
            low = np.linalg.eigvalsh(gram)[:, 0]
        keep = low >= GRAM_EIG_FLOOR
        if lam_zero:
            kern = np.ones(size, dtype=complex)
        else:
            kern, ok = batch_composite_power(gram, lam)
            keep &= ok
        vals = f.evaluate(v) * kern
        return vals[keep], int(size - keep.sum())

    return run_sharded(sample, n_samples, seed, scale=sigma, workers=workers)


def _check_existence(lam, m: int) -> None:
    for j, e in enumerate(lam.entries, start=1):
        if not e.real > j - m - 1:
            raise DomainError(f"need Re lam_j > j - m - 1; fails at j={j}")


def avg_closed_form(n: int, m: int, lam: ExponentLike) -> complex:
    """``int_V (u'v v'u)**lam dv``, finite exactly when Re lam_j > j - m - 1."""
    if not (n > m >= 1):
        raise DimensionError(f"need n > m >= 1, got n={n}, m={m}")
    lam = as_exponent(lam, m)
    _check_existence(lam, m)
    log_val = (
        m * np.log(2.0)
        + n * m / 2.0 * np.log(np.pi)
        - log_siegel_gamma(m, m / 2.0)
        + log_gamma_omega(lam.shift(m))
        - log_gamma_omega(lam.shift(n))
    )
    return complex(np.exp(log_val))


def avg_projection_volume(n: int, m: int) -> float:
    """Mean of ``|det(v'u)|`` under the normalised Haar measure."""
    if not (n > m >= 1):
        raise DimensionError(f"need n > m >= 1, got n={n}, m={m}")
    log_val = (
        log_siegel_gamma(m, n / 2.0)
        + log_siegel_gamma(m, (m + 1) / 2.0)
        - log_siegel_gamma(m, m / 2.0)
        - log_siegel_gamma(m, (n + 1) / 2.0)
    )
    return float(np.exp(log_val.real))


def multiplier(n: int, m: int, k: int, lam: ExponentLike) -> complex:
    """``mu_k(lam)``.

    The quotient ``Gamma_Omega(k0 - lam_*) / Gamma_Omega(-lam_*)`` is taken
    factor by factor as ``Gamma(z + k/2) / Gamma(z)``, which stays finite
    when both gammas have poles (a rising factorial for even ``k``) and is
    zero when only the denominator does.
    """
    if not (n > m >= 1):
        raise DimensionError(f"need n > m >= 1, got n={n}, m={m}")
    if k < 0:
        raise DomainError("degree must be non-negative")
    lam = as_exponent(lam, m)
    # Gamma_Omega(lam + m0) must be finite
    log_num = log_gamma_omega(lam.shift(m), factor="Gamma_Omega(lam+m0)")
    neg_star = (-lam.reverse()).as_array()
    ratio = 1 + 0j
    for j, lj in enumerate(neg_star, start=1):
        z = (lj - j + 1) / 2.0
        try:
            ratio *= gamma_shift_ratio(z, k / 2.0)
        except PoleError as exc:
            raise PoleError(
                f"Gamma_Omega(k0-lam_*) has a pole at index j={j}", index=j, factor="Gamma_Omega(k0-lam_*)"
            ) from exc
    if ratio == 0:
        return 0j
    if reciprocal_gamma_omega(lam.shift(k + n)) == 0:
        return 0j
    return complex(ratio * np.exp(log_num - log_gamma_omega(lam.shift(k + n))))


def eigen_constant(n: int, m: int, k: int) -> complex:
    """``pi**(m(n-m)/2) * i**(km) * sigma_{m,m}``."""
    return i_power(k * m) * np.pi ** (m * (n - m) / 2.0) * stiefel_mass(m, m)


@dataclass(frozen=True)
class EigenResidual:
    mc: McEstimate
    predicted: complex
    z_score: float


def eigen_residual(
    p: HPolynomial,
    lam: ExponentLike,
    u,
    n_samples: int = 100_000,
    seed: int = 0,
    *,
    workers: int | None = None,
) -> EigenResidual:
    """Compare the transform of ``p`` at the frame ``u`` with ``c mu_k(lam) p(u)``.

    For odd ``k`` the transform of ``p`` vanishes identically (the kernel is
    invariant under ``v -> v g`` with ``det g = -1`` while ``p`` flips
    sign), so the eigenvalue formula is only informative for even ``k``.
    """
    u = u if isinstance(u, StiefelFrame) else StiefelFrame(u)
    n, m = u.n, u.m
    lam = as_exponent(lam, m)
    pu = p.eval(u.entries)
    if abs(pu) < VANISH_TOL:
        raise DomainError("polynomial vanishes at u; choose another frame")
    predicted = eigen_constant(n, m, p.k) * multiplier(n, m, p.k, lam) * pu
    est = cosine_mc(IntegrandSpec.h_polynomial(p), lam, u, n_samples, seed, workers=workers)
    return EigenResidual(est, predicted, est.z_against(predicted))


def funk_hecke_eigenvalue(n: int, k: int, lam: float) -> float:
    """Eigenvalue of ``f -> int_{S^{n-1}} f(v) |v.u|**lam dv`` on degree-k harmonics.

    One-dimensional quadrature of the Funk-Hecke integral
    ``|S^{n-2}| int_{-1}^{1} |t|**lam C_k(t)/C_k(1) (1-t^2)**((n-3)/2) dt``
    with Gegenbauer ``C_k`` of index ``(n-2)/2`` (Chebyshev for ``n = 2``).
    Independent of the gamma-function formulas; real ``lam > -1`` only.
    """
    if n < 2 or k < 0:
        raise DimensionError("need n >= 2 and k >= 0")
    lam = float(lam)
    if lam <= -1:
        raise DomainError("integral diverges for lam <= -1")
    if k % 2:
        return 0.0
    if n == 2:
        def zonal(t):
            return special.eval_chebyt(k, t)
    else:
        alpha = (n - 2) / 2.0
        c1 = special.eval_gegenbauer(k, alpha, 1.0)

        def zonal(t):
            return special.eval_gegenbauer(k, alpha, t) / c1

    beta = (n - 3) / 2.0
    # t**lam (1-t)**beta carried by the algebraic weight on [0, 1]
    with warnings.catch_warnings():
        # exact zeros (lam an even integer below k) only reach absolute accuracy
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        half, _ = integrate.quad(
            lambda t: (1.0 + t) ** beta * zonal(t), 0.0, 1.0, weight="alg", wvar=(lam, beta),
            epsabs=1e-15, epsrel=1e-12, limit=200,
        )
    sphere = 2.0 * np.pi ** ((n - 1) / 2.0) / special.gamma((n - 1) / 2.0)
    return float(2.0 * sphere * half)

