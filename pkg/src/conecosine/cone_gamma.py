"""Gamma functions of the positive-definite cone and domain classification.

The cone gamma function factorises into ordinary gamma functions,

    Gamma_Omega(lam) = pi**(m(m-1)/4) * prod_j Gamma((lam_j - j + 1) / 2),

and the Siegel gamma is its constant-exponent specialisation
``Gamma_m(a) = Gamma_Omega((2a, ..., 2a))``. Products are accumulated in
log space (``scipy.special.loggamma`` with complex arguments).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import loggamma

from .cone_core import ExponentLike, PosDefMatrix, as_exponent, batch_composite_power
from .errors import DimensionError, DomainError, PoleError
from .mc import McEstimate, run_sharded

__all__ = [
    "POLE_TOL",
    "DomainReport",
    "is_gamma_pole",
    "log_gamma_omega",
    "gamma_omega",
    "reciprocal_gamma_omega",
    "siegel_gamma",
    "log_siegel_gamma",
    "gamma_shift_ratio",
    "classify",
    "laplace_transform_mc",
]

POLE_TOL = 1e-9


def is_gamma_pole(z: complex, tol: float = POLE_TOL) -> bool:
    """True when ``z`` is within ``tol`` of a non-positive integer."""
    z = complex(z)
    k = round(z.real)
    return k <= 0 and abs(z - k) < tol


def _omega_args(lam: ExponentLike) -> np.ndarray:
    lam = as_exponent(lam).as_array()
    j = np.arange(1, lam.size + 1)
    return (lam - j + 1) / 2.0


def log_gamma_omega(lam: ExponentLike, factor: str = "Gamma_Omega") -> complex:
    """A logarithm of ``Gamma_Omega(lam)`` (branch not normalised)."""
    args = _omega_args(lam)
    for j, z in enumerate(args, start=1):
        if is_gamma_pole(z):
            raise PoleError(f"{factor} has a pole: argument {z} at index j={j}", index=j, factor=factor)
    m = args.size
    return complex(m * (m - 1) / 4.0 * np.log(np.pi) + np.sum(loggamma(args.astype(complex))))


def gamma_omega(lam: ExponentLike) -> complex:
    """``Gamma_Omega(lam)``; raises :class:`PoleError` naming the index on a pole."""
    return complex(np.exp(log_gamma_omega(lam)))


def reciprocal_gamma_omega(lam: ExponentLike) -> complex:
    """``1 / Gamma_Omega(lam)``, exactly zero on the pole set."""
    args = _omega_args(lam)
    if any(is_gamma_pole(z) for z in args):
        return 0j
    return complex(np.exp(-log_gamma_omega(lam)))


def log_siegel_gamma(m: int, a: complex) -> complex:
    a = complex(a)
    terms = a - np.arange(m) / 2.0
    for j, z in enumerate(terms):
        if is_gamma_pole(z):
            raise PoleError(f"Siegel gamma has a pole at a={a} (factor j={j})", index=j + 1, factor="Gamma_m")
    return complex(m * (m - 1) / 4.0 * np.log(np.pi) + np.sum(loggamma(terms)))


def siegel_gamma(m: int, a: complex) -> complex:
    """``pi**(m(m-1)/4) * prod_{j=0}^{m-1} Gamma(a - j/2)``."""
    if m < 1:
        raise DimensionError("m must be a positive integer")
    return complex(np.exp(log_siegel_gamma(m, a)))


def gamma_shift_ratio(z: complex, h: float) -> complex:
    """``Gamma(z + h) / Gamma(z)`` continued through coincident poles.

    ``h`` must be a non-negative multiple of 1/2. For integer ``h`` this is
    the rising factorial ``z (z+1) ... (z+h-1)``, an entire function of ``z``.
    For half-integer ``h`` a pole of ``Gamma(z)`` makes the ratio zero.
    """
    z = complex(z)
    if h < 0 or abs(2 * h - round(2 * h)) > 1e-12:
        raise ValueError("h must be a non-negative multiple of 1/2")
    if abs(h - round(h)) < 1e-12:
        out = 1 + 0j
        for q in range(int(round(h))):
            out *= z + q
        return out
    if is_gamma_pole(z):
        return 0j
    if is_gamma_pole(z + h):
        raise PoleError(f"Gamma(z + h) has a pole at z + h = {z + h}", factor="Gamma(z+h)")
    return complex(np.exp(loggamma(z + h) - loggamma(z)))


@dataclass(frozen=True)
class DomainReport:
    """Membership of an exponent in the regions that govern the transforms.

    in_abs_domain_zeta  Re lam_j > j - n - 1 for all j (zeta integrals converge)
    on_polar_set        lam_j = j - n - l for some j and odd l >= 1
    in_existence_domain Re lam_j > j - m - 1 for all j (cosine transform exists)
    injective           lam_j + m - j is never in {0, 2, 4, ...}
    frontier            injectivity condition fails where non-injectivity is
                        not established (2m > n with non-constant lam)
    """

    in_abs_domain_zeta: bool
    on_polar_set: bool
    in_existence_domain: bool
    injective: bool
    frontier: bool = False
    witnesses: tuple[tuple[int, str], ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "in_abs_domain_zeta": self.in_abs_domain_zeta,
            "on_polar_set": self.on_polar_set,
            "in_existence_domain": self.in_existence_domain,
            "injective": self.injective,
            "frontier": self.frontier,
            "witnesses": [list(w) for w in self.witnesses],
        }


def _near_int(x: complex, tol: float) -> int | None:
    x = complex(x)
    k = round(x.real)
    return k if abs(x - k) < tol else None


def classify(lam: ExponentLike, n: int, m: int, tol: float = POLE_TOL) -> DomainReport:
    if not (n > m >= 1):
        raise DimensionError(f"need n > m >= 1, got n={n}, m={m}")
    lam = as_exponent(lam, m)
    witnesses: list[tuple[int, str]] = []
    abs_ok = exist_ok = True
    polar = False
    inj = True
    for j, lj in enumerate(lam.entries, start=1):
        if not lj.real > j - n - 1:
            abs_ok = False
            witnesses.append((j, "abs_domain: Re lam_j <= j-n-1"))
        gap = _near_int(j - n - lj, tol)
        if gap is not None and gap >= 1 and gap % 2 == 1:
            polar = True
            witnesses.append((j, f"polar_set: lam_j = j-n-{gap}"))
        if not lj.real > j - m - 1:
            exist_ok = False
            witnesses.append((j, "existence_domain: Re lam_j <= j-m-1"))
        shifted = _near_int(lj + m - j, tol)
        if shifted is not None and shifted >= 0 and shifted % 2 == 0:
            inj = False
            witnesses.append((j, f"injectivity: lam_j+m-j = {shifted}"))
    frontier = (not inj) and 2 * m > n and not lam.is_constant(tol)
    return DomainReport(abs_ok, polar, exist_ok, inj, frontier, tuple(witnesses))


def laplace_transform_mc(
    lam: ExponentLike,
    s,
    n_samples: int,
    seed: int,
    *,
    workers: int | None = None,
) -> McEstimate:
    """Estimate ``int_Omega r**lam exp(-tr(r s)) d_*r`` by importance sampling.

    Draws ``r = t' t`` with ``t`` upper triangular: ``t_jj**2`` gamma
    distributed with shape ``(Re lam_j - j + 1)/2`` and Gaussian
    off-diagonal entries, both at rate ``c = lambda_min(s)``. Under this
    proposal the weight is ``Gamma_Omega(Re lam) c**(-|Re lam|/2)`` times a
    phase and ``exp(-tr(r (s - c I)))``, which is bounded by its prefactor.
    """
    s = s if isinstance(s, PosDefMatrix) else PosDefMatrix.from_array(s)
    m = s.m
    lam = as_exponent(lam, m)
    re = np.array([e.real for e in lam.entries])
    j = np.arange(1, m + 1)
    shape = (re - j + 1) / 2.0
    if np.any(shape <= 0):
        raise DomainError("Laplace integral diverges: need Re lam_j > j - 1 for all j")
    c = float(np.linalg.eigvalsh(s.entries)[0])
    s_shift = s.entries - c * np.eye(m)
    im_part = as_exponent(1j * lam.as_array().imag)
    prefactor = np.exp(log_gamma_omega(re)) * c ** (-np.sum(re) / 2.0)
    iu = np.triu_indices(m, 1)

    def sample(gen: np.random.Generator, size: int):
        t = np.zeros((size, m, m))
        diag = np.sqrt(gen.gamma(shape, 1.0 / c, size=(size, m)))
        t[:, j - 1, j - 1] = diag
        t[:, iu[0], iu[1]] = gen.normal(0.0, np.sqrt(0.5 / c), size=(size, iu[0].size))
        r = np.swapaxes(t, 1, 2) @ t
        phase, ok = batch_composite_power(r, im_part)
        damp = np.exp(-np.einsum("nij,ji->n", r, s_shift))
        vals = (phase * damp)[ok]
        return vals, int(size - ok.sum())

    return run_sharded(sample, n_samples, seed, scale=prefactor, workers=workers)
