"""Zeta integrals against Gaussian test functions and the functional equations.

    Z(phi, lam, f)  = int r**lam   f(v) conj(phi(x)) dx,   x = v r**(1/2)
    Z_*(phi, lam, f) = int r_***lam f(v) conj(phi(x)) dx

Test functions are Gaussians ``exp(-beta tr(x'x))``, for which both sides of
the functional equations reduce to products of cone gamma functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone_core import ExponentLike, as_exponent, batch_composite_power
from .cone_gamma import gamma_omega, is_gamma_pole, log_gamma_omega, reciprocal_gamma_omega
from .cosine import _as_integrand, avg_closed_form, eigen_constant, i_power, multiplier
from .errors import DimensionError, DomainError, PoleError
from .hpoly import HPolynomial
from .mc import McEstimate, run_sharded
from .stiefel import _as_matrix, stiefel_mass

__all__ = [
    "GaussianTestFunction",
    "zeta_mc",
    "zeta_star_mc",
    "zeta_gaussian_closed_form",
    "normalized_zeta",
    "hecke_check",
    "HeckeResult",
    "functional_equation_check",
    "FunctionalEquationResult",
    "fourier_constant",
    "hecke_constant",
]


@dataclass(frozen=True)
class GaussianTestFunction:
    """``phi(x) = exp(-beta tr(x'x))``."""

    beta: float = 1.0

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise DomainError("Gaussian scale must be positive")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.exp(-self.beta * np.sum(x * x, axis=(-2, -1)))


def _check_mc_safe(lam, n: int) -> None:
    for j, e in enumerate(lam.entries, start=1):
        if not e.real > (j - n - 1) / 2.0:
            raise DomainError(
                f"zeta estimator has infinite variance: need Re lam_j > (j-n-1)/2, fails at j={j}"
            )


def _batch_polar_frames(x: np.ndarray) -> np.ndarray:
    r = np.swapaxes(x, -1, -2) @ x
    w, e = np.linalg.eigh(r)
    inv_sqrt = (e / np.sqrt(w)[..., None, :]) @ np.swapaxes(e, -1, -2)
    return x @ inv_sqrt


def _zeta_mc(f, lam, phi, n_samples, seed, star, workers, n=None, m=None) -> McEstimate:
    f = _as_integrand(f)
    if f.poly is not None:
        n, m = f.poly.n, f.poly.m
    if n is None or m is None:
        raise DimensionError("n and m are required when f is the constant function")
    lam = as_exponent(lam, m)
    _check_mc_safe(lam, n)
    phi = phi if isinstance(phi, GaussianTestFunction) else GaussianTestFunction(float(phi))
    sd = np.sqrt(0.5 / phi.beta)
    # sampling density is exactly phi / (pi/beta)**(nm/2)
    scale = (np.pi / phi.beta) ** (n * m / 2.0)

    def sample(gen: np.random.Generator, size: int):
        x = gen.normal(0.0, sd, size=(size, n, m))
        r = np.swapaxes(x, 1, 2) @ x
        kern, ok = batch_composite_power(r[:, ::-1, ::-1] if star else r, lam)
        if f.poly is not None:
            kern = kern * f.evaluate(_batch_polar_frames(x))
        return kern[ok], int(size - ok.sum())

    return run_sharded(sample, n_samples, seed, scale=scale, workers=workers)


def zeta_mc(
    f,
    lam: ExponentLike,
    phi: GaussianTestFunction | float = 1.0,
    n_samples: int = 100_000,
    seed: int = 0,
    *,
    n: int | None = None,
    m: int | None = None,
    workers: int | None = None,
) -> McEstimate:
    """Estimate ``Z(phi, lam, f)`` by sampling ``x`` from the normalised ``phi``.

    ``n`` and ``m`` are needed only when ``f`` is the constant function.
    Requires ``Re lam_j > (j-n-1)/2`` so that the estimator has finite variance.
    """
    return _zeta_mc(f, lam, phi, n_samples, seed, False, workers, n, m)


def zeta_star_mc(
    f,
    lam: ExponentLike,
    phi: GaussianTestFunction | float = 1.0,
    n_samples: int = 100_000,
    seed: int = 0,
    *,
    n: int | None = None,
    m: int | None = None,
    workers: int | None = None,
) -> McEstimate:
    """As :func:`zeta_mc` with kernel ``r_***lam``. Same seed, same draws."""
    return _zeta_mc(f, lam, phi, n_samples, seed, True, workers, n, m)


def zeta_gaussian_closed_form(
    n: int,
    m: int,
    lam: ExponentLike,
    beta: float = 1.0,
    *,
    allow_continuation: bool = False,
) -> complex:
    """``Z(phi, lam, 1)`` for ``phi = exp(-beta tr(x'x))``.

    Equals ``2**-m sigma_{n,m} Gamma_Omega(lam + n0) beta**(-(nm + |lam|)/2)``.
    The starred integral has the same value (substitute ``x -> x omega``).
    Raises :class:`PoleError` on the polar set; outside the convergence
    region ``Re lam_j > j-n-1`` raises :class:`DomainError` unless
    ``allow_continuation`` asks for the meromorphic continuation.
    """
    if not (n >= m >= 1):
        raise DimensionError(f"need n >= m >= 1, got n={n}, m={m}")
    if not beta > 0:
        raise DomainError("Gaussian scale must be positive")
    lam = as_exponent(lam, m)
    log_g = log_gamma_omega(lam.shift(n), factor="Gamma_Omega(lam+n0)")
    if not allow_continuation:
        for j, e in enumerate(lam.entries, start=1):
            if not e.real > j - n - 1:
                raise DomainError(f"zeta integral diverges: Re lam_j <= j-n-1 at j={j}")
    log_val = (
        -m * np.log(2.0)
        + np.log(stiefel_mass(n, m))
        + log_g
        - (n * m + lam.trace()) / 2.0 * np.log(beta)
    )
    return complex(np.exp(log_val))


def normalized_zeta(
    f,
    lam: ExponentLike,
    phi: GaussianTestFunction | float = 1.0,
    n_samples: int = 100_000,
    seed: int = 0,
    *,
    n: int | None = None,
    m: int | None = None,
    workers: int | None = None,
) -> McEstimate:
    """``Z(phi, lam, f) / Gamma_Omega(lam + n0)`` estimated by Monte Carlo."""
    f = _as_integrand(f)
    mm = f.poly.m if f.poly is not None else m
    lam = as_exponent(lam, mm)
    nn = f.poly.n if f.poly is not None else n
    g = gamma_omega(lam.shift(nn))
    est = zeta_mc(f, lam, phi, n_samples, seed, n=n, m=m, workers=workers)
    return est.scaled(1.0 / g)


@dataclass(frozen=True)
class HeckeResult:
    lhs: McEstimate
    rhs: complex
    z_score: float


def hecke_check(p: HPolynomial, y, n_samples: int = 100_000, seed: int = 0, *, workers: int | None = None) -> HeckeResult:
    """Check ``int P(x) e^{-pi tr x'x} e^{2 pi i tr y'x} dx = i**(km) P(y) e^{-pi tr y'y}``.

    ``x`` is drawn from the normalised density ``exp(-pi tr(x'x))``.
    """
    y = _as_matrix(y)
    if y.shape != (p.n, p.m):
        raise DimensionError(f"y must be {p.n}x{p.m}")
    if 2 * p.m > p.n:
        raise DimensionError("need 2m <= n")
    sd = np.sqrt(0.5 / np.pi)

    def sample(gen: np.random.Generator, size: int):
        x = gen.normal(0.0, sd, size=(size, p.n, p.m))
        phase = np.exp(2j * np.pi * np.einsum("ij,nij->n", y, x))
        return p.eval(x) * phase, 0

    est = run_sharded(sample, n_samples, seed, workers=workers)
    rhs = i_power(p.k * p.m) * p.eval(y) * np.exp(-np.pi * np.sum(y * y))
    return HeckeResult(est, complex(rhs), est.z_against(rhs))


def fourier_constant(lam: ExponentLike, m: int) -> complex:
    """``2**-|lam| pi**(m^2/2) / sigma_{m,m}``, the constant relating the
    Fourier transform of the homogeneous zeta kernel to the cosine transform."""
    lam = as_exponent(lam, m)
    return complex(2.0 ** (-lam.trace()) * np.pi ** (m * m / 2.0) / stiefel_mass(m, m))


def hecke_constant(lam: ExponentLike, n: int, m: int, k: int) -> complex:
    """``2**-|lam| pi**(nm/2) i**(km)``."""
    lam = as_exponent(lam, m)
    return complex(2.0 ** (-lam.trace()) * np.pi ** (n * m / 2.0) * i_power(k * m))


@dataclass(frozen=True)
class FunctionalEquationResult:
    lhs: complex
    rhs: complex
    rel_err: float
    details: dict = field(default_factory=dict)


def _rel_err(a: complex, b: complex) -> float:
    denom = max(abs(a), abs(b))
    return 0.0 if denom == 0 else float(abs(a - b) / denom)


def _radial_gaussian(n: int, m: int, lam, beta: float) -> complex:
    """``int (x'x)**lam g(v) e^{-beta tr x'x} dx`` divided by ``int_V g(v) dv``."""
    return zeta_gaussian_closed_form(n, m, lam, beta) / stiefel_mass(n, m)


def functional_equation_check(n: int, m: int, lam: ExponentLike, f=None) -> FunctionalEquationResult:
    """Evaluate both sides of the zeta/cosine functional equation in closed form.

    For ``f = 1`` the test function is ``exp(-tr(x'x))`` and ``lam`` must lie
    in the strip ``j-m-1 < Re lam_j < j-m``. The left side pairs the
    homogeneous extension ``(y'y)**lam * avg_closed_form`` with the Gaussian
    Fourier transform; the right side is ``(2 pi)**(nm)`` times the
    normalised starred zeta integral at ``-lam_* - n0``.

    For ``f = P_k`` the test function is ``P_k(x) exp(-pi tr(x'x))`` (for a
    radial Gaussian both sides vanish identically). The left side uses the
    eigenvalue ``c mu_k(lam)``, the right side the normalised starred zeta
    integral; the Hecke-identity form is reported in ``details``. All three
    carry the common factor ``int_V |P_k|^2 dv``, which is divided out.
    """
    f = _as_integrand(f)
    f.check_dims(n, m)
    lam = as_exponent(lam, m)
    lam_star = lam.reverse()
    mu_arg = -lam_star.shift(n)  # -lam_* - n0
    c_lam = fourier_constant(lam, m)
    g_m0 = gamma_omega(lam.shift(m))
    recip_neg_star = reciprocal_gamma_omega(-lam_star)

    if f.poly is None:
        for j, e in enumerate(lam.entries, start=1):
            if not (j - m - 1 < e.real < j - m):
                raise DomainError(f"need j-m-1 < Re lam_j < j-m; fails at j={j}")
        # F[exp(-tr x'x)](y) = pi**(nm/2) exp(-tr(y'y)/4)
        pairing = avg_closed_form(n, m, lam) * np.pi ** (n * m / 2.0) * zeta_gaussian_closed_form(n, m, lam, 0.25)
        lhs = c_lam / g_m0 * pairing
        z_star = zeta_gaussian_closed_form(n, m, mu_arg, 1.0)
        rhs = (2 * np.pi) ** (n * m) * z_star * recip_neg_star
        return FunctionalEquationResult(
            complex(lhs), complex(rhs), _rel_err(lhs, rhs),
            {"pairing": complex(pairing), "zeta_star": complex(z_star), "c_lambda": c_lam},
        )

    k = f.poly.k
    for j, e in enumerate(lam.entries, start=1):
        if not (j - n - k - 1 < e.real < j + k - m):
            raise DomainError(f"need j-n-k-1 < Re lam_j < j+k-m; fails at j={j}")
        if not e.real > j - m - 1:
            raise DomainError(f"eigenvalue relation needs Re lam_j > j-m-1; fails at j={j}")
    km = k * m
    # F[P e^{-pi|x|^2}](y) = i**km (2 pi)**-km P(y) e^{-|y|^2/(4 pi)}
    ft_const = i_power(km) * (2 * np.pi) ** (-km)
    pairing = np.conj(ft_const) * _radial_gaussian(n, m, lam.shift(k), 1.0 / (4 * np.pi))
    eig = eigen_constant(n, m, k) * multiplier(n, m, k, lam)
    lhs = c_lam / g_m0 * eig * pairing
    z_star = _radial_gaussian(n, m, mu_arg.shift(k), np.pi)
    rhs = (2 * np.pi) ** (n * m) * z_star * recip_neg_star
    hecke_side = _hecke_form_factor(n, m, k, lam) * pairing
    return FunctionalEquationResult(
        complex(lhs), complex(rhs), _rel_err(lhs, rhs),
        {
            "pairing_per_norm": complex(pairing),
            "zeta_star_per_norm": complex(z_star),
            "hecke_form": complex(hecke_side),
            "rel_err_hecke_form": _rel_err(hecke_side, rhs),
            "eigenvalue": complex(eig),
            "d_lambda": hecke_constant(lam, n, m, k),
        },
    )


def _hecke_form_factor(n: int, m: int, k: int, lam) -> complex:
    """``d_lam Gamma_Omega(k0 - lam_*) / (Gamma_Omega(-lam_*) Gamma_Omega(lam + k0 + n0))``."""
    lam_star = lam.reverse()
    num_arg = (-lam_star).shift(k)
    if any(is_gamma_pole(z) for z in ((num_arg.as_array() - np.arange(m)) / 2.0)):
        raise PoleError("Gamma_Omega(k0-lam_*) has a pole", factor="Gamma_Omega(k0-lam_*)")
    return complex(
        hecke_constant(lam, n, m, k)
        * gamma_omega(num_arg)
        * reciprocal_gamma_omega(-lam_star)
        * reciprocal_gamma_omega(lam.shift(k + n))
    )
