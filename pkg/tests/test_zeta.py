import numpy as np
import pytest
from scipy import integrate

from conecosine.cone_gamma import gamma_omega, siegel_gamma
from conecosine.cosine import avg_closed_form
from conecosine.errors import DimensionError, DomainError, PoleError
from conecosine.hpoly import HPolynomial
from conecosine.mc import run_sharded
from conecosine.stiefel import stiefel_mass
from conecosine.zeta import (
    GaussianTestFunction,
    fourier_constant,
    functional_equation_check,
    hecke_check,
    hecke_constant,
    normalized_zeta,
    zeta_gaussian_closed_form,
    zeta_mc,
    zeta_star_mc,
)

N = 200_000


def test_plane_gaussian():
    assert abs(zeta_gaussian_closed_form(2, 1, [0.0]) - np.pi) < 1e-12
    est = zeta_mc(None, [0.0], 1.0, 1000, seed=0, n=2, m=1)
    assert abs(est.value - np.pi) < 1e-12


def test_closed_form_m2():
    val = zeta_gaussian_closed_form(4, 2, [1.0, 1.0])
    ref = 2 * np.pi**3 * siegel_gamma(2, 2.5)
    assert abs(val - ref) < 1e-12 * abs(ref)


def test_closed_form_poles_and_domain():
    # polar set for n = 2, m = 1 is lam = -2, -4, ...
    for lam in (-2.0, -4.0):
        with pytest.raises(PoleError):
            zeta_gaussian_closed_form(2, 1, [lam], allow_continuation=True)
    with pytest.raises(DomainError) as exc:
        zeta_gaussian_closed_form(2, 1, [-3.0])
    assert not isinstance(exc.value, PoleError)
    cont = zeta_gaussian_closed_form(2, 1, [-3.0], allow_continuation=True)
    assert abs(cont - 0.5 * 2 * np.pi * gamma_omega([-1.0])) < 1e-12 * abs(cont)
    with pytest.raises(PoleError):
        zeta_gaussian_closed_form(4, 2, [0.0, -3.0])
    with pytest.raises(DomainError):
        GaussianTestFunction(0.0)


def test_radial_quadrature_oracle():
    # n = 2, m = 1: 2 pi int rho^(lam+1) exp(-beta rho^2) d rho
    for lam, beta in ((-1.5, 1.0), (0.7, 0.3), (3.0, 2.0)):
        quad, _ = integrate.quad(lambda r: r ** (lam + 1) * np.exp(-beta * r * r), 0, np.inf)
        ref = 2 * np.pi * quad
        assert abs(zeta_gaussian_closed_form(2, 1, [lam], beta) - ref) < 1e-9 * ref


@pytest.mark.parametrize("n,m,lam", [(2, 1, [-0.4]), (2, 1, [0.7 + 0.5j]), (4, 2, [-1.2, -0.8]), (4, 2, [1.0, 0.0])])
def test_zeta_mc_matches_closed_form(n, m, lam):
    est = zeta_mc(None, lam, 1.0, N, seed=31, n=n, m=m)
    assert est.z_against(zeta_gaussian_closed_form(n, m, lam)) < 3


def test_zeta_mc_beta_scaling():
    est = zeta_mc(None, [0.5, 1.0], 2.5, N, seed=32, n=5, m=2)
    assert est.z_against(zeta_gaussian_closed_form(5, 2, [0.5, 1.0], 2.5)) < 3


def test_zeta_mc_safe_domain():
    with pytest.raises(DomainError):
        zeta_mc(None, [-1.0], 1.0, 1000, n=2, m=1)
    with pytest.raises(DimensionError):
        zeta_mc(None, [1.0], 1.0, 1000)


def test_star_equal_for_constant_exponent():
    a = zeta_mc(None, [0.7, 0.7], 1.0, 50_000, seed=4, n=5, m=2)
    b = zeta_star_mc(None, [0.7, 0.7], 1.0, 50_000, seed=4, n=5, m=2)
    assert abs(a.value - b.value) < 1e-12 * abs(a.value)


def test_star_kernel_differs_pathwise_but_not_in_mean():
    a = zeta_mc(None, [1.0, 0.0], 1.0, N, seed=5, n=5, m=2)
    b = zeta_star_mc(None, [1.0, 0.0], 1.0, N, seed=5, n=5, m=2)
    assert a.value != b.value
    cf = zeta_gaussian_closed_form(5, 2, [1.0, 0.0])
    assert a.z_against(cf) < 3 and b.z_against(cf) < 3


def test_normalized_zeta_is_constant():
    a = normalized_zeta(None, [0.5], 1.0, N, seed=6, n=3, m=1)
    b = normalized_zeta(None, [2.0], 1.0, N, seed=7, n=3, m=1)
    assert a.z_against(2 * np.pi) < 3 and b.z_against(2 * np.pi) < 3
    assert abs(a.value - b.value) < 3 * np.hypot(a.std_error, b.std_error)
    c = normalized_zeta(None, [0.3, -0.5], 1.0, N, seed=8, n=4, m=2)
    assert c.z_against(stiefel_mass(4, 2) / 4) < 3


def test_zeta_with_h_polynomial_runs():
    p = HPolynomial.standard(4, 2, 2)
    est = zeta_mc(p, [0.5, 0.2], 1.0, 20_000, seed=9)
    # P_2 averages to zero against any O(4)-invariant weight
    assert abs(est.value) < 4 * est.std_error


def test_hecke_degree_zero_at_origin():
    res = hecke_check(HPolynomial.standard(2, 1, 0), np.zeros((2, 1)), 1000, seed=0)
    assert abs(res.lhs.value - 1) < 1e-12 and res.rhs == 1


@pytest.mark.parametrize("n,m,k,y", [
    (2, 1, 2, [[1.0], [0.0]]),
    (4, 2, 1, [[0.3, -0.2], [0.1, 0.5], [-0.4, 0.2], [0.2, 0.3]]),
])
def test_hecke_identity(n, m, k, y):
    res = hecke_check(HPolynomial.standard(n, m, k), np.array(y), N, seed=41)
    assert res.z_score < 3


def test_hecke_dimension_errors():
    with pytest.raises(DimensionError):
        hecke_check(HPolynomial.standard(4, 2, 1), np.zeros((4, 1)), 100)


def test_constants_specialise():
    # m = 1 and constant exponents
    for lam in (-0.5, 0.3, 1.7):
        assert abs(fourier_constant([lam], 1) - 2 ** (-1 - lam) * np.sqrt(np.pi)) < 1e-14
        assert abs(hecke_constant([lam], 3, 1, 2) - 2**-lam * np.pi**1.5 * 1j**2) < 1e-13
        for m, n, k in ((2, 4, 1), (3, 6, 2)):
            c = fourier_constant([lam] * m, m)
            assert abs(c - 2 ** (-lam * m) * np.pi ** (m * m / 2) / stiefel_mass(m, m)) < 1e-13 * abs(c)
            d = hecke_constant([lam] * m, n, m, k)
            assert abs(d - 2 ** (-lam * m) * np.pi ** (n * m / 2) * 1j ** (k * m)) < 1e-12 * abs(d)


@pytest.mark.parametrize("n,m,lam", [(2, 1, [-0.5]), (4, 2, [-1.5, -0.5]), (5, 2, [-1.3 + 0.2j, -0.4]),
                                     (6, 3, [-2.2, -1.7 + 1j, -0.1])])
def test_functional_equation_constant_one(n, m, lam):
    res = functional_equation_check(n, m, lam)
    assert res.rel_err < 1e-9


@pytest.mark.parametrize("n,m,k,lam", [(3, 1, 2, [-0.5]), (3, 1, 2, [0.4 - 0.3j]), (4, 2, 2, [-0.5, 0.3]),
                                       (5, 2, 1, [-0.8, 0.1]), (6, 3, 2, [-1.0, 0.2, 0.5])])
def test_functional_equation_h_polynomial(n, m, k, lam):
    res = functional_equation_check(n, m, lam, HPolynomial.standard(n, m, k))
    assert res.rel_err < 1e-9
    assert res.details["rel_err_hecke_form"] < 1e-9


def test_functional_equation_strips():
    with pytest.raises(DomainError):
        functional_equation_check(2, 1, [0.5])
    with pytest.raises(DomainError):
        functional_equation_check(3, 1, [-1.5], HPolynomial.standard(3, 1, 2))


def test_functional_equation_radial_oracle():
    # n = 2, m = 1, lam in (-1, 0): every integral is one-dimensional
    lam = -0.5
    res = functional_equation_check(2, 1, [lam])
    avg = avg_closed_form(2, 1, [lam]).real
    # (T 1, F phi) with F phi(y) = pi exp(-|y|^2 / 4)
    pairing = 2 * np.pi * integrate.quad(lambda r: r ** (lam + 1) * avg * np.pi * np.exp(-r * r / 4), 0, np.inf)[0]
    lhs = fourier_constant([lam], 1) / gamma_omega([lam + 1]) * pairing
    # (2 pi)^2 Z_*(phi, -lam - 2) / Gamma(-lam / 2)
    zeta = 2 * np.pi * integrate.quad(lambda r: r ** (-lam - 1) * np.exp(-r * r), 0, np.inf)[0]
    rhs = (2 * np.pi) ** 2 * zeta / gamma_omega([-lam])
    assert abs(res.lhs - lhs) < 1e-8 * abs(lhs)
    assert abs(res.rhs - rhs) < 1e-8 * abs(rhs)


def test_functional_equation_mc_oracle():
    # n = 3, m = 1, k = 2, test function P(x) exp(-pi |x|^2): check the starred
    # zeta integral int |x|^mu P(x/|x|) conj(P(x)) exp(-pi |x|^2) dx by MC
    n, lam = 3, -0.5
    p = HPolynomial.standard(n, 1, 2)
    mu = -lam - n
    norm = 8 * np.pi / 15  # int over S^2 of |P|^2

    def sample(gen, size):
        x = gen.normal(0.0, np.sqrt(0.5 / np.pi), size=(size, n, 1))
        rho = np.linalg.norm(x, axis=(1, 2))
        v = x / rho[:, None, None]
        return rho**mu * p.eval(v) * np.conj(p.eval(x)), 0

    est = run_sharded(sample, 400_000, seed=51)
    res = functional_equation_check(n, 1, [lam], p)
    assert est.z_against(norm * res.details["zeta_star_per_norm"]) < 3
