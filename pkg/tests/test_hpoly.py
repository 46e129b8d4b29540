import numpy as np
import pytest

from conecosine.errors import DimensionError, DomainError
from conecosine.hpoly import HPolynomial, isotropy_residual, make_isotropic, numeric_laplacian
from conecosine.stiefel import random_rotation, sample_haar_batch


def test_classical_generator():
    a = make_isotropic(2, 1, [0, 1])
    np.testing.assert_allclose(a[:, 0], np.array([1, 1j]) / np.sqrt(2))
    p = HPolynomial(a, 2)
    assert abs(p.eval([1.0, 0.0]) - 0.5) < 1e-15
    x = np.array([0.3, -0.7])
    assert abs(p(x) - ((x[0] + 1j * x[1]) / np.sqrt(2)) ** 2) < 1e-15


def test_exact_isotropy():
    assert isotropy_residual(make_isotropic(4, 2, [0, 1, 2, 3])) == 0.0
    for n, m in ((5, 2), (6, 3), (3, 1)):
        assert isotropy_residual(make_isotropic(n, m)) <= 1e-15


def test_construction_errors():
    with pytest.raises(DimensionError):
        make_isotropic(3, 2)
    with pytest.raises(DimensionError):
        make_isotropic(4, 2, [0, 1, 1, 2])
    with pytest.raises(DimensionError):
        HPolynomial(np.ones((3, 2), dtype=complex), 1)
    with pytest.raises(DomainError):
        HPolynomial(np.array([1.0, 0.5, 0.0]), 2)
    with pytest.raises(DomainError):
        HPolynomial.standard(3, 1, 3)
    with pytest.raises(DomainError):
        HPolynomial.standard(4, 2, -1)


def test_degree_zero_is_one(gen):
    p = HPolynomial.standard(4, 2, 0)
    assert p.eval(gen.normal(size=(4, 2))) == 1
    assert numeric_laplacian(p, gen.normal(size=(4, 2))) == 0


def test_determinantal_homogeneity(gen):
    for n, m, k in ((4, 2, 1), (5, 2, 3), (6, 3, 2), (3, 1, 4)):
        p = HPolynomial.standard(n, m, k).rotated(random_rotation(n, gen))
        for _ in range(50):
            x, g = gen.normal(size=(n, m)), gen.normal(size=(m, m))
            lhs, rhs = p.eval(x @ g), np.linalg.det(g) ** k * p.eval(x)
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs))


def test_right_orthogonal_character(gen):
    p = HPolynomial.standard(5, 2, 3)
    v = sample_haar_batch(5, 2, 1, gen)[0]
    flip = np.diag([1.0, -1.0])
    assert abs(p.eval(v @ flip) + p.eval(v)) < 1e-12
    q = HPolynomial.standard(5, 2, 2)
    assert abs(q.eval(v @ flip) - q.eval(v)) < 1e-12


def test_polar_homogeneity(gen):
    p = HPolynomial.standard(4, 2, 2)
    v = sample_haar_batch(4, 2, 1, gen)[0]
    a = gen.normal(size=(2, 2))
    r = a.T @ a + np.eye(2)
    w, e = np.linalg.eigh(r)
    lhs = p.eval(v @ (e * np.sqrt(w)) @ e.T)
    assert abs(lhs - p.eval(v) * np.linalg.det(r) ** (2 / 2)) < 1e-12 * abs(lhs)


def test_batch_evaluation(gen):
    p = HPolynomial.standard(4, 2, 2)
    xs = gen.normal(size=(7, 4, 2))
    batch = p.eval(xs)
    assert batch.shape == (7,)
    for x, b in zip(xs, batch):
        assert abs(p.eval(x) - b) < 1e-14
    with pytest.raises(DimensionError):
        p.eval(np.ones((3, 2)))


def test_harmonicity_certificate(gen):
    worst = 0.0
    for n in range(2, 7):
        for m in (1, 2):
            if 2 * m > n:
                continue
            for k in (1, 2, 3):
                if m == 1 and k % 2:
                    continue
                p = HPolynomial.standard(n, m, k).rotated(random_rotation(n, gen))
                for _ in range(100):
                    x = gen.normal(size=(n, m))
                    scale = max(1.0, float(np.linalg.norm(x)) ** (k * m))
                    worst = max(worst, abs(numeric_laplacian(p, x, h=1e-3)) / scale)
    assert worst < 1e-6


def test_harmonicity_negative_control():
    # a linear polynomial is harmonic whatever a is, so the control uses degree 2
    broken = HPolynomial(np.array([1.0, 0.5, 0.0]), 2, strict=False)
    # Laplacian of (x1 + x2/2)^2 is 2 (1 + 1/4)
    assert abs(numeric_laplacian(broken, [0.3, 0.2, 0.1]) - 2.5) < 1e-6
    with pytest.raises(ValueError):
        numeric_laplacian(broken, [0.3, 0.2, 0.1], h=0.0)
