"""The acceptance battery: nine criteria, each a list of seeded checks.

Monte Carlo checks pass when ``|estimate - expected| < 3 std_error``;
closed-form checks at the tolerance stated with each criterion.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .cone_core import PosDefMatrix, as_exponent, composite_power, star_involution
from .cone_gamma import classify
from .cosine import (
    IntegrandSpec,
    avg_closed_form,
    avg_projection_volume,
    cosine_mc,
    eigen_constant,
    eigen_residual,
    funk_hecke_eigenvalue,
    multiplier,
)
from .hpoly import HPolynomial, numeric_laplacian
from .stiefel import (
    StiefelFrame,
    orthocomplement,
    polar_decompose,
    projection_volume,
    random_rotation,
    sample_haar_batch,
    triangular_decompose,
)
from .zeta import functional_equation_check, hecke_check, hecke_constant, zeta_gaussian_closed_form, zeta_mc

__all__ = ["Check", "CriterionResult", "CRITERIA", "CLASSIFY_TABLE", "run_criterion", "run_suite"]

Z_LIMIT = 3.0
FULL_N = 1_000_000
QUICK_N = 100_000
DEFAULT_SEED = 2024


@dataclass(frozen=True)
class Check:
    label: str
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    checks: tuple[Check, ...]
    wall_time_s: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        n_ok = sum(c.passed for c in self.checks)
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number} [{status}] {self.title}: {n_ok}/{len(self.checks)} checks, {self.wall_time_s:.1f}s"


def _mc_check(label: str, est, expected: complex, **extra) -> Check:
    z = est.z_against(expected)
    return Check(label, bool(z < Z_LIMIT), {
        "value": est.value, "std_error": est.std_error, "expected": complex(expected), "z_score": z, **extra,
    })


def _rel(a: complex, b: complex) -> float:
    d = max(abs(a), abs(b))
    return 0.0 if d == 0 else float(abs(a - b) / d)


def _mc_safe_exponents(m: int, count: int, gen: np.random.Generator) -> list[np.ndarray]:
    # lower edge max(j-m-1/2, (j-m-1)/2 + 0.15) keeps the estimator's variance finite
    j = np.arange(1, m + 1)
    low = np.maximum(j - m - 0.5, (j - m - 1) / 2.0 + 0.15)
    out = []
    for _ in range(count):
        re = low + gen.uniform(0.0, 2.0, size=m)
        im = gen.uniform(-0.5, 0.5, size=m)
        out.append(re + 1j * im)
    return out


def criterion_1(n_samples: int, seed: int) -> list[Check]:
    """Average of the composite power over the Stiefel manifold, MC vs closed form."""
    gen = np.random.default_rng([seed, 1])
    checks = []
    for n, m in ((3, 1), (4, 2), (5, 2)):
        u = StiefelFrame(sample_haar_batch(n, m, 1, gen)[0])
        for i, lam in enumerate(_mc_safe_exponents(m, 5, gen)):
            est = cosine_mc(None, lam, u, n_samples, seed + 100 * n + 10 * m + i)
            checks.append(_mc_check(f"avg n={n} m={m} lam={np.round(lam, 4).tolist()}", est, avg_closed_form(n, m, lam)))
    return checks


def criterion_2(n_samples: int, seed: int) -> list[Check]:
    """Circle oracle by Gauss-Legendre quadrature."""
    nodes, weights = np.polynomial.legendre.leggauss(40)
    theta = (nodes + 1.0) * np.pi / 4.0
    # |cos| over the circle = 4 * integral of cos over [0, pi/2]
    quarter = float(np.sum(weights * np.cos(theta)) * np.pi / 4.0)
    mean_quad = 4.0 * quarter / (2.0 * np.pi)
    pv = avg_projection_volume(2, 1)
    total = avg_closed_form(2, 1, [1.0])
    return [
        Check("projection volume mean = 2/pi", abs(pv - 2 / np.pi) < 1e-10 and abs(pv - mean_quad) < 1e-10,
              {"value": pv, "quadrature": mean_quad}),
        Check("avg_closed_form(2,1,(1)) = 4", abs(total - 4.0) < 1e-10 and abs(total - 4 * quarter) < 1e-10,
              {"value": total, "quadrature": 4 * quarter}),
    ]


def _mu1(n: int, k: int, lam: float) -> float:
    g = special.gamma
    return g((lam + 1) / 2) * g((k - lam) / 2) / (g(-lam / 2) * g((lam + k + n) / 2))


def criterion_3(n_samples: int, seed: int) -> list[Check]:
    """Funk-Hecke reduction at m = 1."""
    checks = []
    for n in (2, 3, 4, 5):
        for k in (0, 2, 4):
            for lam in (-0.5, 0.5, 1.5):
                mu = multiplier(n, 1, k, [lam])
                ref = _mu1(n, k, lam)
                c_ref = 2 * np.pi ** ((n - 1) / 2) * (-1) ** (k // 2)
                quad = funk_hecke_eigenvalue(n, k, lam)
                eig = eigen_constant(n, 1, k) * mu
                ok = _rel(mu, ref) < 1e-10 and _rel(eig, c_ref * ref) < 1e-10 and _rel(eig, quad) < 1e-9
                checks.append(Check(f"mu n={n} k={k} lam={lam}", ok,
                                    {"multiplier": mu, "reference": ref, "quadrature": quad}))
    p = HPolynomial.standard(3, 1, 2)
    u = np.array([1.0, 0.0, 1.0]) / np.sqrt(2.0)
    res = eigen_residual(p, [1.0], u, n_samples, seed + 3)
    checks.append(_mc_check("eigen residual n=3 m=1 k=2 lam=1", res.mc, res.predicted))
    return checks


def criterion_4(n_samples: int, seed: int) -> list[Check]:
    """Non-injectivity: the multiplier vanishes and the transform of P_3 is zero."""
    n, m, k = 5, 2, 3
    p = HPolynomial.standard(n, m, k)
    gen = np.random.default_rng([seed, 4])
    frames = [StiefelFrame(sample_haar_batch(n, m, 1, gen)[0]) for _ in range(2)]
    checks = []
    for lam in ((0.0, 0.0), (1.0, 1.0)):
        mu = multiplier(n, m, k, lam)
        checks.append(Check(f"multiplier = 0 at lam={lam}", mu == 0, {"multiplier": mu}))
        for i, u in enumerate(frames):
            est = cosine_mc(IntegrandSpec.h_polynomial(p), lam, u, n_samples, seed + 40 + 2 * int(lam[0]) + i)
            checks.append(_mc_check(f"T P_3 vanishes lam={lam} frame {i}", est, 0.0))
    return checks


def criterion_5(n_samples: int, seed: int) -> list[Check]:
    """Zeta integral of the unit Gaussian, MC vs closed form."""
    cases = {
        (2, 1): ([-0.4], [0.0], [0.7 + 0.5j], [2.0]),
        (4, 2): ([-1.2, -0.8], [0.0, 0.0], [1.0, 0.0], [0.5 - 0.3j, 1.5 + 0.2j]),
    }
    checks = []
    for (n, m), lams in cases.items():
        for i, lam in enumerate(lams):
            est = zeta_mc(None, lam, 1.0, n_samples, seed + 50 + 10 * n + i, n=n, m=m)
            checks.append(_mc_check(f"zeta n={n} m={m} lam={lam}", est, zeta_gaussian_closed_form(n, m, lam)))
    exact = zeta_gaussian_closed_form(2, 1, [0.0])
    checks.append(Check("zeta(2,1,(0)) = pi", abs(exact - np.pi) < 1e-12, {"value": exact}))
    return checks


def criterion_6(n_samples: int, seed: int) -> list[Check]:
    """Hecke identity for the Gaussian Fourier transform of P_k."""
    gen = np.random.default_rng([seed, 6])
    checks = []
    for n, m, k in ((2, 1, 2), (4, 2, 1)):
        p = HPolynomial.standard(n, m, k)
        for i in range(3):
            y = gen.normal(0.0, 0.5, size=(n, m))
            res = hecke_check(p, y, n_samples, seed + 60 + 10 * n + i)
            checks.append(_mc_check(f"hecke n={n} m={m} k={k} y#{i}", res.lhs, res.rhs))
    return checks


def criterion_7(n_samples: int, seed: int) -> list[Check]:
    """Functional equation as a closed-form gamma identity."""
    gen = np.random.default_rng([seed, 7])
    checks = []
    for n, m in ((2, 1), (4, 2)):
        j = np.arange(1, m + 1)
        for _ in range(5):
            lam = (j - m - 1) + gen.uniform(0.05, 0.95, size=m) + 1j * gen.uniform(-1, 1, size=m)
            res = functional_equation_check(n, m, lam)
            checks.append(Check(f"f=1 n={n} m={m} lam={np.round(lam, 4).tolist()}", res.rel_err < 1e-9,
                                {"lhs": res.lhs, "rhs": res.rhs, "rel_err": res.rel_err}))
    n, m, k = 3, 1, 2
    p = HPolynomial.standard(n, m, k)
    for lam in (-0.5, 0.3, -0.9 + 0.4j):
        res = functional_equation_check(n, m, [lam], p)
        d_ref = 2.0 ** (-lam) * np.pi ** (n / 2) * 1j ** k
        ok = (res.rel_err < 1e-9 and res.details["rel_err_hecke_form"] < 1e-9
              and _rel(hecke_constant([lam], n, m, k), d_ref) < 1e-12)
        checks.append(Check(f"f=P_2 n=3 m=1 lam={lam}", ok,
                            {"lhs": res.lhs, "rhs": res.rhs, "rel_err": res.rel_err,
                             "rel_err_hecke_form": res.details["rel_err_hecke_form"]}))
    return checks


def _random_posdef(m: int, gen: np.random.Generator) -> PosDefMatrix:
    a = gen.normal(size=(m, m))
    return PosDefMatrix.from_array(a.T @ a + 0.2 * np.eye(m))


def _random_exponent(m: int, gen: np.random.Generator) -> np.ndarray:
    return gen.uniform(-2, 2, size=m) + 1j * gen.uniform(-1, 1, size=m)


def criterion_8(n_samples: int, seed: int, instances: int = 1000) -> list[Check]:
    """Exact algebraic identities on randomized instances."""
    gen = np.random.default_rng([seed, 8])
    worst: dict[str, float] = {}

    def note(name: str, a: complex, b: complex) -> None:
        worst[name] = max(worst.get(name, 0.0), _rel(a, b))

    for _ in range(instances):
        m = int(gen.integers(1, 5))
        r = _random_posdef(m, gen)
        lam, mu = _random_exponent(m, gen), _random_exponent(m, gen)
        alpha = float(gen.uniform(-2, 2))
        c = float(gen.uniform(0.1, 5))
        rl = composite_power(r, lam)
        note("multiplicativity", composite_power(r, lam + mu), rl * composite_power(r, mu))
        note("scalar shift", composite_power(r, lam + alpha), rl * r.det() ** (alpha / 2))
        t = np.triu(gen.normal(size=(m, m)))
        t[np.diag_indices(m)] = gen.uniform(0.3, 2.0, size=m)
        note("triangular equivariance", composite_power(t.T @ r.entries @ t, lam),
             composite_power(t.T @ t, lam) * rl)
        r_inv = r.inverse()
        note("star inverse", composite_power(r, lam[::-1]), composite_power(star_involution(r_inv), -lam))
        note("inverse star", composite_power(r_inv, lam), composite_power(star_involution(r), -lam[::-1]))
        note("scaling", composite_power(c * r.entries, lam), c ** (np.sum(lam) / 2) * rl)
        note("scaling star", composite_power(star_involution(c * r.entries), lam),
             c ** (np.sum(lam) / 2) * composite_power(star_involution(r), lam))
        note("path equivalence", composite_power(r, lam, method="minors"), rl)

    for _ in range(instances):
        n = int(gen.integers(2, 7))
        m = int(gen.integers(1, n))
        u, v = (sample_haar_batch(n, m, 2, gen)[i] for i in range(2))
        note("duality", projection_volume(u, v), projection_volume(orthocomplement(u).entries,
                                                                    orthocomplement(v).entries))
        x = gen.normal(size=(n, m))
        frame, rr = polar_decompose(x)
        w, e = np.linalg.eigh(rr.entries)
        recon = frame.entries @ (e * np.sqrt(w)) @ e.T
        worst["polar reconstruction"] = max(worst.get("polar reconstruction", 0.0),
                                            float(np.max(np.abs(recon - x)) / np.max(np.abs(x))))
        q, tt = triangular_decompose(x)
        worst["triangular reconstruction"] = max(worst.get("triangular reconstruction", 0.0),
                                                 float(np.max(np.abs(q.entries @ tt - x)) / np.max(np.abs(x))))
        if 2 * m <= n:
            k = int(gen.integers(0, 4)) * (2 if m == 1 else 1)
            p = HPolynomial.standard(n, m, k).rotated(random_rotation(n, gen))
            g = gen.normal(size=(m, m))
            note("homogeneity", p.eval(x @ g), np.linalg.det(g) ** k * p.eval(x))

    checks = [Check(name, val < 1e-10, {"max_rel_err": val, "instances": instances}) for name, val in worst.items()]
    checks.append(_harmonicity_check(gen))
    return checks


def _harmonicity_check(gen: np.random.Generator) -> Check:
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
                    worst = max(worst, abs(numeric_laplacian(p, x)) / scale)
    broken = HPolynomial(np.array([1.0, 0.5, 0.0]), 2, strict=False)
    control = abs(numeric_laplacian(broken, [0.3, 0.2, 0.1]))
    return Check("harmonicity", worst < 1e-6 and control > 1e-2, {"max_scaled_laplacian": worst, "control": control})


# (n, m, lam) -> (in_abs_domain_zeta, on_polar_set, in_existence_domain, injective, frontier)
CLASSIFY_TABLE: tuple[tuple[int, int, tuple, tuple[bool, bool, bool, bool, bool]], ...] = (
    (3, 1, (0.5,), (True, False, True, True, False)),
    (3, 1, (0.0,), (True, False, True, False, False)),
    (3, 1, (2.0,), (True, False, True, False, False)),
    (3, 1, (1.0,), (True, False, True, True, False)),
    (3, 1, (-1.0,), (True, False, False, True, False)),
    (3, 1, (-3.0,), (False, True, False, True, False)),
    (3, 1, (-4.0,), (False, False, False, True, False)),
    (3, 1, (-5.0,), (False, True, False, True, False)),
    (2, 1, (-2.0,), (False, True, False, True, False)),
    (5, 2, (0.0, 0.0), (True, False, True, False, False)),
    (5, 2, (1.0, 1.0), (True, False, True, False, False)),
    (5, 2, (0.5, 0.5), (True, False, True, True, False)),
    (5, 2, (-1.0, 0.5), (True, False, True, False, False)),
    (4, 2, (-1.5, -0.5), (True, False, True, True, False)),
    (4, 2, (-2.0, 0.0), (True, False, False, False, False)),
    (3, 2, (1.0, 0.0), (True, False, True, False, True)),
    (3, 2, (0.5, 0.5), (True, False, True, True, False)),
    (3, 2, (0.0, 0.0), (True, False, True, False, False)),
    (4, 2, (-4.0, -2.0), (False, True, False, True, False)),
    (4, 3, (1 + 0.5j, 0.0, 0.0), (True, False, True, False, True)),
)


def criterion_9(n_samples: int, seed: int) -> list[Check]:
    """Domain classification against a hand-built table."""
    checks = []
    for n, m, lam, expected in CLASSIFY_TABLE:
        rep = classify(as_exponent(lam), n, m)
        got = (rep.in_abs_domain_zeta, rep.on_polar_set, rep.in_existence_domain, rep.injective, rep.frontier)
        checks.append(Check(f"classify n={n} m={m} lam={lam}", got == expected,
                            {"expected": list(expected), "got": list(got)}))
    return checks


CRITERIA: dict[int, tuple[str, Callable[[int, int], list[Check]]]] = {
    1: ("closed-form average vs Monte Carlo", criterion_1),
    2: ("circle oracle", criterion_2),
    3: ("Funk-Hecke reduction", criterion_3),
    4: ("non-injectivity witness", criterion_4),
    5: ("Gaussian zeta integral", criterion_5),
    6: ("Hecke identity", criterion_6),
    7: ("functional equation", criterion_7),
    8: ("exact algebra", criterion_8),
    9: ("domain classification", criterion_9),
}


def run_criterion(number: int, n_samples: int = FULL_N, seed: int = DEFAULT_SEED) -> CriterionResult:
    title, fn = CRITERIA[number]
    start = time.perf_counter()
    checks = tuple(fn(n_samples, seed))
    return CriterionResult(number, title, checks, time.perf_counter() - start)


def run_suite(quick: bool = False, seed: int = DEFAULT_SEED) -> list[CriterionResult]:
    n = QUICK_N if quick else FULL_N
    return [run_criterion(i, n, seed) for i in sorted(CRITERIA)]
