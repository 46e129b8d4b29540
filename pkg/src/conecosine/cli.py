"""Command-line harness.

Each run writes one JSON object per line (a run report) to standard output
or to ``--out``. Exit codes: 0 success, 1 failed check, 2 usage error,
3 domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from contextlib import nullcontext
from typing import Any, Callable, Sequence

import numpy as np

from . import acceptance
from .cone_core import PosDefMatrix, as_exponent, composite_power
from .cone_gamma import classify, gamma_omega, siegel_gamma
from .cosine import (
    avg_closed_form,
    cosine_mc,
    eigen_constant,
    eigen_residual,
    multiplier,
)
from .errors import ConeCosineError, DimensionError, DomainError
from .hpoly import HPolynomial
from .mc import RngStream, z_score
from .stiefel import orthocomplement, projection_volume, sample_haar, sample_haar_batch, stiefel_mass
from .zeta import functional_equation_check, hecke_check, zeta_gaussian_closed_form, zeta_mc, zeta_star_mc

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
Z_LIMIT = 3.0
REL_LIMIT = 1e-9

LAMBDA_HELP = (
    "comma-separated exponent entries; each token is 're' or 're+imI' "
    "(e.g. 1,0.5 or 0.5+2I,-1-0.25I). Use --lambda=-1.5,-0.5 when the first entry is negative"
)


class UsageError(Exception):
    pass


def parse_lambda(text: str) -> list[complex]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        bad = argparse.ArgumentTypeError(f"bad exponent token {tok!r}; expected 're' or 're+imI'")
        if not tok or "j" in tok.lower() or " " in tok:
            raise bad
        if tok[-1] in "Ii":
            tok = tok[:-1] + "j"
        try:
            out.append(complex(tok))
        except ValueError:
            raise bad from None
    return out


def parse_matrix(text: str) -> np.ndarray:
    """Rows separated by ';', entries by ','."""
    try:
        rows = [[float(v) for v in row.split(",")] for row in text.split(";")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad matrix {text!r}: {exc}") from None
    if len({len(r) for r in rows}) != 1:
        raise argparse.ArgumentTypeError("matrix rows have different lengths")
    return np.array(rows)


def to_jsonable(value: Any) -> Any:
    """Complex numbers become ``{"re", "im"}``; non-finite floats become strings."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, (complex, np.complexfloating)):
        v = complex(value)
        return {"re": to_jsonable(v.real), "im": to_jsonable(v.imag)}
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def _lam_param(lam: Sequence[complex]) -> list:
    return [v.real if v.imag == 0 else v for v in lam]


def _mc_result(est, expected: complex | None = None) -> dict:
    out = {"value": est.value, "std_error": est.std_error, "n_accepted": est.n_samples, "n_rejected": est.n_rejected}
    if expected is not None:
        out["closed_form"] = expected
        out["z_score"] = z_score(est.value, expected, est.std_error)
    return out


def _frame(args, n: int, m: int, stream: int) -> np.ndarray:
    if getattr(args, "u", None) is not None:
        u = args.u
        if u.shape != (n, m):
            raise DimensionError(f"--u must be {n}x{m}")
        return u
    return sample_haar(n, m, RngStream(args.seed, stream)).entries


# Each command returns (params, result, pass, n_samples).
Outcome = tuple[dict, dict, bool, int]


def cmd_gamma(args) -> Outcome:
    if args.siegel is not None:
        m, a = args.siegel
        val = siegel_gamma(int(m.real), a)
        return {"siegel_m": int(m.real), "a": a}, {"value": val}, True, 0
    if args.lam is None:
        raise UsageError("gamma needs --lambda or --siegel")
    return {"lambda": _lam_param(args.lam)}, {"value": gamma_omega(args.lam)}, True, 0


def cmd_sigma(args) -> Outcome:
    return {"n": args.n, "m": args.m}, {"value": stiefel_mass(args.n, args.m)}, True, 0


def cmd_power(args) -> Outcome:
    r = PosDefMatrix.from_array(args.r)
    tri = composite_power(r, args.lam)
    minors = composite_power(r, args.lam, method="minors")
    denom = max(abs(tri), abs(minors))
    rel = 0.0 if denom == 0 else abs(tri - minors) / denom
    params = {"r": args.r, "lambda": _lam_param(args.lam)}
    return params, {"value": tri, "closed_form": minors, "rel_err": rel}, rel < REL_LIMIT, 0


def cmd_classify(args) -> Outcome:
    rep = classify(args.lam, args.n, args.m)
    return {"n": args.n, "m": args.m, "lambda": _lam_param(args.lam)}, rep.as_dict(), True, 0


def cmd_avg(args) -> Outcome:
    cf = avg_closed_form(args.n, args.m, args.lam)
    params = {"n": args.n, "m": args.m, "lambda": _lam_param(args.lam)}
    if args.N == 0:
        return params, {"value": cf}, True, 0
    u = _frame(args, args.n, args.m, 1)
    est = cosine_mc(None, args.lam, u, args.N, args.seed)
    res = _mc_result(est, cf)
    return params, res, res["z_score"] < Z_LIMIT, args.N


def _poly(args, n: int, m: int) -> HPolynomial | None:
    return None if args.k is None else HPolynomial.standard(n, m, args.k)


def cmd_cosine(args) -> Outcome:
    u = args.u if args.u is not None else sample_haar(args.n, args.m, RngStream(args.seed, 1)).entries
    n, m = u.shape
    if (n, m) != (args.n, args.m):
        raise DimensionError(f"--u must be {args.n}x{args.m}")
    p = _poly(args, n, m)
    lam = as_exponent(args.lam, m)
    est = cosine_mc(p, lam, u, args.N, args.seed)
    # closed form on the unit frame: avg for f = 1, c mu_k P(u) otherwise
    orthonormal = np.allclose(u.T @ u, np.eye(m), atol=1e-10)
    expected = None
    if orthonormal:
        if p is None:
            expected = avg_closed_form(n, m, lam)
        else:
            expected = eigen_constant(n, m, p.k) * multiplier(n, m, p.k, lam) * p.eval(u)
    params = {"n": n, "m": m, "k": args.k, "lambda": _lam_param(args.lam), "u": u}
    res = _mc_result(est, expected)
    ok = True if expected is None else res["z_score"] < Z_LIMIT
    return params, res, ok, args.N


def cmd_eigen(args) -> Outcome:
    n, m, k = args.n, args.m, args.k
    params = {"n": n, "m": m, "k": k, "lambda": _lam_param(args.lam)}
    mu = multiplier(n, m, k, args.lam)
    c = eigen_constant(n, m, k)
    result = {"multiplier": mu, "constant": c, "value": c * mu, "injective": classify(args.lam, n, m).injective}
    if args.N == 0:
        return params, result, True, 0
    p = HPolynomial.standard(n, m, k)
    u = _nonvanishing_frame(p, args.seed)
    res = eigen_residual(p, args.lam, u, args.N, args.seed)
    result.update(_mc_result(res.mc, res.predicted))
    result["multiplier"], result["constant"] = mu, c
    params["u"] = u
    return params, result, result["z_score"] < Z_LIMIT, args.N


def _nonvanishing_frame(p: HPolynomial, seed: int) -> np.ndarray:
    gen = RngStream(seed, 1).generator()
    for _ in range(100):
        u = sample_haar_batch(p.n, p.m, 1, gen)[0]
        if abs(p.eval(u)) > 1e-3:
            return u
    raise DomainError("could not find a frame where the polynomial is non-negligible")


def cmd_annihilate(args) -> Outcome:
    n, m, k = args.n, args.m, args.k
    p = HPolynomial.standard(n, m, k)
    mu = multiplier(n, m, k, args.lam)
    u = _frame(args, n, m, 1)
    predicted = eigen_constant(n, m, k) * mu * p.eval(u)
    est = cosine_mc(p, args.lam, u, args.N, args.seed)
    res = _mc_result(est, predicted)
    res["multiplier"] = mu
    params = {"n": n, "m": m, "k": k, "lambda": _lam_param(args.lam), "u": u}
    return params, res, bool(mu == 0 and res["z_score"] < Z_LIMIT), args.N


def cmd_zeta(args) -> Outcome:
    n, m = args.n, args.m
    p = _poly(args, n, m)
    fn = zeta_star_mc if args.star else zeta_mc
    est = fn(p, args.lam, args.beta, args.N, args.seed, n=n, m=m)
    expected = None if p is not None else zeta_gaussian_closed_form(n, m, args.lam, args.beta)
    params = {"n": n, "m": m, "k": args.k, "lambda": _lam_param(args.lam), "beta": args.beta, "star": args.star}
    res = _mc_result(est, expected)
    ok = True if expected is None else res["z_score"] < Z_LIMIT
    return params, res, ok, args.N


def cmd_hecke(args) -> Outcome:
    p = HPolynomial.standard(args.n, args.m, args.k)
    y = args.y if args.y is not None else RngStream(args.seed, 1).generator().normal(0.0, 0.5, (args.n, args.m))
    r = hecke_check(p, y, args.N, args.seed)
    params = {"n": args.n, "m": args.m, "k": args.k, "y": y}
    res = _mc_result(r.lhs, r.rhs)
    return params, res, res["z_score"] < Z_LIMIT, args.N


def cmd_funceq(args) -> Outcome:
    p = _poly(args, args.n, args.m)
    r = functional_equation_check(args.n, args.m, args.lam, p)
    params = {"n": args.n, "m": args.m, "k": args.k, "lambda": _lam_param(args.lam)}
    res = {"lhs": r.lhs, "rhs": r.rhs, "rel_err": r.rel_err, **r.details}
    return params, res, r.rel_err < REL_LIMIT, 0


def cmd_duality(args) -> Outcome:
    gen = RngStream(args.seed, 1).generator()
    worst = 0.0
    for _ in range(args.pairs):
        u, v = sample_haar_batch(args.n, args.m, 2, gen)
        a = projection_volume(u, v)
        b = projection_volume(orthocomplement(u), orthocomplement(v))
        d = max(abs(a), abs(b))
        worst = max(worst, 0.0 if d == 0 else abs(a - b) / d)
    params = {"n": args.n, "m": args.m, "pairs": args.pairs}
    return params, {"value": worst, "rel_err": worst}, worst < 1e-10, 0


COMMANDS: dict[str, Callable[[argparse.Namespace], Outcome]] = {
    "gamma": cmd_gamma,
    "sigma": cmd_sigma,
    "power": cmd_power,
    "classify": cmd_classify,
    "avg": cmd_avg,
    "cosine": cmd_cosine,
    "eigen": cmd_eigen,
    "annihilate": cmd_annihilate,
    "zeta": cmd_zeta,
    "hecke": cmd_hecke,
    "funceq": cmd_funceq,
    "duality": cmd_duality,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conecosine",
        description="Composite cosine transform on Stiefel manifolds: computations and verification runs.",
        epilog="Complex exponents: " + LAMBDA_HELP + ".",
    )
    def with_seed(default: int) -> argparse.ArgumentParser:
        p = argparse.ArgumentParser(add_help=False)
        p.add_argument("--seed", type=int, default=default, help=f"master seed for Monte Carlo runs (default {default})")
        p.add_argument("--out", default=None, help="append reports to this file instead of stdout")
        return p

    common = with_seed(0)

    dims = argparse.ArgumentParser(add_help=False)
    dims.add_argument("--n", type=int, required=True)
    dims.add_argument("--m", type=int, required=True)

    lam_req = argparse.ArgumentParser(add_help=False)
    lam_req.add_argument("--lambda", dest="lam", type=parse_lambda, required=True, help=LAMBDA_HELP)

    def mc(default: int) -> argparse.ArgumentParser:
        p = argparse.ArgumentParser(add_help=False)
        p.add_argument("--N", type=int, default=default, help=f"Monte Carlo sample count (default {default})")
        return p

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("gamma", parents=[common], help="cone gamma function")
    p.add_argument("--lambda", dest="lam", type=parse_lambda, default=None, help=LAMBDA_HELP)
    p.add_argument("--siegel", type=parse_lambda, default=None, metavar="M,A", help="Siegel gamma Gamma_M(A)")

    sub.add_parser("sigma", parents=[common, dims], help="Haar mass of V_{n,m}")

    p = sub.add_parser("power", parents=[common, lam_req], help="composite power of a positive definite matrix")
    p.add_argument("--r", type=parse_matrix, required=True, help="matrix, rows ';'-separated, e.g. 2,0.3;0.3,1.5")

    sub.add_parser("classify", parents=[common, dims, lam_req], help="domain classification of an exponent")

    p = sub.add_parser("avg", parents=[common, dims, lam_req, mc(0)],
                       help="closed-form average of the composite power; MC check when --N > 0")
    p.add_argument("--u", type=parse_matrix, default=None, help="frame (default: Haar draw from --seed)")

    p = sub.add_parser("cosine", parents=[common, dims, lam_req, mc(100_000)], help="Monte Carlo cosine transform")
    p.add_argument("--k", type=int, default=None, help="degree of the H-polynomial integrand (default f = 1)")
    p.add_argument("--u", type=parse_matrix, default=None, help="evaluation point (any full-rank n x m matrix)")

    p = sub.add_parser("eigen", parents=[common, dims, mc(0)], help="multiplier mu_k and its MC check")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=parse_lambda, default=None, help=LAMBDA_HELP)
    p.add_argument("--sweep", default=None, metavar="LO:HI:STEPS",
                   help="tabulate mu_k over constant exponents lam in [LO, HI]; write --sweep=-1:3:41 for a negative LO")
    p.add_argument("--csv", action="store_true", help="with --sweep, write CSV instead of JSON lines")

    p = sub.add_parser("annihilate", parents=[common, dims, lam_req, mc(100_000)],
                       help="check that the transform kills P_k where mu_k = 0")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--u", type=parse_matrix, default=None)

    p = sub.add_parser("zeta", parents=[common, dims, lam_req, mc(100_000)], help="Gaussian zeta integral")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--beta", type=float, default=1.0, help="Gaussian scale (default 1)")
    p.add_argument("--star", action="store_true", help="use the starred kernel")

    p = sub.add_parser("hecke", parents=[common, dims, mc(100_000)], help="Hecke identity check")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--y", type=parse_matrix, default=None, help="point y (default: seeded draw)")

    p = sub.add_parser("funceq", parents=[common, dims, lam_req], help="functional equation in closed form")
    p.add_argument("--k", type=int, default=None)

    p = sub.add_parser("duality", parents=[common, dims], help="projection volume of complements")
    p.add_argument("--pairs", type=int, default=1000)

    p = sub.add_parser("suite", parents=[with_seed(acceptance.DEFAULT_SEED)], help="run the acceptance battery")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--quick", action="store_true", help=f"N = {acceptance.QUICK_N} per MC check")
    g.add_argument("--full", action="store_true", help=f"N = {acceptance.FULL_N} per MC check (default)")
    p.add_argument("--criteria", default=None, help="comma-separated criterion numbers (default all)")
    return parser


def make_report(command: str, params: dict, result: dict, seed: int, n_samples: int, wall_ms: int, ok: bool) -> dict:
    return {
        "command": command,
        "params": params,
        "result": result,
        "seed": seed,
        "n_samples": n_samples,
        "wall_time_ms": wall_ms,
        "pass": ok,
    }


def dumps(report: dict) -> str:
    return json.dumps(to_jsonable(report), allow_nan=False)


def _sweep_rows(args) -> list[dict]:
    try:
        lo, hi, steps = args.sweep.split(":")
        grid = np.linspace(float(lo), float(hi), int(steps))
    except ValueError:
        raise UsageError("--sweep expects LO:HI:STEPS") from None
    rows = []
    for lam in grid:
        try:
            mu = multiplier(args.n, args.m, args.k, float(lam))
        except DomainError:
            mu = complex("nan")
        rows.append({"lambda": float(lam), "mu_re": mu.real, "mu_im": mu.imag})
    return rows


def _run_sweep(args, write: Callable[[str], None]) -> int:
    rows = _sweep_rows(args)
    if args.csv:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["lambda", "mu_re", "mu_im"], lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(v) for k, v in row.items()})
        write(buf.getvalue())
    else:
        params = {"n": args.n, "m": args.m, "k": args.k, "sweep": args.sweep}
        write(dumps(make_report("eigen", params, {"rows": rows}, args.seed, 0, 0, True)) + "\n")
    return EXIT_OK


def _run_suite(args, write: Callable[[str], None]) -> int:
    n = acceptance.QUICK_N if args.quick else acceptance.FULL_N
    if args.criteria:
        try:
            numbers = [int(c) for c in args.criteria.split(",")]
        except ValueError:
            raise UsageError("--criteria expects comma-separated integers") from None
        if any(c not in acceptance.CRITERIA for c in numbers):
            raise UsageError(f"criteria must be among {sorted(acceptance.CRITERIA)}")
    else:
        numbers = sorted(acceptance.CRITERIA)
    ok_all = True
    for number in numbers:
        res = acceptance.run_criterion(number, n, args.seed)
        ok_all &= res.passed
        result = {
            "criterion": number,
            "title": res.title,
            "checks": [{"label": c.label, "pass": c.passed, **c.detail} for c in res.checks],
        }
        params = {"criterion": number, "mode": "quick" if args.quick else "full"}
        write(dumps(make_report("suite", params, result, args.seed, n, int(res.wall_time_s * 1000), res.passed)) + "\n")
    return EXIT_OK if ok_all else EXIT_FAIL


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    """Parse ``argv``, execute, write reports; return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    stdout = stdout or sys.stdout
    ctx = open(args.out, "a", encoding="utf-8") if args.out else nullcontext(stdout)
    with ctx as sink:
        try:
            if args.command == "suite":
                return _run_suite(args, sink.write)
            if args.command == "eigen" and args.sweep:
                return _run_sweep(args, sink.write)
            if args.command == "eigen" and args.lam is None:
                raise UsageError("eigen needs --lambda (or --sweep)")
            start = time.perf_counter()
            params, result, ok, n_samples = COMMANDS[args.command](args)
            wall = int((time.perf_counter() - start) * 1000)
            sink.write(dumps(make_report(args.command, params, result, args.seed, n_samples, wall, ok)) + "\n")
            return EXIT_OK if ok else EXIT_FAIL
        except (UsageError, DimensionError) as exc:
            print(f"conecosine {args.command}: usage error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except ConeCosineError as exc:
            print(f"conecosine {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_DOMAIN


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
