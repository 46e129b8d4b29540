import io
import json
import subprocess
import sys

import numpy as np
import pytest

from conecosine.cli import parse_lambda, run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    lines = [json.loads(line) for line in buf.getvalue().splitlines() if line.startswith("{")]
    return code, lines, buf.getvalue()


def test_sigma():
    code, (rep,), _ = call("sigma", "--n", "3", "--m", "1")
    assert code == 0 and rep["pass"] is True
    assert abs(rep["result"]["value"] - 4 * np.pi) < 1e-12
    assert set(rep) == {"command", "params", "result", "seed", "n_samples", "wall_time_ms", "pass"}


def test_classify():
    code, (rep,), _ = call("classify", "--n", "5", "--m", "2", "--lambda", "1,1")
    assert code == 0
    assert rep["result"]["injective"] is False and rep["result"]["in_existence_domain"] is True


def test_annihilate():
    code, (rep,), _ = call("annihilate", "--n", "5", "--m", "2", "--lambda", "0,0", "--k", "2",
                           "--N", "1000000", "--seed", "7")
    res = rep["result"]
    assert res["multiplier"] == {"re": 0.0, "im": 0.0}
    assert res["closed_form"]["re"] == 0.0 and res["closed_form"]["im"] == 0.0
    assert res["z_score"] < 3 and rep["pass"] is True and code == 0


def test_annihilate_fails_where_multiplier_is_nonzero():
    code, (rep,), _ = call("annihilate", "--n", "4", "--m", "2", "--lambda", "0.5,0.5", "--k", "2", "--N", "20000")
    assert rep["pass"] is False and code == 1


def test_reports_are_deterministic():
    argv = ["cosine", "--n", "4", "--m", "2", "--lambda", "1,0.5+0.25I", "--k", "2", "--N", "50000", "--seed", "3"]
    a, b = call(*argv)[1][0], call(*argv)[1][0]
    a.pop("wall_time_ms"), b.pop("wall_time_ms")
    assert json.dumps(a) == json.dumps(b)


def test_complex_lambda_parsing():
    assert parse_lambda("1,0.5+2I,-1-0.25i,3I") == [1, 0.5 + 2j, -1 - 0.25j, 3j]
    for bad in ("1,,2", "1+2j", "abc", "1 + 2I"):
        with pytest.raises(Exception):
            parse_lambda(bad)


def test_negative_lambda_and_funceq():
    code, (rep,), _ = call("funceq", "--n", "4", "--m", "2", "--lambda=-1.5,-0.5")
    assert code == 0 and rep["result"]["rel_err"] < 1e-9


def test_exit_codes():
    assert call("sigma", "--n", "3")[0] == 2
    assert call("nonsense")[0] == 2
    assert call("classify", "--n", "2", "--m", "3", "--lambda", "1")[0] == 2
    assert call("zeta", "--n", "2", "--m", "1", "--lambda=-3")[0] == 3
    assert call("avg", "--n", "3", "--m", "1", "--lambda=-2")[0] == 3
    assert call("gamma", "--lambda", "0")[0] == 3


def test_gamma_and_power():
    code, (rep,), _ = call("gamma", "--lambda", "6")
    assert abs(rep["result"]["value"]["re"] - 2.0) < 1e-14
    code, (rep,), _ = call("power", "--r", "2,0.3;0.3,1.5", "--lambda", "1.5,2.5")
    assert rep["pass"] and rep["result"]["rel_err"] < 1e-12


def test_zeta_hecke_duality():
    assert call("zeta", "--n", "2", "--m", "1", "--lambda", "0")[1][0]["result"]["z_score"] == 0.0
    assert call("hecke", "--n", "2", "--m", "1", "--k", "2", "--y", "1;0", "--N", "50000")[0] == 0
    code, (rep,), _ = call("duality", "--n", "5", "--m", "2", "--pairs", "200")
    assert code == 0 and rep["result"]["rel_err"] < 1e-10


def test_eigen_and_sweep_csv():
    code, (rep,), _ = call("eigen", "--n", "3", "--m", "1", "--k", "2", "--lambda", "1", "--N", "50000", "--seed", "2")
    assert code == 0 and rep["result"]["z_score"] < 3
    code, _, text = call("eigen", "--n", "3", "--m", "1", "--k", "2", "--sweep=-0.5:1.5:5", "--csv")
    rows = text.strip().splitlines()
    assert code == 0 and rows[0] == "lambda,mu_re,mu_im" and len(rows) == 6


def test_out_file(tmp_path):
    out = tmp_path / "r.ndjson"
    assert call("sigma", "--n", "2", "--m", "1", "--out", str(out))[2] == ""
    assert call("sigma", "--n", "3", "--m", "1", "--out", str(out))[0] == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2 and json.loads(lines[1])["params"] == {"n": 3, "m": 1}


def test_quick_suite_subset():
    code, reps, _ = call("suite", "--quick", "--criteria", "2,7,9")
    assert code == 0 and [r["params"]["criterion"] for r in reps] == [2, 7, 9]
    assert all(r["pass"] for r in reps)
    assert call("suite", "--criteria", "12")[0] == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "conecosine", "sigma", "--n", "2", "--m", "1"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["result"]["value"] == pytest.approx(2 * np.pi)
