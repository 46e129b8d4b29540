import numpy as np
import pytest

from conecosine.errors import SamplingError
from conecosine.mc import McEstimate, RngStream, default_workers, run_sharded, z_score


def gaussian_square(gen, size):
    x = gen.normal(size=size)
    return x * x + 1j * x, 0


def test_worker_count_does_not_change_result():
    runs = [run_sharded(gaussian_square, 300_000, seed=5, shard_size=1 << 14, workers=w) for w in (1, 2, 5)]
    assert all(r == runs[0] for r in runs)


def test_env_var_controls_workers(monkeypatch):
    monkeypatch.setenv("CONECOSINE_THREADS", "3")
    assert default_workers() == 3
    a = run_sharded(gaussian_square, 150_000, seed=1)
    monkeypatch.setenv("CONECOSINE_THREADS", "1")
    assert a == run_sharded(gaussian_square, 150_000, seed=1)


def test_merge_matches_direct_statistics():
    size, shard = 100_003, 1 << 12
    est = run_sharded(gaussian_square, size, seed=2, shard_size=shard, workers=1)
    vals = []
    for i in range((size + shard - 1) // shard):
        n_i = min(shard, size - i * shard)
        vals.append(gaussian_square(RngStream(2, i).generator(), n_i)[0])
    vals = np.concatenate(vals)
    assert abs(est.value - vals.mean()) < 1e-12
    se = np.sqrt((vals.real.var(ddof=1) + vals.imag.var(ddof=1)) / vals.size)
    assert abs(est.std_error - se) < 1e-12 * se
    assert est.n_samples == size


def test_estimate_is_consistent():
    est = run_sharded(gaussian_square, 200_000, seed=3)
    assert est.z_against(1.0) < 3


def test_scale_and_seed_change():
    a = run_sharded(gaussian_square, 10_000, seed=4, scale=2.0)
    b = run_sharded(gaussian_square, 10_000, seed=4)
    assert a.value == 2.0 * b.value and a.std_error == 2.0 * b.std_error
    assert run_sharded(gaussian_square, 10_000, seed=5).value != b.value


def test_rejections_are_counted_and_bounded():
    def reject_some(gen, size):
        x = gen.normal(size=size)
        return x[2:], 2

    est = run_sharded(reject_some, 1 << 17, seed=0)
    assert est.n_rejected == 4 and est.n_samples == (1 << 17) - 4

    def reject_many(gen, size):
        return gen.normal(size=size // 2), size - size // 2

    with pytest.raises(SamplingError):
        run_sharded(reject_many, 10_000, seed=0)
    with pytest.raises(ValueError):
        run_sharded(gaussian_square, 1, seed=0)


def test_z_score_zero_variance():
    assert z_score(np.pi, np.pi * (1 + 1e-15), 0.0) == 0.0
    assert z_score(1.0, 1.1, 0.0) == float("inf")
    est = McEstimate(1 + 1j, 0.5, 10, 0)
    assert est.z_against(1.0) == 2.0
    assert est.scaled(2j).value == 2j * (1 + 1j)
