"""Deterministic sharded Monte Carlo engine.

A run of ``N`` draws is cut into fixed-size shards. Shard ``i`` draws from
its own counter-based stream keyed by ``(seed, i)`` and the shard summaries
are merged in shard order, so the result depends only on ``(seed, N,
shard_size)`` and not on how many worker threads executed the shards.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SamplingError

__all__ = ["RngStream", "McEstimate", "run_sharded", "default_workers", "z_score"]

DEFAULT_SHARD = 1 << 16
THREADS_ENV = "CONECOSINE_THREADS"


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream identified by ``(seed, stream_id)``."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence([self.seed & (2**64 - 1), self.stream_id & (2**64 - 1)])
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo estimate of a complex integral.

    ``std_error`` combines the standard errors of the real and imaginary
    parts in quadrature. ``n_samples`` counts accepted draws.
    """

    value: complex
    std_error: float
    n_samples: int
    seed: int
    n_rejected: int = 0

    def scaled(self, c: complex) -> "McEstimate":
        return McEstimate(self.value * c, self.std_error * abs(c), self.n_samples, self.seed, self.n_rejected)

    def z_against(self, expected: complex) -> float:
        return z_score(self.value, expected, self.std_error)


EXACT_RTOL = 1e-12


def z_score(value: complex, expected: complex, std_error: float) -> float:
    """``|value - expected| / std_error``.

    A zero-variance estimate (constant weights) is exact: it scores 0 when it
    agrees to ``EXACT_RTOL`` relative and ``inf`` otherwise.
    """
    diff = abs(complex(value) - complex(expected))
    if std_error > 0.0:
        return diff / std_error
    return 0.0 if diff <= EXACT_RTOL * max(1.0, abs(complex(expected))) else float("inf")


def default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))


@dataclass(frozen=True)
class _ShardSummary:
    count: int
    mean: complex
    m2_re: float
    m2_im: float
    rejected: int


def _summarize(values: np.ndarray, rejected: int) -> _ShardSummary:
    values = np.asarray(values, dtype=complex)
    n = values.size
    if n == 0:
        return _ShardSummary(0, 0j, 0.0, 0.0, rejected)
    mean = values.mean()
    dev = values - mean
    return _ShardSummary(n, complex(mean), float(np.sum(dev.real**2)), float(np.sum(dev.imag**2)), rejected)


def _merge(a: _ShardSummary, b: _ShardSummary) -> _ShardSummary:
    # Chan et al. pairwise update, applied in shard order
    n = a.count + b.count
    if b.count == 0:
        return _ShardSummary(a.count, a.mean, a.m2_re, a.m2_im, a.rejected + b.rejected)
    if a.count == 0:
        return _ShardSummary(b.count, b.mean, b.m2_re, b.m2_im, a.rejected + b.rejected)
    delta = b.mean - a.mean
    mean = a.mean + delta * (b.count / n)
    w = a.count * b.count / n
    return _ShardSummary(
        n,
        mean,
        a.m2_re + b.m2_re + delta.real**2 * w,
        a.m2_im + b.m2_im + delta.imag**2 * w,
        a.rejected + b.rejected,
    )


SampleFn = Callable[[np.random.Generator, int], "tuple[np.ndarray, int]"]


def run_sharded(
    sample_fn: SampleFn,
    n_samples: int,
    seed: int,
    *,
    scale: complex = 1.0,
    shard_size: int = DEFAULT_SHARD,
    workers: int | None = None,
    max_reject_fraction: float = 1e-3,
) -> McEstimate:
    """Estimate ``scale * E[sample]`` from ``n_samples`` draws.

    ``sample_fn(gen, size)`` returns ``(values, n_rejected)`` where
    ``values`` holds the integrand at the accepted draws.
    """
    n_samples = int(n_samples)
    if n_samples < 2:
        raise ValueError("need at least two samples")
    sizes = [shard_size] * (n_samples // shard_size)
    if n_samples % shard_size:
        sizes.append(n_samples % shard_size)

    def shard(i: int) -> _ShardSummary:
        gen = RngStream(seed, i).generator()
        values, rejected = sample_fn(gen, sizes[i])
        return _summarize(values, int(rejected))

    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(sizes) == 1:
        parts = [shard(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(shard, range(len(sizes))))

    total = parts[0]
    for p in parts[1:]:
        total = _merge(total, p)
    if total.rejected > max_reject_fraction * n_samples:
        raise SamplingError(
            f"rejected {total.rejected} of {n_samples} draws (limit {max_reject_fraction:.1%})"
        )
    if total.count < 2:
        raise SamplingError("fewer than two accepted draws")
    var_re = total.m2_re / (total.count - 1)
    var_im = total.m2_im / (total.count - 1)
    se = float(np.sqrt((var_re + var_im) / total.count))
    scale = complex(scale)
    return McEstimate(total.mean * scale, se * abs(scale), total.count, seed, total.rejected)
