"""Semiclassical coherent-state sampling and quadrature statistics.

A coherent state with mean amplitude alpha is modeled as alpha plus complex
Gaussian noise: independent fluctuations of variance 1/4 on the real part
(x quadrature) and on the imaginary part (p quadrature).  In these units the
photon number of the mean field is |alpha|^2 and every coherent state, the
vacuum included, saturates the Heisenberg bound sqrt(var_x * var_p) = 1/4.

Random numbers come from counter-based Philox streams addressed by a master
seed plus an index tuple, so any (seed, index) pair reproduces the identical
sequence regardless of how work is scheduled across threads or processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Per-quadrature variance of an ideal coherent state (vacuum noise level).
VAR_COH = 0.25

# Standard deviation matching VAR_COH, used for every Gaussian quadrature draw.
_SIGMA_COH = 0.5


def photon_number(alpha):
    """Mean photon number |alpha|^2 of a mean amplitude (scalar or array)."""
    a = np.asarray(alpha)
    return (a.real ** 2 + a.imag ** 2) if a.ndim else float(a.real ** 2 + a.imag ** 2)


def quadratures(alpha):
    """Split a complex amplitude into its (x, p) quadrature pair."""
    a = np.asarray(alpha)
    if a.ndim:
        return a.real, a.imag
    return float(a.real), float(a.imag)


@dataclass(frozen=True)
class RngStream:
    """Addressed random stream: a master seed plus an index tuple.

    Two streams with the same (master_seed, stream_index) yield identical
    sequences; distinct index tuples give statistically independent streams.
    ``substream`` extends the index, which is how per-point and per-chunk
    streams are derived without any coordination between workers.
    """

    master_seed: int
    stream_index: tuple = field(default=())

    def substream(self, *indices) -> "RngStream":
        return RngStream(self.master_seed, self.stream_index + tuple(int(i) for i in indices))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.stream_index)
        return np.random.Generator(np.random.Philox(seq))


def as_generator(rng) -> np.random.Generator:
    """Accept an RngStream or a ready numpy Generator and return a Generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def sample_coherent(mean, rng, size=None):
    """Draw coherent-state field samples about a mean amplitude.

    The x block is drawn before the p block so that a given stream always
    produces the same samples.  With ``size=None`` the output matches the
    shape of ``mean`` (a scalar mean gives a single complex number).
    """
    gen = as_generator(rng)
    shape = np.shape(mean) if size is None else size
    gx = gen.normal(scale=_SIGMA_COH, size=shape)
    gp = gen.normal(scale=_SIGMA_COH, size=shape)
    out = np.asarray(mean) + gx + 1j * gp
    if np.ndim(out) == 0:
        return complex(out)
    return out


@dataclass(frozen=True)
class QuadratureStats:
    """Ensemble mean and unbiased variance of both quadratures.

    ``se_var_x`` and ``se_var_p`` are the standard errors of the variance
    estimates, var * sqrt(2 / (trials - 1)), valid for near-Gaussian data.
    """

    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    se_var_x: float
    se_var_p: float
    trials: int

    @property
    def se_mean_x(self) -> float:
        return math.sqrt(self.var_x / self.trials)

    @property
    def se_mean_p(self) -> float:
        return math.sqrt(self.var_p / self.trials)


def estimate_stats(samples) -> QuadratureStats:
    """Estimate QuadratureStats from an ensemble of complex field samples."""
    a = np.asarray(samples, dtype=complex).ravel()
    n = a.size
    if n < 2:
        raise ValueError("insufficient data: need at least 2 samples")
    x = a.real
    p = a.imag
    var_x = float(np.var(x, ddof=1))
    var_p = float(np.var(p, ddof=1))
    se_scale = math.sqrt(2.0 / (n - 1))
    return QuadratureStats(
        mean_x=float(np.mean(x)),
        mean_p=float(np.mean(p)),
        var_x=var_x,
        var_p=var_p,
        se_var_x=var_x * se_scale,
        se_var_p=var_p * se_scale,
        trials=n,
    )


def merge_stats(a: QuadratureStats, b: QuadratureStats) -> QuadratureStats:
    """Combine two disjoint ensembles into the exact pooled statistics.

    Uses the pairwise update for mean and second moment, so a chunked or
    parallel run merged in a fixed order reproduces the whole-ensemble
    statistics to floating-point accuracy.  Merging is associative up to
    rounding; an empty side is an error because QuadratureStats cannot
    represent fewer than two samples.
    """
    if a is None or b is None:
        raise ValueError("cannot merge with an empty statistics object")
    na, nb = a.trials, b.trials
    n = na + nb

    def pooled(mean_a, var_a, mean_b, var_b):
        delta = mean_b - mean_a
        mean = mean_a + delta * nb / n
        m2 = var_a * (na - 1) + var_b * (nb - 1) + delta * delta * na * nb / n
        return mean, m2 / (n - 1)

    mean_x, var_x = pooled(a.mean_x, a.var_x, b.mean_x, b.var_x)
    mean_p, var_p = pooled(a.mean_p, a.var_p, b.mean_p, b.var_p)
    se_scale = math.sqrt(2.0 / (n - 1))
    return QuadratureStats(mean_x, mean_p, var_x, var_p,
                           var_x * se_scale, var_p * se_scale, n)
