"""Coherent combining of N beams through a discrete-Fourier-transform coupler.

The combiner maps input amplitudes alpha_j to output ports
beta_k = (1/sqrt(N)) * sum_j alpha_j * exp(-2j*pi*j*k/N}.  Port k=0 carries
the coherent sum; for identical inputs every photon exits there.  Relative
phase errors psi_j scatter light into the remaining ports, and feeding those
ports back through the inverse transform yields per-beam error signals
epsilon_j = alpha_j - mean(alpha), the quantity a lock loop wants to null.

The closed-form predictors describe the combined output for independent
zero-mean Gaussian phase errors of variance phase_var on each beam: the mean
amplitude shrinks by (1 - phase_var/2), the phase quadrature picks up excess
noise n*phase_var, and the amplitude quadrature picks up (n/2)*phase_var^2.
These forms are second order in the phase spread; the Monte Carlo here keeps
the full complex exponential, so at large phase_var the simulation is the
more accurate of the two.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from .coherent import VAR_COH, QuadratureStats, RngStream, estimate_stats, merge_stats

# Phase variance (rad^2) beyond which the quadratic predictors degrade.
SMALL_ANGLE_LIMIT = 0.05

# Target element count per Monte Carlo chunk.  Chunk size is a pure function
# of the per-trial width, so the stream layout (and therefore every sampled
# number) is independent of worker count.
_CHUNK_BUDGET = 1 << 21
_CHUNK_MAX = 1 << 16
_CHUNK_MIN = 1 << 10


class SmallAngleWarning(UserWarning):
    """Raised when a configured phase variance exceeds the quadratic regime."""


def chunk_trials(width: int) -> int:
    """Trials per chunk for ensembles whose trials each need ``width`` draws."""
    return min(_CHUNK_MAX, max(_CHUNK_MIN, _CHUNK_BUDGET // max(1, int(width))))


def sql_phase_variance(n_beams: int, photons: float) -> float:
    """Lowest phase variance resolvable with n photons per beam per correction.

    Equals 1/((N-1)*n): each of the N-1 independent relative phases must
    scatter about one photon into the error ports to be detectable at all.
    """
    if n_beams < 2:
        raise ValueError("need at least two beams for a relative phase")
    if photons <= 0:
        raise ValueError("photon number must be positive")
    return 1.0 / ((n_beams - 1) * photons)


def xi_threshold(n_beams: int) -> float:
    """Phase accuracy factor above which combining is noisier than one amplifier.

    Solves 1 + 4*xi/(N-1) = 2N - 1 for xi, giving (N-1)^2 / 2.  A lock loop
    holding Var(psi) below xi_threshold * sql_phase_variance(N, n) keeps the
    combined beam quieter than a single quantum-limited amplifier of gain N.
    """
    if n_beams < 2:
        raise ValueError("need at least two beams")
    return (n_beams - 1) ** 2 / 2.0


@dataclass(frozen=True)
class CbcConfig:
    """Combining setup: N beams, n photons per beam, and a phase spread.

    The phase spread is given either directly as ``phase_var`` (rad^2) or as
    the accuracy factor ``xi`` in units of the standard quantum limit,
    phase_var = xi / ((N-1)*n).  Exactly one of the two must be supplied;
    both are available as attributes afterwards.
    """

    n_beams: int
    photons: float
    phase_var: float = None
    xi: float = None

    def __post_init__(self):
        if self.n_beams < 2:
            raise ValueError("need at least two beams")
        if self.photons <= 0:
            raise ValueError("photon number must be positive")
        given_var = self.phase_var is not None
        given_xi = self.xi is not None
        if given_var == given_xi:
            raise ValueError("give exactly one of phase_var or xi")
        sql = sql_phase_variance(self.n_beams, self.photons)
        if given_xi:
            if self.xi < 1.0:
                raise ValueError("xi below 1 would beat the quantum limit")
            object.__setattr__(self, "phase_var", self.xi * sql)
        else:
            if self.phase_var < 0.0:
                raise ValueError("phase variance must be nonnegative")
            object.__setattr__(self, "xi", self.phase_var / sql)
        if self.phase_var > SMALL_ANGLE_LIMIT:
            warnings.warn(
                f"phase_var={self.phase_var:.4g} exceeds the small-angle regime "
                f"(> {SMALL_ANGLE_LIMIT}); quadratic predictors lose accuracy",
                SmallAngleWarning,
                stacklevel=2,
            )


@lru_cache(maxsize=64)
def _dft_matrix(n: int) -> np.ndarray:
    j = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def dft(amplitudes) -> np.ndarray:
    """Unitary forward transform of beam amplitudes to combiner ports."""
    a = np.asarray(amplitudes, dtype=complex)
    if a.size == 0:
        raise ValueError("empty input")
    return _dft_matrix(a.shape[-1]) @ a if a.ndim == 1 else a @ _dft_matrix(a.shape[-1]).T


def inverse_dft(amplitudes) -> np.ndarray:
    """Unitary inverse transform, conjugate of ``dft``."""
    a = np.asarray(amplitudes, dtype=complex)
    if a.size == 0:
        raise ValueError("empty input")
    m = np.conj(_dft_matrix(a.shape[-1]))
    return m @ a if a.ndim == 1 else a @ m.T


def combine_port_amplitude(amplitudes) -> complex:
    """Amplitude in the coherent-sum port, (1/sqrt(N)) * sum_j alpha_j."""
    a = np.asarray(amplitudes, dtype=complex)
    if a.size == 0:
        raise ValueError("empty input")
    return complex(a.sum() / np.sqrt(a.size))


def error_signals(amplitudes) -> np.ndarray:
    """Per-beam error amplitudes obtained by nulling the coherent-sum port.

    Transforms forward, zeroes port 0, transforms back.  Algebraically this
    equals alpha_j - mean(alpha), so the signals sum to zero and vanish only
    for identical inputs.
    """
    f = dft(amplitudes)
    f[..., 0] = 0.0
    return inverse_dft(f)


def error_photon_number(phases, photons: float) -> float:
    """Photons diverted from the coherent sum by small phase errors.

    Quadratic form n * sum_j (psi_j - mean(psi))^2, the small-angle limit of
    the exact error-port intensity sum.
    """
    psi = np.asarray(phases, dtype=float)
    if psi.size == 0:
        raise ValueError("empty input")
    d = psi - psi.mean()
    return float(photons * np.dot(d, d))


@dataclass(frozen=True)
class CbcPrediction:
    """Closed-form output noise of the combined beam (absolute units)."""

    mean_amplitude: float
    var_x: float
    var_p: float
    excess_x: float
    excess_p: float

    @property
    def var_x_units(self) -> float:
        return self.var_x / VAR_COH

    @property
    def var_p_units(self) -> float:
        return self.var_p / VAR_COH


def predict_output(config: CbcConfig) -> CbcPrediction:
    """Second-order predictors for the combined output port.

    mean amplitude sqrt(N*n) * (1 - phase_var/2), amplitude-quadrature excess
    (n/2)*phase_var^2, phase-quadrature excess n*phase_var, both on top of
    the coherent-state floor VAR_COH.
    """
    v = config.phase_var
    n = config.photons
    mean_amplitude = math.sqrt(config.n_beams * n) * (1.0 - v / 2.0)
    excess_x = 0.5 * n * v * v
    excess_p = n * v
    return CbcPrediction(
        mean_amplitude=mean_amplitude,
        var_x=VAR_COH + excess_x,
        var_p=VAR_COH + excess_p,
        excess_x=excess_x,
        excess_p=excess_p,
    )


def sample_cbc_outputs(config: CbcConfig, count: int, gen: np.random.Generator) -> np.ndarray:
    """Draw ``count`` combined-port field samples with one generator.

    Per trial: independent Gaussian phase errors on each beam, a fresh vacuum
    fluctuation per beam, then the coherent-sum port of the exact fields
    sqrt(n) * exp(1j*psi_k) + delta_a_k.  Draw order (phases, then vacuum x,
    then vacuum p) is fixed so a given stream always yields the same ensemble.
    """
    n_beams = config.n_beams
    shape = (count, n_beams)
    psi = gen.normal(scale=math.sqrt(config.phase_var), size=shape)
    vac_x = gen.normal(scale=0.5, size=shape)
    vac_p = gen.normal(scale=0.5, size=shape)
    fields = math.sqrt(config.photons) * np.exp(1j * psi) + vac_x + 1j * vac_p
    return fields.sum(axis=1) / math.sqrt(n_beams)


def _chunk_counts(trials: int, width: int):
    size = chunk_trials(width)
    counts = [size] * (trials // size)
    if trials % size:
        counts.append(trials % size)
    return counts


def simulate_cbc(config: CbcConfig, trials: int, rng: RngStream) -> QuadratureStats:
    """Monte Carlo ensemble of the combined output port.

    Runs in fixed-size chunks, one substream per chunk, merged in chunk
    order, so the result is bit-identical for any degree of parallelism
    that respects the chunk layout.
    """
    if trials < 2:
        raise ValueError("need at least 2 trials")
    stats = None
    for idx, count in enumerate(_chunk_counts(trials, config.n_beams)):
        gen = rng.substream(idx).generator()
        chunk = estimate_stats(sample_cbc_outputs(config, count, gen))
        stats = chunk if stats is None else merge_stats(stats, chunk)
    return stats


def gamma_sum_statistics(n_terms: int, phase_var: float, trials: int, rng: RngStream):
    """Sample mean and unbiased variance of sum(psi_k^2) over k = 1..N.

    For independent zero-mean Gaussian phases the sum is gamma distributed
    with shape N/2 and scale 2*phase_var, so the mean is N*phase_var and the
    variance 2*N*phase_var^2.  Returns (mean, variance).
    """
    if n_terms < 1:
        raise ValueError("need at least one term")
    if phase_var <= 0:
        raise ValueError("phase variance must be positive")
    if trials < 2:
        raise ValueError("need at least 2 trials")
    sigma = math.sqrt(phase_var)
    total = 0.0
    m2 = 0.0
    mean = 0.0
    seen = 0
    for idx, count in enumerate(_chunk_counts(trials, n_terms)):
        gen = rng.substream(idx).generator()
        psi = gen.normal(scale=sigma, size=(count, n_terms))
        s = np.einsum("ij,ij->i", psi, psi)
        c_mean = float(s.mean())
        c_m2 = float(((s - c_mean) ** 2).sum())
        delta = c_mean - mean
        total = seen + count
        mean += delta * count / total
        m2 += c_m2 + delta * delta * seen * count / total
        seen = int(total)
    return mean, m2 / (seen - 1)
