"""Linear amplifier models and their quantum noise bookkeeping.

A phase-insensitive amplifier of intensity gain G = g^2 cannot avoid coupling
to an idler mode: the output field is g*a + sqrt(g^2-1)*conj(b) with b a
vacuum ancilla.  Each output quadrature then carries (2G-1) vacuum units of
noise, which approaches the familiar factor-of-two (3 dB) penalty at high
gain.  A measure-and-prepare chain pays twice, once for the simultaneous
two-quadrature measurement and once for re-preparation, giving (2G+1) units.
A phase-sensitive amplifier rescales the two quadratures by G and 1/G and
adds nothing.

Noise budgets here split a variance into a quantum floor, which is exactly
one vacuum unit for any field built on coherent states, and classical excess
in the same units.  Amplification keeps the floor at one unit and moves
everything it adds, plus the amplified input excess, into the classical
part: 1 unit in, (1 + 2*(G-1)) out, and G times any excess on top.  Folding
stages of a cascade therefore reproduces the single-amplifier law for the
total gain, so splitting a gain into stages buys nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherent import (
    VAR_COH,
    QuadratureStats,
    RngStream,
    as_generator,
    estimate_stats,
    merge_stats,
)
from .combining import _chunk_counts

KINDS = ("quantum_limited", "measure_prepare", "phase_sensitive")


@dataclass(frozen=True)
class AmplifierSpec:
    """Amplifier description: amplitude gain g, model kind, classical excess.

    ``gain`` is the intensity gain G = g^2.  ``n_cl`` adds classical noise of
    2*G*n_cl vacuum units at the output (zero for an ideal device).
    """

    g: float
    kind: str = "quantum_limited"
    n_cl: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown amplifier kind {self.kind!r}")
        if self.kind == "phase_sensitive":
            if self.g <= 0:
                raise ValueError("phase-sensitive gain must be positive")
        elif self.g < 1.0:
            raise ValueError("phase-insensitive amplifiers need g >= 1")
        if self.n_cl < 0:
            raise ValueError("classical excess must be nonnegative")

    @property
    def gain(self) -> float:
        return self.g * self.g


@dataclass(frozen=True)
class NoiseBudget:
    """Per-quadrature variance split into vacuum units.

    ``quantum_units`` is the Heisenberg floor (1 for any coherent-state
    field), ``classical_units`` everything above it.
    """

    quantum_units: float
    classical_units: float = 0.0

    def __post_init__(self):
        if self.quantum_units <= 0:
            raise ValueError("quantum part must be positive")
        if self.classical_units < 0:
            raise ValueError("classical part must be nonnegative")

    @property
    def total_units(self) -> float:
        return self.quantum_units + self.classical_units

    @property
    def total_variance(self) -> float:
        return self.total_units * VAR_COH


def amplify_sample(field, spec: AmplifierSpec, rng, size=None):
    """Push field samples through one amplifier stage.

    quantum_limited: g*a + sqrt(g^2-1)*conj(v) with a fresh vacuum sample v.
    measure_prepare: simultaneous two-quadrature measurement (one extra
    vacuum unit), classical gain g on the record, re-preparation (one more
    unit).  phase_sensitive: x scaled by g, p by 1/g, nothing added.
    Vacuum draws happen in a fixed order even when their weight is zero, so
    the stream position does not depend on the gain value.
    """
    gen = as_generator(rng)
    a = np.asarray(field, dtype=complex) if size is None else np.broadcast_to(
        np.asarray(field, dtype=complex), size if isinstance(size, tuple) else (size,))
    shape = a.shape
    g = spec.g
    if spec.kind == "phase_sensitive":
        out = g * a.real + 1j * a.imag / g
    elif spec.kind == "quantum_limited":
        vx = gen.normal(scale=0.5, size=shape)
        vp = gen.normal(scale=0.5, size=shape)
        out = g * a + math.sqrt(g * g - 1.0) * (vx - 1j * vp)
    else:  # measure_prepare
        mx = gen.normal(scale=0.5, size=shape)
        mp = gen.normal(scale=0.5, size=shape)
        record = a + mx + 1j * mp
        vx = gen.normal(scale=0.5, size=shape)
        vp = gen.normal(scale=0.5, size=shape)
        out = g * record + vx + 1j * vp
    if spec.n_cl > 0:
        # classical excess worth 2*G*n_cl vacuum units, split over quadratures
        sigma = math.sqrt(2.0 * spec.gain * spec.n_cl * VAR_COH)
        out = out + gen.normal(scale=sigma, size=shape) + 1j * gen.normal(scale=sigma, size=shape)
    if np.ndim(out) == 0:
        return complex(out)
    return out


def predict_variance(spec: AmplifierSpec, budget: NoiseBudget) -> NoiseBudget:
    """Transform a noise budget through one amplifier stage.

    The quantum floor stays at one unit; added noise and the amplified input
    excess land in the classical part.  For the phase-sensitive case the
    returned budget describes the amplified quadrature, both parts scaled
    by G.
    """
    if budget.quantum_units < 1.0:
        raise ValueError("input below the Heisenberg floor is unphysical here")
    big_g = spec.gain
    if spec.kind == "phase_sensitive":
        return NoiseBudget(big_g * budget.quantum_units, big_g * budget.classical_units)
    if spec.kind == "quantum_limited":
        classical = big_g * budget.classical_units + 2.0 * (big_g - 1.0)
    else:  # measure_prepare
        classical = big_g * (2.0 + budget.classical_units)
    classical += 2.0 * big_g * spec.n_cl
    return NoiseBudget(1.0, classical)


def cascade(specs, budget: NoiseBudget) -> NoiseBudget:
    """Fold a chain of quantum-limited stages over an input budget.

    An empty chain returns the input unchanged.  For a pure input the result
    depends only on the total gain: any split of G into stages lands on
    (1 + 2*(G-1)) total units.
    """
    out = budget
    for spec in specs:
        if spec.kind != "quantum_limited":
            raise ValueError("cascade folding covers quantum-limited stages only")
        out = predict_variance(spec, out)
    return out


def amplify_classical_input(spec: AmplifierSpec, input_var: float, trials: int,
                            rng: RngStream, mean=0.0) -> QuadratureStats:
    """Monte Carlo of one stage driven by a classically noisy input.

    The input has per-quadrature variance ``input_var`` (at least the
    coherent floor VAR_COH).  The interesting ratio is measured output
    variance over G*input_var: it tends to one as the input noise swamps
    the amplifier's own contribution, which is why the quantum penalty only
    bites for clean inputs.
    """
    if input_var < VAR_COH:
        raise ValueError("input variance below the coherent floor is unphysical")
    if trials < 2:
        raise ValueError("need at least 2 trials")
    sigma_in = math.sqrt(input_var)
    stats = None
    for idx, count in enumerate(_chunk_counts(trials, 1)):
        gen = rng.substream(idx).generator()
        inputs = (mean
                  + gen.normal(scale=sigma_in, size=count)
                  + 1j * gen.normal(scale=sigma_in, size=count))
        chunk = estimate_stats(amplify_sample(inputs, spec, gen))
        stats = chunk if stats is None else merge_stats(stats, chunk)
    return stats


def simulate_amplifier(spec: AmplifierSpec, trials: int, rng: RngStream,
                       mean=1.0) -> QuadratureStats:
    """Monte Carlo of one stage driven by an ideal coherent input."""
    if trials < 2:
        raise ValueError("need at least 2 trials")
    stats = None
    for idx, count in enumerate(_chunk_counts(trials, 1)):
        gen = rng.substream(idx).generator()
        inputs = (mean
                  + gen.normal(scale=0.5, size=count)
                  + 1j * gen.normal(scale=0.5, size=count))
        chunk = estimate_stats(amplify_sample(inputs, spec, gen))
        stats = chunk if stats is None else merge_stats(stats, chunk)
    return stats


def simulate_cascade(total_gain: float, stages: int, trials: int, rng: RngStream,
                     mean=1.0) -> QuadratureStats:
    """Monte Carlo of a chain of equal quantum-limited stages.

    Each stage has intensity gain total_gain**(1/stages); the measured output
    variance should match the single-stage law for the total gain.
    """
    if stages < 1:
        raise ValueError("need at least one stage")
    if trials < 2:
        raise ValueError("need at least 2 trials")
    g_stage = total_gain ** (1.0 / (2.0 * stages))
    spec = AmplifierSpec(g=g_stage)
    stats = None
    for idx, count in enumerate(_chunk_counts(trials, stages)):
        gen = rng.substream(idx).generator()
        fields = (mean
                  + gen.normal(scale=0.5, size=count)
                  + 1j * gen.normal(scale=0.5, size=count))
        for _ in range(stages):
            fields = amplify_sample(fields, spec, gen)
        chunk = estimate_stats(fields)
        stats = chunk if stats is None else merge_stats(stats, chunk)
    return stats
