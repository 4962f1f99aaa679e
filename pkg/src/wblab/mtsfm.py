"""MTSFM waveform synthesis.

A Multi-Tone Sinusoidal FM waveform has an instantaneous frequency given by a
finite Fourier series over the pulse,

    m(t) = a0/2 + sum_k a_k cos(2 pi k t / T) + b_k sin(2 pi k t / T),

and phase

    phi(t) = pi a0 t + sum_k alpha_k sin(2 pi k t / T) - beta_k cos(2 pi k t / T)

with modulation indices alpha_k = a_k T / k and beta_k = b_k T / k.
The LFM chirp and the CW tone are provided as reference waveforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Protocol

import numpy as np
from scipy.optimize import minimize_scalar

Representation = Literal["baseband", "carrier"]
Symmetry = Literal["even", "odd", "mixed"]

# Slack on the |t| <= T/2 domain check, so grids built as -T/2 + n/fs pass.
_DOMAIN_SLACK = 1e-12


class Modulation(Protocol):
    """Anything that can report instantaneous frequency and phase over [-T/2, T/2]."""

    T: float

    def frequency(self, t) -> np.ndarray: ...

    def phase(self, t) -> np.ndarray: ...


def _check_domain(t, T: float) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > T / 2 * (1 + _DOMAIN_SLACK) + _DOMAIN_SLACK):
        raise ValueError(f"time outside pulse support [-{T / 2}, {T / 2}]")
    return t


@dataclass(frozen=True)
class FourierModulation:
    """MTSFM coefficient set. Coefficients in Hz, duration ``T`` in seconds."""

    a0: float
    a: tuple[float, ...]
    b: tuple[float, ...]
    T: float

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        b = tuple(float(v) for v in self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "T", float(self.T))
        if len(a) != len(b) or len(a) < 1:
            raise ValueError("a and b must have the same length K >= 1")
        if not self.T > 0:
            raise ValueError("T must be positive")
        if not all(math.isfinite(v) for v in (self.a0, self.T, *a, *b)):
            raise ValueError("coefficients must be finite")

    @classmethod
    def zeros(cls, K: int = 1, T: float = 1.0) -> "FourierModulation":
        return cls(0.0, (0.0,) * K, (0.0,) * K, T)

    @property
    def K(self) -> int:
        return len(self.a)

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(1, self.K + 1)

    @property
    def alpha(self) -> np.ndarray:
        return np.asarray(self.a) * self.T / self.harmonics

    @property
    def beta(self) -> np.ndarray:
        return np.asarray(self.b) * self.T / self.harmonics

    def with_a0(self, a0: float) -> "FourierModulation":
        return FourierModulation(a0, self.a, self.b, self.T)

    def scaled(self, factor: float) -> "FourierModulation":
        """Scale the harmonic amplitudes (not a0)."""
        return FourierModulation(
            self.a0,
            tuple(factor * v for v in self.a),
            tuple(factor * v for v in self.b),
            self.T,
        )

    def frequency(self, t) -> np.ndarray:
        t = _check_domain(t, self.T)
        arg = 2 * np.pi * np.multiply.outer(t, self.harmonics) / self.T
        return self.a0 / 2 + np.cos(arg) @ np.asarray(self.a) + np.sin(arg) @ np.asarray(self.b)

    def oscillating_phase(self, t) -> np.ndarray:
        """Periodic part of the phase (everything except ``pi a0 t``)."""
        t = _check_domain(t, self.T)
        arg = 2 * np.pi * np.multiply.outer(t, self.harmonics) / self.T
        return np.sin(arg) @ self.alpha - np.cos(arg) @ self.beta

    def phase(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.pi * self.a0 * t + self.oscillating_phase(t)

    def to_dict(self) -> dict:
        return {"a0": self.a0, "a": list(self.a), "b": list(self.b), "T": self.T}


@dataclass(frozen=True)
class LinearModulation:
    """LFM sweep of total width ``delta_f`` across the pulse, centred on 0 Hz."""

    delta_f: float
    T: float

    def frequency(self, t) -> np.ndarray:
        t = _check_domain(t, self.T)
        return self.delta_f * t / self.T

    def phase(self, t) -> np.ndarray:
        t = _check_domain(t, self.T)
        return np.pi * self.delta_f * t**2 / self.T


def modulation_function(mod: Modulation, t) -> np.ndarray:
    """Instantaneous frequency offset from the carrier (Hz)."""
    return mod.frequency(t)


def phase_function(mod: Modulation, t) -> np.ndarray:
    """Phase modulation (rad); its time derivative over 2 pi is ``modulation_function``."""
    return mod.phase(t)


@dataclass(frozen=True)
class WaveformParams:
    """Carrier ``fc``, swept bandwidth ``delta_f`` (Hz), duration ``T`` (s), sample rate ``fs`` (Hz)."""

    fc: float
    delta_f: float
    T: float
    fs: float

    def __post_init__(self):
        if not self.delta_f > 0:
            raise ValueError("delta_f must be positive")
        if not self.fc > 0:
            raise ValueError("fc must be positive")
        if not (self.T > 0 and self.fs > 0):
            raise ValueError("T and fs must be positive")

    @classmethod
    def from_q_tbp(cls, q: float, tbp: float, T: float = 1.0, fs: float | None = None) -> "WaveformParams":
        """Desk-scale parameters: ``delta_f = tbp / T``, ``fc = q * delta_f``, ``fs = 16 delta_f``."""
        delta_f = tbp / T
        return cls(fc=q * delta_f, delta_f=delta_f, T=T, fs=16 * delta_f if fs is None else fs)

    @property
    def q(self) -> float:
        return self.fc / self.delta_f

    @property
    def tbp(self) -> float:
        return self.T * self.delta_f

    @property
    def n_samples(self) -> int:
        return int(round(self.T * self.fs))

    def with_fs(self, fs: float) -> "WaveformParams":
        return WaveformParams(self.fc, self.delta_f, self.T, fs)

    def carrier_fs(self) -> float:
        """Smallest sample rate accepted for at-carrier synthesis."""
        return 4.0 * (self.fc + self.delta_f)


@dataclass(frozen=True, eq=False)
class SampledWaveform:
    samples: np.ndarray
    fs: float
    fc: float
    t0_offset: float
    representation: Representation = "baseband"
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return self.n / self.fs

    @property
    def times(self) -> np.ndarray:
        return self.t0_offset + np.arange(self.n) / self.fs

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) / self.fs)

    @property
    def baseband_fc(self) -> float:
        """Absolute frequency that maps to 0 Hz in the sampled representation."""
        return self.fc if self.representation == "baseband" else 0.0

    def normalized(self) -> "SampledWaveform":
        return self.replace(self.samples / math.sqrt(self.energy))

    def replace(self, samples: np.ndarray, **meta) -> "SampledWaveform":
        return SampledWaveform(
            np.asarray(samples, dtype=complex),
            self.fs,
            self.fc,
            self.t0_offset,
            self.representation,
            {**self.meta, **meta},
        )

    def to_baseband(self) -> "SampledWaveform":
        if self.representation == "baseband":
            return self
        shifted = self.samples * np.exp(-2j * np.pi * self.fc * self.times)
        return SampledWaveform(shifted, self.fs, self.fc, self.t0_offset, "baseband", dict(self.meta))


def _time_grid(T: float, fs: float) -> np.ndarray:
    n = int(round(T * fs))
    return -T / 2 + np.arange(n) / fs


def _from_phase(phase: np.ndarray, params: WaveformParams, representation: Representation, t: np.ndarray, meta) -> SampledWaveform:
    if representation == "carrier":
        phase = phase + 2 * np.pi * params.fc * t
    elif representation != "baseband":
        raise ValueError(f"unknown representation {representation!r}")
    samples = np.exp(1j * phase) / math.sqrt(params.T)
    samples *= math.sqrt(params.fs * params.T / len(samples))
    return SampledWaveform(samples, params.fs, params.fc, float(t[0]), representation, meta)


def _check_rate(peak_offset: float, params: WaveformParams, representation: Representation) -> None:
    if representation == "carrier":
        need = max(params.carrier_fs(), 4.0 * (params.fc + peak_offset))
        if params.fs < need:
            raise ValueError(f"sample rate {params.fs} Hz below {need} Hz needed at carrier")
    elif params.fs <= 2.0 * peak_offset:
        raise ValueError(
            f"sample rate {params.fs} Hz aliases a baseband excursion of {peak_offset} Hz; "
            f"need fs > {2.0 * peak_offset}"
        )


def synthesize(mod: FourierModulation, params: WaveformParams, representation: Representation = "baseband") -> SampledWaveform:
    """Sample a unit-energy, constant-envelope MTSFM on ``t_n = -T/2 + n/fs``."""
    if not math.isclose(mod.T, params.T, rel_tol=1e-12):
        raise ValueError(f"modulation duration {mod.T} does not match params.T {params.T}")
    _check_rate(peak_abs_frequency(mod), params, representation)
    t = _time_grid(params.T, params.fs)
    meta = {"kind": "mtsfm", **mod.to_dict()}
    return _from_phase(mod.phase(t), params, representation, t, meta)


def synthesize_lfm(params: WaveformParams, representation: Representation = "baseband") -> SampledWaveform:
    """Linear chirp from ``fc - delta_f/2`` to ``fc + delta_f/2``."""
    _check_rate(params.delta_f / 2, params, representation)
    mod = LinearModulation(params.delta_f, params.T)
    t = _time_grid(params.T, params.fs)
    return _from_phase(mod.phase(t), params, representation, t, {"kind": "lfm"})


def synthesize_cw(params: WaveformParams, representation: Representation = "baseband") -> SampledWaveform:
    _check_rate(0.0, params, representation)
    t = _time_grid(params.T, params.fs)
    return _from_phase(np.zeros_like(t), params, representation, t, {"kind": "cw"})


def _dense_grid(mod: FourierModulation, oversample: int) -> np.ndarray:
    n = oversample * 32 * mod.K + 1
    return np.linspace(-mod.T / 2, mod.T / 2, n)


def _refined_peak(f, t: np.ndarray, T: float) -> float:
    """max of ``f`` from a dense grid, polished by a bounded 1-D search around the best node."""
    vals = f(t)
    i = int(np.argmax(vals))
    h = t[1] - t[0]
    lo, hi = max(t[i] - h, -T / 2), min(t[i] + h, T / 2)
    res = minimize_scalar(lambda x: -float(f(np.array([x]))[0]), bounds=(lo, hi), method="bounded",
                          options={"xatol": T * 1e-12})
    return max(float(vals[i]), -float(res.fun))


def sweep_band(mod: Modulation, oversample: int = 16) -> tuple[float, float]:
    """(min, max) of the instantaneous frequency offset m(t) over the pulse (Hz)."""
    if isinstance(mod, LinearModulation):
        return -mod.delta_f / 2, mod.delta_f / 2
    t = _dense_grid(mod, oversample)
    hi = _refined_peak(mod.frequency, t, mod.T)
    lo = -_refined_peak(lambda x: -mod.frequency(x), t, mod.T)
    return lo, hi


def sweep_center(mod: Modulation) -> float:
    lo, hi = sweep_band(mod)
    return 0.5 * (lo + hi)


def peak_abs_frequency(mod: Modulation, oversample: int = 16) -> float:
    lo, hi = sweep_band(mod, oversample)
    return max(abs(lo), abs(hi))


def random_mtsfm(K: int, symmetry: Symmetry, target_delta_f: float, T: float, seed: int) -> FourierModulation:
    """Random MTSFM sweeping exactly ``-target_delta_f/2 .. +target_delta_f/2`` about the carrier.

    Harmonic amplitudes are drawn i.i.d. uniform(-1, 1) / k. ``even`` keeps only
    cosine terms, ``odd`` only sine terms, ``mixed`` both. The harmonics are
    scaled to a peak-to-peak excursion of ``target_delta_f`` and a0 takes up
    whatever offset centres that excursion on 0 Hz, which is always zero for
    odd symmetry.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if not target_delta_f > 0:
        raise ValueError("target_delta_f must be positive")
    if symmetry not in ("even", "odd", "mixed"):
        raise ValueError(f"unknown symmetry {symmetry!r}")

    k = np.arange(1, K + 1)
    sub = 0
    while True:
        rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, sub])
        a = rng.uniform(-1.0, 1.0, K) / k
        b = rng.uniform(-1.0, 1.0, K) / k
        if symmetry == "even":
            b[:] = 0.0
        elif symmetry == "odd":
            a[:] = 0.0
        if np.any(a != 0.0) or np.any(b != 0.0):
            break
        sub += 1

    mod = FourierModulation(0.0, tuple(a), tuple(b), T)
    lo, hi = sweep_band(mod)
    mod = mod.scaled(target_delta_f / (hi - lo))
    a0 = 0.0 if symmetry == "odd" else -(hi + lo) * target_delta_f / (hi - lo)
    return mod.with_a0(a0)
