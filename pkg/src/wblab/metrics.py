"""Scalar waveform descriptors and the delay/Doppler Cramer-Rao bounds.

All second moments carry the 4 pi^2 factor, so ``beta_rms_sq`` is in rad^2/s^2,
``tau_rms_sq`` in rad^2 s^2 and ``gamma`` in rad^2.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np
from scipy.integrate import simpson

from .gbf import gbf_coefficients
from .mtsfm import (
    FourierModulation,
    LinearModulation,
    Modulation,
    SampledWaveform,
    WaveformParams,
    sweep_center,
    synthesize,
    synthesize_lfm,
)
from .spectrum import Spectrum, lfm_spectrum, spectral_centroid, spectrum_closed_form, uniform_grid

Coupling = Literal["printed", "squared"]

FOUR_PI_SQ = 4 * math.pi**2


@dataclass(frozen=True)
class WaveformMetrics:
    beta_rms_sq: float
    tau_rms_sq: float
    gamma: float
    q: float
    tbp: float
    f0: float
    t0: float

    def __post_init__(self):
        if self.beta_rms_sq < 0 or self.tau_rms_sq < 0:
            raise ValueError("RMS bandwidth and pulse length must be non-negative")

    def determinant(self, coupling: Coupling = "printed") -> float:
        g = self.gamma if coupling == "printed" else self.gamma**2
        return self.beta_rms_sq * self.tau_rms_sq - g

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class CrlbInputs:
    snr: float

    def __post_init__(self):
        if not self.snr > 0:
            raise ValueError("snr must be positive")


def rms_bandwidth_sq(spec: Spectrum) -> float:
    """4 pi^2 times the power-weighted variance of frequency about the centroid."""
    p = spec.psd
    total = p.sum()
    if not total > 0:
        raise ValueError("zero-energy spectrum")
    f0 = spectral_centroid(spec)
    return FOUR_PI_SQ * float(np.sum((spec.f - f0) ** 2 * p) / total)


def time_centroid(w: SampledWaveform) -> float:
    p = np.abs(w.samples) ** 2
    return float(np.sum(w.times * p) / np.sum(p))


def rms_pulselength_sq(w: SampledWaveform) -> float:
    """4 pi^2 sum (t_n - t0)^2 |s_n|^2 / fs for a unit-energy waveform."""
    p = np.abs(w.samples) ** 2
    t0 = time_centroid(w)
    return FOUR_PI_SQ * float(np.sum((w.times - t0) ** 2 * p) / w.fs)


def rdcf(mod: Modulation, w: SampledWaveform) -> float:
    """Range-Doppler coupling factor -4 pi^2 int t m(t) |s(t)|^2 dt.

    The envelope is the ideal rectangle (|s|^2 = 1/T) and the integral is a
    composite Simpson rule on the synthesis grid closed at +T/2.
    """
    T = mod.T
    t = np.linspace(-T / 2, T / 2, w.n + 1)
    return -FOUR_PI_SQ * float(simpson(t * np.asarray(mod.frequency(t)) / T, x=t))


def crlb_delay_doppler(m: WaveformMetrics, inputs: CrlbInputs, coupling: Coupling = "printed") -> tuple[float, float]:
    """Lower bounds on delay (s^2) and Doppler variance.

    ``printed`` subtracts gamma itself from beta^2 tau^2; the usual Fisher
    matrix inverse subtracts gamma^2, selected with ``coupling="squared"``.
    """
    if coupling not in ("printed", "squared"):
        raise ValueError(f"unknown coupling {coupling!r}")
    det = m.determinant(coupling)
    if not det > 0:
        raise ValueError(f"singular delay-Doppler information (determinant {det:.3g}): perfectly coupled design")
    scale = (1 + inputs.snr) / inputs.snr**2
    return scale * m.tau_rms_sq / det, scale * m.beta_rms_sq / det


def default_metric_grid(mod: Modulation, params: WaveformParams, oversample: int = 16) -> np.ndarray:
    """Frequency grid across the sweep centre +- delta_f at spacing 1/(oversample T)."""
    center = params.fc + sweep_center(mod)
    n = int(round(2 * params.delta_f * params.T * oversample)) + 1
    return uniform_grid(center, params.delta_f, n)


def waveform_metrics(mod: Modulation, params: WaveformParams, w: SampledWaveform | None = None,
                     spec: Spectrum | None = None) -> WaveformMetrics:
    """All descriptors for one design.

    The RMS bandwidth of a rectangular pulse diverges with the integration
    band, so unless ``spec`` is given it is taken over the sweep centre
    +- delta_f.
    """
    linear = isinstance(mod, LinearModulation)
    if w is None:
        w = synthesize_lfm(params) if linear else synthesize(mod, params)
    if spec is None:
        grid = default_metric_grid(mod, params)
        if linear:
            spec = lfm_spectrum(params, grid)
        elif isinstance(mod, FourierModulation):
            spec = spectrum_closed_form(gbf_coefficients(mod), params, grid, allow_partial=True)
        else:
            raise TypeError("pass spec explicitly for this modulation type")
    return WaveformMetrics(
        beta_rms_sq=rms_bandwidth_sq(spec),
        tau_rms_sq=rms_pulselength_sq(w),
        gamma=rdcf(mod, w),
        q=params.q,
        tbp=params.tbp,
        f0=spectral_centroid(spec),
        t0=time_centroid(w),
    )
