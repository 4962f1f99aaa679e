"""Waveform spectra: closed form from GBF coefficients, LFM via Fresnel integrals, and DFT."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import fresnel

from .gbf import GbfCoefficients
from .mtsfm import SampledWaveform, WaveformParams

_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Complex spectrum on a uniform absolute-frequency grid ``f`` (Hz)."""

    f: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        if f.ndim != 1 or len(f) < 2 or len(f) != len(self.S):
            raise ValueError("f and S must be 1-D of equal length >= 2")
        step = np.diff(f)
        if np.any(step <= 0) or np.ptp(step) > 1e-6 * step.mean():
            raise ValueError("frequency grid must be uniform and increasing")

    @property
    def df(self) -> float:
        return float((self.f[-1] - self.f[0]) / (len(self.f) - 1))

    @property
    def psd(self) -> np.ndarray:
        return np.abs(self.S) ** 2

    def energy(self) -> float:
        """Riemann sum of |S|^2 df (exact Parseval on DFT grids)."""
        return float(np.sum(self.psd) * self.df)

    def band(self, lo: float, hi: float) -> "Spectrum":
        keep = (self.f >= lo) & (self.f <= hi)
        if keep.sum() < 2:
            raise ValueError(f"band [{lo}, {hi}] Hz holds fewer than two grid points")
        return Spectrum(self.f[keep], self.S[keep])

    def scaled(self, factor: complex) -> "Spectrum":
        return Spectrum(self.f, self.S * factor)

    def shifted(self, delta: float) -> "Spectrum":
        return Spectrum(self.f + delta, self.S)


def uniform_grid(center: float, half_width: float, n: int) -> np.ndarray:
    return center + np.linspace(-half_width, half_width, n)


def spectrum_closed_form(gbf: GbfCoefficients, params: WaveformParams, f_grid, allow_partial: bool = False) -> Spectrum:
    """Evaluate S(f) = sqrt(T) sum_m c_m sinc[pi T (f - fc - a0/2 - m/T)].

    The grid must span the coefficient support ``fc + a0/2 +- M/T`` unless
    ``allow_partial`` is set (band-limited evaluation for the echo model).
    """
    f = np.asarray(f_grid, dtype=float)
    T = gbf.T
    ref = params.fc + gbf.a0 / 2
    if not allow_partial:
        lo, hi = ref - gbf.M / T, ref + gbf.M / T
        tol = 1e-9 * max(abs(lo), abs(hi), 1.0)
        if f.min() > lo + tol or f.max() < hi - tol:
            raise ValueError(
                f"grid [{f.min()}, {f.max()}] Hz does not cover coefficient support [{lo}, {hi}] Hz"
            )

    keep = np.abs(gbf.c) > 0
    lines = gbf.orders[keep] / T
    c = gbf.c[keep]
    S = np.empty(len(f), dtype=complex)
    for i in range(0, len(f), _CHUNK):
        x = T * (f[i : i + _CHUNK, None] - ref - lines[None, :])
        S[i : i + _CHUNK] = np.sinc(x) @ c
    return Spectrum(f, math.sqrt(T) * S)


def lfm_spectrum(params: WaveformParams, f_grid) -> Spectrum:
    """Exact Fourier transform of the unit-energy LFM pulse via Fresnel integrals."""
    f = np.asarray(f_grid, dtype=float)
    T, rate = params.T, params.delta_f / params.T
    x0 = (f - params.fc) / rate
    scale = math.sqrt(2 * rate)
    s1, c1 = fresnel(scale * (-T / 2 - x0))
    s2, c2 = fresnel(scale * (T / 2 - x0))
    S = np.exp(-1j * np.pi * rate * x0**2) * ((c2 - c1) + 1j * (s2 - s1)) / (scale * math.sqrt(T))
    return Spectrum(f, S)


def cw_spectrum(params: WaveformParams, f_grid) -> Spectrum:
    f = np.asarray(f_grid, dtype=float)
    return Spectrum(f, math.sqrt(params.T) * np.sinc(params.T * (f - params.fc)) + 0j)


def spectrum_fft(w: SampledWaveform, zero_pad_factor: int = 1) -> Spectrum:
    """DFT spectrum scaled to approximate the continuous Fourier transform.

    Grid spacing is ``fs / (N * zero_pad_factor)``; the phase is referenced to
    t = 0 and frequencies are absolute (baseband samples are offset by ``fc``).
    """
    if zero_pad_factor < 1:
        raise ValueError("zero_pad_factor must be >= 1")
    nfft = w.n * int(zero_pad_factor)
    X = np.fft.fftshift(np.fft.fft(w.samples, nfft)) / w.fs
    f_rel = np.fft.fftshift(np.fft.fftfreq(nfft, d=1.0 / w.fs))
    X *= np.exp(-2j * np.pi * f_rel * w.t0_offset)
    return Spectrum(f_rel + w.baseband_fc, X)


def spectral_centroid(spec: Spectrum) -> float:
    """Power-weighted mean frequency (Hz) over the spectrum's grid."""
    p = spec.psd
    total = p.sum()
    if not total > 0:
        raise ValueError("zero-energy spectrum")
    return float(np.sum(spec.f * p) / total)
