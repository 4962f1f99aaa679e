"""Continuous line source projector and the linear echo model it induces."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mtsfm import SampledWaveform
from .spectrum import Spectrum

SOUND_SPEED = 1500.0

# Below this |u| the sinc and its derivative use their Taylor series.
_SMALL_U = 1e-4


@dataclass(frozen=True)
class LineSource:
    """Uniform continuous line aperture of length ``L`` (m) in a medium with speed ``c`` (m/s)."""

    L: float
    c: float = SOUND_SPEED

    def __post_init__(self):
        if not (self.L > 0 and self.c > 0):
            raise ValueError("L and c must be positive")

    @classmethod
    def wavelengths(cls, n: float, fc: float, c: float = SOUND_SPEED) -> "LineSource":
        """Aperture ``n`` wavelengths long at frequency ``fc``."""
        return cls(n * c / fc, c)

    def first_null(self, f: float) -> float:
        """Bearing (rad) of the first beampattern null at frequency ``f``; nan if none."""
        s = self.c / (f * self.L)
        return math.asin(s) if s <= 1 else math.nan


def _u(ls: LineSource, f, theta):
    return np.pi * np.asarray(f, dtype=float) * ls.L * np.sin(theta) / ls.c


def beampattern(ls: LineSource, f, theta) -> np.ndarray:
    """b(f, theta) = sin(u)/u with u = (pi f L / c) sin(theta); broadcasts over f and theta."""
    return np.sinc(_u(ls, f, theta) / np.pi)


def beampattern_dtheta(ls: LineSource, f, theta) -> np.ndarray:
    """Analytic d b / d theta."""
    return beampattern_and_slope(ls, f, theta)[1]


def beampattern_and_slope(ls: LineSource, f, theta) -> tuple[np.ndarray, np.ndarray]:
    """``(b, db/dtheta)`` sharing one sin/cos evaluation."""
    f = np.asarray(f, dtype=float)
    theta = np.asarray(theta, dtype=float)
    k = np.pi * f * ls.L / ls.c
    u = k * np.sin(theta)
    small = np.abs(u) < _SMALL_U
    safe = np.where(small, 1.0, u)
    sin_u, cos_u = np.sin(safe), np.cos(safe)
    b = np.where(small, 1 - u**2 / 6, sin_u / safe)
    dsinc = np.where(small, -u / 3 + u**3 / 30, (safe * cos_u - sin_u) / safe**2)
    return b, dsinc * k * np.cos(theta)


def _check_bearing(theta: float) -> None:
    if abs(theta) > np.pi / 2:
        raise ValueError(f"bearing {theta} rad outside [-pi/2, pi/2]")


def filter_waveform(w: SampledWaveform, ls: LineSource, theta: float, renormalize: bool = False) -> SampledWaveform:
    """Apply the beampattern at bearing ``theta`` as a spectral filter.

    The line source's impulse response lasts ``L sin(theta) / c``; the pulse is
    zero-padded by that much on each side so the DFT product is a linear
    convolution. Energy loss is kept unless ``renormalize`` is set.
    """
    _check_bearing(theta)
    spread = ls.L * abs(math.sin(theta)) / ls.c
    pad = int(math.ceil(spread * w.fs)) + 1 if spread > 0 else 0
    x = np.concatenate([np.zeros(pad), w.samples, np.zeros(pad)]) if pad else w.samples
    X = np.fft.fft(x)
    f_abs = np.fft.fftfreq(len(x), d=1.0 / w.fs) + w.baseband_fc
    y = np.fft.ifft(X * beampattern(ls, f_abs, theta))
    out = SampledWaveform(y, w.fs, w.fc, w.t0_offset - pad / w.fs, w.representation,
                          {**w.meta, "filtered_theta": theta, "aperture_m": ls.L})
    return out.normalized() if renormalize else out


@dataclass(frozen=True, eq=False)
class EchoModel:
    """y = a h + w with h_i = S_i b(f_i, theta)."""

    freqs: np.ndarray
    S: np.ndarray
    h: np.ndarray
    theta: float
    a: float = 1.0
    sigma2: float = 1.0
    b: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not len(self.freqs) == len(self.S) == len(self.h):
            raise ValueError("freqs, S and h must have equal length")
        if np.any(np.diff(self.freqs) <= 0):
            raise ValueError("freqs must be strictly increasing")

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """One noisy observation (circular complex Gaussian noise); demo use only."""
        n = len(self.h)
        noise = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * math.sqrt(self.sigma2 / 2)
        return self.a * self.h + noise


def build_echo_model(spec: Spectrum, ls: LineSource, theta: float,
                     band: tuple[float, float] | None = None, a: float = 1.0, sigma2: float = 1.0) -> EchoModel:
    """Echo model on the spectrum's grid, optionally restricted to ``band = (lo, hi)`` Hz."""
    _check_bearing(theta)
    if band is not None:
        keep = (spec.f >= band[0]) & (spec.f <= band[1])
        freqs, S = spec.f[keep], spec.S[keep]
    else:
        freqs, S = spec.f, spec.S
    if len(freqs) == 0:
        raise ValueError("band selection is empty")
    b = beampattern(ls, freqs, theta)
    return EchoModel(freqs, S, S * b, theta, a, sigma2, b)


def analysis_band(center: float, delta_f: float, n: int = 256, widen: float = 1.25) -> np.ndarray:
    """Default echo-model frequencies: ``n`` points across ``center +- widen * delta_f / 2``."""
    return center + np.linspace(-widen * delta_f / 2, widen * delta_f / 2, n)
