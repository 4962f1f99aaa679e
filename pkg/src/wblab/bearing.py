"""Bearing Fisher information of the line-source echo model.

With y = a h(theta) + w and an unknown echo amplitude a, the bearing FI is

    J(theta) = SNR * ||dh/dtheta||^2 * sin^2(psi),

psi being the principal angle between h and dh/dtheta. Everything here is
evaluated at SNR = 1; multiply by the SNR to get a physical value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .channel import EchoModel, LineSource, beampattern_and_slope, beampattern_dtheta
from .mtsfm import FourierModulation
from .spectrum import Spectrum


@dataclass(frozen=True, eq=False)
class FIProfile:
    thetas: np.ndarray
    fi: np.ndarray
    psi: np.ndarray
    theta_star: float
    fi_max: float

    @property
    def grid_res(self) -> float:
        return float(self.thetas[1] - self.thetas[0])

    def fi_at_angle(self, theta: float) -> float:
        """FI interpolated (linearly) at an arbitrary bearing on the grid span."""
        return float(np.interp(theta, self.thetas, self.fi))

    def scaled(self, factor: float) -> "FIProfile":
        return FIProfile(self.thetas, self.fi * factor, self.psi, self.theta_star, self.fi_max * factor)


def _fi_terms(weights: np.ndarray, b: np.ndarray, db: np.ndarray):
    """FI and psi from |S|^2 weights and real beampattern values, rows = bearings."""
    hh = b**2 @ weights
    dd = db**2 @ weights
    hd = (b * db) @ weights
    if np.any(hh <= 0):
        raise ValueError("echo model vector is zero (target outside all beams)")
    with np.errstate(invalid="ignore", divide="ignore"):
        cos2 = np.where(dd > 0, hd**2 / (hh * dd), 1.0)
    cos2 = np.clip(cos2, 0.0, 1.0)
    fi = np.maximum(dd - hd**2 / hh, 0.0)
    fi = np.where(dd > 0, fi, 0.0)
    return fi, np.arccos(np.sqrt(cos2))


def fi_at(model: EchoModel, ls: LineSource) -> tuple[float, float]:
    """Bearing FI (SNR = 1) and principal angle psi for one echo model."""
    h = model.h
    dh = model.S * beampattern_dtheta(ls, model.freqs, model.theta)
    hh = float(np.vdot(h, h).real)
    if hh == 0:
        raise ValueError("echo model vector is zero (target outside all beams)")
    dd = float(np.vdot(dh, dh).real)
    if dd == 0:
        return 0.0, math.pi / 2
    cos_psi = min(abs(np.vdot(h, dh)) / math.sqrt(hh * dd), 1.0)
    sin2 = 1.0 - cos_psi**2
    return dd * sin2, math.acos(cos_psi)


def default_theta_grid(max_deg: float = 20.0, step_deg: float = 0.01) -> np.ndarray:
    """Symmetric bearing grid (rad) through 0."""
    n = int(round(max_deg / step_deg))
    return np.deg2rad(np.arange(-n, n + 1) * step_deg)


def _refine_peak(thetas: np.ndarray, fi: np.ndarray) -> float:
    top = fi.max()
    ties = np.flatnonzero(fi == top)
    # smaller |theta| first, then positive side
    i = int(min(ties, key=lambda j: (abs(thetas[j]), -thetas[j])))
    if 0 < i < len(fi) - 1:
        y0, y1, y2 = fi[i - 1], fi[i], fi[i + 1]
        denom = y0 - 2 * y1 + y2
        if denom < 0:
            return float(thetas[i] + 0.5 * (y0 - y2) / denom * (thetas[1] - thetas[0]))
    return float(thetas[i])


def fi_profile(spec: Spectrum, ls: LineSource, theta_grid=None) -> FIProfile:
    """FI over a uniform bearing grid; ``theta_star`` is the parabolically refined argmax."""
    thetas = default_theta_grid() if theta_grid is None else np.asarray(theta_grid, dtype=float)
    if thetas.size == 0:
        raise ValueError("empty bearing grid")
    if thetas.size > 2 and np.ptp(np.diff(thetas)) > 1e-9 * abs(thetas[1] - thetas[0]):
        raise ValueError("bearing grid must be uniform")

    weights = spec.psd
    f = spec.f[None, :]
    n = len(thetas)
    mirrored = n % 2 == 1 and np.allclose(thetas, -thetas[::-1], rtol=0, atol=1e-15)
    # FI is even in theta: on a mirrored grid evaluate the non-negative half only
    half = thetas[n // 2 :] if mirrored else thetas
    fi, psi = _fi_terms(weights, *beampattern_and_slope(ls, f, half[:, None]))
    if mirrored:
        fi = np.concatenate([fi[:0:-1], fi])
        psi = np.concatenate([psi[:0:-1], psi])
    return FIProfile(thetas, fi, psi, _refine_peak(thetas, fi), float(fi.max()))


def theta_star_deviation(test: FIProfile, reference: FIProfile) -> float:
    """Percent deviation of the test waveform's FI-maximizing bearing from the reference."""
    if reference.theta_star == 0:
        raise ValueError("reference theta_star is zero")
    return 100.0 * (test.theta_star - reference.theta_star) / reference.theta_star


def compensate_offset(mod: FourierModulation, delta_f_measured: float) -> FourierModulation:
    """Shift the sweep by ``-delta_f`` (a0 <- a0 - 2 delta_f) to re-centre the spectrum on fc."""
    if delta_f_measured == 0:
        return mod
    return mod.with_a0(mod.a0 - 2.0 * delta_f_measured)


def target_carrier(theta_target: float, theta_star_of_fc, fc_lo: float, fc_hi: float, xtol: float = 1e-9) -> float:
    """Carrier frequency whose reference profile peaks at ``theta_target`` (1-D root search)."""
    return brentq(lambda fc: theta_star_of_fc(fc) - theta_target, fc_lo, fc_hi, xtol=xtol)
