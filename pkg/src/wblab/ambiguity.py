"""Narrowband and broadband ambiguity functions, their cuts, and mainlobe/sidelobe metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import ndimage

from .mtsfm import SampledWaveform

AFKind = Literal["narrowband", "broadband"]

HALF_POWER = 1 / math.sqrt(2)
NO_SIDELOBE = -math.inf

_INTERP_TAPS = 16
_KAISER_BETA = 8.6
# complex elements per FFT batch when stacking Doppler rows
_BATCH_ELEMS = 1 << 22


@dataclass(frozen=True, eq=False)
class AFSurface:
    """|chi| sampled with rows along the Doppler axis and columns along delay."""

    delays: np.ndarray
    dopplers: np.ndarray
    values: np.ndarray
    kind: AFKind = "narrowband"
    meta: dict = field(default_factory=dict)

    def _index(self, axis: np.ndarray, name: str) -> int:
        hits = np.flatnonzero(np.abs(axis) <= 1e-12 * max(np.abs(axis).max(), 1e-300))
        if hits.size == 0:
            raise ValueError(f"0 is not on the {name} grid")
        return int(hits[0])

    @property
    def zero_doppler_cut(self) -> np.ndarray:
        return self.values[self._index(self.dopplers, "Doppler")]

    @property
    def zero_delay_cut(self) -> np.ndarray:
        return self.values[:, self._index(self.delays, "delay")]


@dataclass(frozen=True)
class AFMetrics:
    mainlobe_width_delay: float
    mainlobe_width_doppler: float
    psl_delay: float
    psl_doppler: float
    psl_surface: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def default_delays(T: float, fs: float) -> np.ndarray:
    """-T..T at the sample spacing."""
    n = int(round(T * fs))
    return np.arange(-n, n + 1) / fs


def default_dopplers(T: float, span: float = 20.0, per_bin: int = 8) -> np.ndarray:
    """-span/T..span/T Hz at 1/(per_bin T) spacing."""
    n = int(round(span * per_bin))
    return np.arange(-n, n + 1) / (per_bin * T)


def _check_uniform(x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"{name} grid must be a non-empty 1-D array")
    if x.size > 2:
        d = np.diff(x)
        if np.any(d <= 0) or np.ptp(d) > 1e-6 * abs(d.mean()):
            raise ValueError(f"{name} grid must be uniform and increasing")
    return x


def _snap(delays: np.ndarray, fs: float) -> tuple[np.ndarray, float]:
    lags = np.rint(delays * fs).astype(np.int64)
    return lags, float(np.max(np.abs(delays - lags / fs)))


def _correlate_rows(ref: np.ndarray, rows: np.ndarray, lags: np.ndarray, n_ref: int) -> np.ndarray:
    """sum_n rows[r, n] * conj(ref[n + lag]) for every row and requested lag.

    ``ref`` may be longer than ``n_ref`` on the right; entries of ``ref`` are
    indexed from the same origin as ``rows``. Lags whose window misses ``ref``
    entirely give 0.
    """
    n_rows, n = rows.shape
    lo = min(int(lags.min()), 0)
    hi = max(int(lags.max()), 0)
    nfft = 1 << int(math.ceil(math.log2(n + len(ref) + (hi - lo) + 1)))
    R = np.conj(np.fft.fft(ref, nfft))
    out = np.zeros((n_rows, len(lags)))
    idx = np.mod(-lags, nfft)
    step = max(1, _BATCH_ELEMS // nfft)
    for i in range(0, n_rows, step):
        X = np.fft.fft(rows[i : i + step], nfft, axis=1)
        # circular cross-correlation: c[k] = sum_n x[n] conj(ref[n - k]); lag l -> k = -l
        c = np.fft.ifft(X * R[None, :], axis=1)
        out[i : i + step] = np.abs(c[:, idx])
    valid = (lags > -n) & (lags < len(ref))
    out[:, ~valid] = 0.0
    return out


def naf(w: SampledWaveform, delays=None, dopplers=None) -> AFSurface:
    """Narrowband AF chi(tau, nu) = int s(t) s*(t + tau) exp(j 2 pi nu t) dt.

    Delays are snapped to the sample grid (largest snap recorded in ``meta``);
    each Doppler row is one FFT correlation across all delays.
    """
    T = w.duration
    delays = _check_uniform(default_delays(T, w.fs) if delays is None else delays, "delay")
    dopplers = _check_uniform(default_dopplers(T) if dopplers is None else dopplers, "Doppler")
    lags, snap = _snap(delays, w.fs)
    t = w.times
    rows = w.samples[None, :] * np.exp(2j * np.pi * dopplers[:, None] * t[None, :])
    vals = _correlate_rows(w.samples, rows, lags, w.n) / w.fs
    return AFSurface(lags / w.fs, dopplers, vals, "narrowband", {"delay_snap_s": snap, "fs": w.fs})


def doppler_scale(range_rate, c: float):
    """eta = (1 + rdot/c) / (1 - rdot/c)."""
    r = np.asarray(range_rate, dtype=float) / c
    with np.errstate(divide="ignore"):
        return (1 + r) / (1 - r)


def narrowband_doppler(eta, fc: float):
    """Doppler shift whose NAF row matches the BAF at scale ``eta`` for these sign conventions."""
    return fc * (1 - np.asarray(eta, dtype=float))


def resample(samples: np.ndarray, positions: np.ndarray, taps: int = _INTERP_TAPS) -> np.ndarray:
    """Band-limited interpolation at fractional sample ``positions`` with a Kaiser-windowed sinc.

    Samples outside the record are treated as zero.
    """
    positions = np.asarray(positions, dtype=float)
    base = np.floor(positions).astype(np.int64)
    frac = positions - base
    half = taps // 2
    offsets = np.arange(-half + 1, half + 1)
    idx = base[:, None] + offsets[None, :]
    d = frac[:, None] - offsets[None, :]
    win = np.i0(_KAISER_BETA * np.sqrt(np.clip(1 - (d / half) ** 2, 0, None))) / np.i0(_KAISER_BETA)
    weights = np.where(np.rint(d) == d, (d == 0).astype(float), np.sinc(d) * win)
    inside = (idx >= 0) & (idx < len(samples))
    vals = np.where(inside, samples[np.clip(idx, 0, len(samples) - 1)], 0.0)
    return np.sum(vals * weights, axis=1)


def baf(w: SampledWaveform, delays=None, range_rates=None, c: float = 1500.0) -> AFSurface:
    """Broadband AF chi(tau, eta) = sqrt(eta) int s(t) s*(eta (t + tau)) dt.

    Time scaling is about t = 0 (pulse centre) and acts on absolute time, so
    the waveform must be sampled at carrier. Rows are indexed by range rate.
    """
    if w.representation != "carrier":
        raise ValueError("broadband AF needs a carrier-representation waveform")
    T = w.duration
    delays = _check_uniform(default_delays(T, w.fs) if delays is None else delays, "delay")
    range_rates = np.atleast_1d(np.asarray(range_rates if range_rates is not None else [0.0], dtype=float))
    etas = doppler_scale(range_rates, c)
    if np.any(etas <= 0) or np.any(~np.isfinite(etas)):
        raise ValueError("Doppler scale factor must be positive")
    lags, snap = _snap(delays, w.fs)

    t0 = w.t0_offset
    out = np.zeros((len(etas), len(delays)))
    for r, eta in enumerate(etas):
        # y(t_m) = s(eta t_m) on an extended grid long enough for the stretched pulse
        extra = int(math.ceil(w.n * max(1.0 / eta - 1.0, 0.0) / 2)) + _INTERP_TAPS
        m = np.arange(-extra, w.n + extra)
        t_m = t0 + m / w.fs
        if eta == 1.0:
            y = np.where((m >= 0) & (m < w.n), w.samples[np.clip(m, 0, w.n - 1)], 0.0)
        else:
            y = resample(w.samples, (eta * t_m - t0) * w.fs)
        # index y so that y[j] corresponds to sample index j - extra of the rows grid
        corr = _correlate_rows(y, w.samples[None, :], lags + extra, len(y))
        out[r] = math.sqrt(eta) * corr[0] / w.fs
    return AFSurface(lags / w.fs, range_rates, out, "broadband",
                     {"delay_snap_s": snap, "fs": w.fs, "eta": etas.tolist(), "c": c})


def af_cuts(af: AFSurface) -> tuple[np.ndarray, np.ndarray]:
    """(zero-Doppler cut over delay, zero-delay cut over Doppler)."""
    return af.zero_doppler_cut, af.zero_delay_cut


def _mainlobe(x: np.ndarray, y: np.ndarray) -> tuple[float, int, int]:
    """Half-power width around the peak nearest the origin, plus the contiguous index range."""
    i0 = int(np.argmin(np.abs(x)))
    peak = y[i0]
    level = HALF_POWER * peak
    lo = i0
    while lo > 0 and y[lo - 1] >= level:
        lo -= 1
    hi = i0
    while hi < len(y) - 1 and y[hi + 1] >= level:
        hi += 1
    if hi - lo + 1 < 5:
        raise ValueError("mainlobe spans fewer than 5 grid points above -3 dB")
    if lo == 0 or hi == len(y) - 1:
        raise ValueError("mainlobe reaches the edge of the grid")

    def cross(a, b):
        # linear interpolation between grid points a (above) and b (below)
        return x[a] + (level - y[a]) * (x[b] - x[a]) / (y[b] - y[a])

    return cross(hi, hi + 1) - cross(lo, lo - 1), lo, hi


def _parabolic_peak(y0: float, y1: float, y2: float) -> float:
    """Vertex height of the parabola through three samples with y1 the largest."""
    denom = y0 - 2 * y1 + y2
    if denom >= 0:
        return y1
    return y1 - 0.125 * (y0 - y2) ** 2 / denom


def _psl(y: np.ndarray, lo: int, hi: int) -> float:
    peak = y[lo : hi + 1].max()
    interior = np.arange(1, len(y) - 1)
    is_max = (y[interior] > y[interior - 1]) & (y[interior] >= y[interior + 1])
    cand = interior[is_max]
    cand = cand[(cand < lo) | (cand > hi)]
    if cand.size == 0 or y[cand].max() <= 0:
        return NO_SIDELOBE
    top = max(_parabolic_peak(y[i - 1], y[i], y[i + 1]) for i in cand)
    return float(20 * np.log10(top / peak))


def cut_metrics(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """(-3 dB mainlobe width, peak sidelobe level in dB) of a single cut."""
    width, lo, hi = _mainlobe(np.asarray(x), np.asarray(y))
    return float(width), _psl(np.asarray(y), lo, hi)


def _surface_psl(af: AFSurface) -> float:
    """Largest 2-D local maximum outside the mainlobe region, in dB re the origin."""
    v = af.values
    i0 = int(np.argmin(np.abs(af.dopplers)))
    j0 = int(np.argmin(np.abs(af.delays)))
    peak = v[i0, j0]
    # mainlobe: connected region above half power containing the origin
    labels, _ = ndimage.label(v >= HALF_POWER * peak)
    main = labels == labels[i0, j0]
    local = v == ndimage.maximum_filter(v, size=3, mode="constant", cval=-np.inf)
    side = local & ~main & (v > 0)
    if not side.any():
        return NO_SIDELOBE
    return float(20 * np.log10(v[side].max() / peak))


def af_metrics(af: AFSurface) -> AFMetrics:
    zd, zt = af_cuts(af)
    w_delay, psl_delay = cut_metrics(af.delays, zd)
    w_dopp, psl_dopp = cut_metrics(af.dopplers, zt)
    return AFMetrics(w_delay, w_dopp, psl_delay, psl_dopp, _surface_psl(af))
