"""Fourier-series (generalized Bessel function) coefficients of an MTSFM.

The periodic part of an MTSFM, exp(j sum_k alpha_k sin(k x) - beta_k cos(k x))
with x = 2 pi t / T, factors into one term per harmonic. Each factor is a
one-dimensional Jacobi-Anger series,

    exp(j R_k sin(k x - p_k)) = sum_n J_n(R_k) exp(-j n p_k) exp(j n k x),
    R_k = hypot(alpha_k, beta_k),  p_k = atan2(beta_k, alpha_k),

whose coefficients sit at multiples of k. Convolving the K sparse sequences
gives the K-dimensional mixed-type GBF values c_m; with beta = 0 this is the
cylindrical GBF and with alpha = 0 the odd-symmetric (modified) form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_jn_sequence
from .mtsfm import FourierModulation

TAIL_TOL = 1e-6
# coefficients this small cannot affect any result at double precision
_NEGLIGIBLE = 1e-30


class TruncationError(ValueError):
    """Requested truncation order drops more than ``TAIL_TOL`` of the energy."""

    def __init__(self, M: int, required: int, tail: float):
        super().__init__(f"truncation order M={M} leaves tail energy {tail:.3g}; need M >= {required}")
        self.required = required
        self.tail = tail


@dataclass(frozen=True, eq=False)
class GbfCoefficients:
    """Coefficients ``c[m + M]`` for ``m = -M..M``."""

    c: np.ndarray
    M: int
    T: float
    a0: float

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    @property
    def frequencies(self) -> np.ndarray:
        """Baseband line frequencies ``a0/2 + m/T`` (Hz)."""
        return self.a0 / 2 + self.orders / self.T

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.c) ** 2))

    def __getitem__(self, m: int) -> complex:
        if abs(m) > self.M:
            return 0j
        return complex(self.c[m + self.M])

    def mean_offset(self) -> float:
        """Power-weighted mean line frequency relative to the carrier (Hz)."""
        p = np.abs(self.c) ** 2
        return float(np.sum(self.frequencies * p) / np.sum(p))


def _harmonic_orders(R: float) -> int:
    return int(math.ceil(R + 8.0 * R ** (1.0 / 3.0) + 16.0))


def auto_truncation(mod: FourierModulation) -> int:
    """Truncation order sized from the summed modulation indices plus a margin."""
    k = mod.harmonics
    spread = float(np.sum(k * (np.abs(mod.alpha) + np.abs(mod.beta))))
    return int(math.ceil(spread)) + 8 + int(math.ceil(3.0 * math.sqrt(spread)))


def _full_coefficients(mod: FourierModulation) -> np.ndarray:
    """All coefficients out to where every per-harmonic series is exhausted."""
    acc = np.ones(1, dtype=complex)
    for k, alpha, beta in zip(mod.harmonics, mod.alpha, mod.beta):
        R = math.hypot(alpha, beta)
        if R == 0.0:
            continue
        p = math.atan2(beta, alpha)
        nk = _harmonic_orders(R)
        jn = bessel_jn_sequence(nk, R)
        n = np.arange(-nk, nk + 1)
        coef = np.where(n % 2 == 0, 1.0, np.where(n < 0, -1.0, 1.0)) * jn[np.abs(n)]
        coef = coef * np.exp(-1j * n * p)

        # harmonic k contributes only at multiples of k
        step = np.zeros(2 * nk * int(k) + 1, dtype=complex)
        step[:: int(k)] = coef
        acc = _trim(np.convolve(acc, step))
    return acc


def _trim(acc: np.ndarray) -> np.ndarray:
    """Drop symmetric tails below ``_NEGLIGIBLE``, keeping order 0 at the centre."""
    half = (len(acc) - 1) // 2
    big = np.flatnonzero(np.abs(acc) > _NEGLIGIBLE)
    if big.size == 0:
        return acc
    reach = max(half - big[0], big[-1] - half)
    return acc[half - reach : half + reach + 1]


def gbf_coefficients(mod: FourierModulation, M: int | None = None) -> GbfCoefficients:
    """Complex Fourier coefficients of the MTSFM's periodic part, truncated to ``|m| <= M``.

    ``M=None`` starts from ``auto_truncation`` and widens it if the tail check
    asks for more. An explicit ``M`` raises ``TruncationError`` when the
    discarded tail carries more than ``TAIL_TOL`` of the energy.
    """
    auto = M is None
    M = auto_truncation(mod) if auto else int(M)
    if M < 0:
        raise ValueError("M must be non-negative")

    full = _full_coefficients(mod)
    half = (len(full) - 1) // 2
    if M >= half:
        c = np.zeros(2 * M + 1, dtype=complex)
        c[M - half : M + half + 1] = full
    else:
        power = np.abs(full) ** 2
        by_order = power[half:].copy()
        by_order[1:] += power[:half][::-1]
        # tail_beyond[j]: energy with |m| > j
        tail_beyond = np.maximum(power.sum() - np.cumsum(by_order), 0.0)
        tail = float(tail_beyond[M])
        if tail > TAIL_TOL:
            required = int(np.argmax(tail_beyond <= TAIL_TOL))
            if not auto:
                raise TruncationError(M, required, tail)
            M = required
        c = full[half - M : half + M + 1]
    return GbfCoefficients(c, M, mod.T, mod.a0)
