"""Integer-order Bessel functions of the first kind by Miller's algorithm.

Backward recurrence

    J_{k-1}(x) = (2k / x) J_k(x) - J_{k+1}(x)

is stable for all orders, so a whole sequence J_0..J_n is produced from one
downward sweep started well above max(n, x), then normalized with the
identity J_0(x) + 2 * sum_k J_2k(x) = 1.
"""

from __future__ import annotations

import math

import numpy as np

_RESCALE = 1e250


def _start_order(n_max: int, x: float) -> int:
    top = max(n_max, int(math.ceil(x)))
    start = top + 30 + int(math.sqrt(160.0 * max(top, 1)))
    return start + (start % 2)


def bessel_jn_sequence(n_max: int, x: float) -> np.ndarray:
    """Return ``[J_0(x), J_1(x), ..., J_{n_max}(x)]``.

    Parameters
    ----------
    n_max : int
        Highest order wanted (>= 0).
    x : float
        Real argument. Negative arguments use J_n(-x) = (-1)^n J_n(x).
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("argument must be finite")

    out = np.zeros(n_max + 1)
    if x == 0.0:
        out[0] = 1.0
        return out

    sign_flip = x < 0.0
    ax = abs(x)
    start = _start_order(n_max, ax)

    vals = np.zeros(start + 2)
    j_next, j_cur = 0.0, 1e-300
    vals[start] = j_cur
    for k in range(start, 0, -1):
        j_prev = (2.0 * k / ax) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        vals[k - 1] = j_cur
        if abs(j_cur) > _RESCALE:
            vals[k - 1 :] /= _RESCALE
            j_cur /= _RESCALE
            j_next /= _RESCALE

    norm = vals[0] + 2.0 * vals[2 : start + 1 : 2].sum()
    out[:] = vals[: n_max + 1] / norm
    if sign_flip:
        out[1::2] *= -1.0
    return out


def bessel_jn(n: int, x: float) -> float:
    """Single value J_n(x) for integer n (negative orders allowed)."""
    seq = bessel_jn_sequence(abs(n), x)
    val = seq[abs(n)]
    if n < 0 and n % 2:
        val = -val
    return float(val)
