"""The heat kernel p_t(x) = e^{-t Delta} 1_0(x) of the standard Laplacian on Z^d.

In one dimension p_t(m) = e^{-2t} I_|m|(2t); in d dimensions it factorises
over coordinates.
"""

from __future__ import annotations

import math

import numpy as np

from .lattice import ParameterError, as_point, max_norm
from .special import bessel_i_scaled, bessel_i_scaled_orders

__all__ = [
    "heat_kernel_1d",
    "heat_kernel",
    "heat_kernel_table_1d",
    "gaussian_main_term",
    "small_t_bound",
]


def heat_kernel_1d(t: float, m: int) -> float:
    if t < 0:
        raise ParameterError(f"time must be non-negative, got {t!r}")
    if t == 0:
        return 1.0 if m == 0 else 0.0
    return bessel_i_scaled(abs(int(m)), 2.0 * t)


def heat_kernel(t: float, x) -> float:
    """p_t(x) on Z^d as a product of one-dimensional factors."""
    pt = as_point(x)
    value = 1.0
    for c in pt:
        value *= heat_kernel_1d(t, c)
        if value == 0.0:
            break
    return value


def heat_kernel_table_1d(t, mmax: int) -> np.ndarray:
    """p_t(m) for m = 0..mmax at each time in ``t``; shape (len(t), mmax + 1)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise ParameterError("times must be non-negative")
    return bessel_i_scaled_orders(mmax, 2.0 * t)


def gaussian_main_term(t: float, x) -> float:
    """(4 pi t)^{-d/2} exp(-|x|^2 / 4t), the large-time profile of p_t(x)."""
    if not t > 0:
        raise ParameterError(f"gaussian_main_term requires t > 0, got {t!r}")
    pt = as_point(x)
    r2 = float(sum(c * c for c in pt))
    return (4.0 * math.pi * t) ** (-len(pt) / 2.0) * math.exp(-r2 / (4.0 * t))


def small_t_bound(t: float, x) -> float:
    """Upper bound t^{|x|_inf} / |x|_inf! for p_t(x), valid for 0 < t < |x|_inf.

    From the series, e^{-2t} I_m(2t) <= (t^m / m!) e^{-2t} I_0(2t) <= t^m / m!,
    and the remaining coordinate factors are at most one.
    """
    m = max_norm(x)
    if m == 0:
        raise ParameterError("small_t_bound is undefined at x = 0")
    if not 0.0 < t < m:
        raise ParameterError(f"small_t_bound requires 0 < t < |x|_inf = {m}, got {t!r}")
    return math.exp(m * math.log(t) - math.lgamma(m + 1.0))
