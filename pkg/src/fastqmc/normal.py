"""Standard normal CDF and its inverse."""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = ["normal_cdf", "inv_normal_cdf"]


def normal_cdf(x):
    return ndtr(np.asarray(x, dtype=float))


def inv_normal_cdf(p):
    """Quantile function of the standard normal distribution.

    Accepts scalars or arrays with every entry strictly inside (0, 1); the
    endpoints map to infinities and must be handled by the caller. The upper
    half is evaluated as ``-inv_normal_cdf(1 - p)``, so the result is exactly
    antisymmetric whenever ``1 - p`` is representable.
    """
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise ValueError("inv_normal_cdf requires 0 < p < 1")
    upper = arr > 0.5
    z = ndtri(np.where(upper, 1.0 - arr, arr))
    z = np.where(upper, -z, z)
    if arr.ndim == 0:
        return float(z)
    return z
