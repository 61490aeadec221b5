"""Univariate and bivariate standard-normal numerics.

Public, validated wrappers over the kernel backend. All functions are
pure and safe for unrestricted concurrent use.
"""

from __future__ import annotations

import math

import numpy as np

from .backend import kernels
from .errors import DomainError, UnboundedQuantileError

__all__ = [
    "std_normal_cdf",
    "std_normal_quantile",
    "std_normal_quantile_many",
    "bvn_upper_tail",
    "bvn_upper_tail_many",
]


def std_normal_cdf(z: float) -> float:
    """Phi(z), the standard normal CDF. Absolute error below 1e-15."""
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"std_normal_cdf requires finite z, got {z!r}")
    return kernels.std_normal_cdf(z)


def std_normal_quantile(p: float) -> float:
    """Phi^-1(p) for p in (0, 1); round-trips with std_normal_cdf."""
    p = float(p)
    if math.isnan(p) or p < 0.0 or p > 1.0:
        raise DomainError(f"std_normal_quantile requires p in (0, 1), got {p!r}")
    if p == 0.0 or p == 1.0:
        raise UnboundedQuantileError(
            f"standard normal quantile is unbounded at p={p:g}"
        )
    return kernels.std_normal_quantile(p)


def std_normal_quantile_many(p: np.ndarray) -> np.ndarray:
    """Vectorized std_normal_quantile over an array with entries in (0, 1)."""
    p = np.asarray(p, dtype=np.float64)
    if p.size and (np.isnan(p).any() or p.min() < 0.0 or p.max() > 1.0):
        raise DomainError("std_normal_quantile_many requires entries in (0, 1)")
    if p.size and ((p == 0.0).any() or (p == 1.0).any()):
        raise UnboundedQuantileError("standard normal quantile is unbounded at 0 and 1")
    return kernels.std_normal_quantile_many(p)


def bvn_upper_tail(h: float, k: float, rho: float) -> float:
    """P(X > h, Y > k) for a standard bivariate normal with correlation rho.

    Degenerate rho = +/-1 is handled by explicit closed forms; elsewhere
    the Drezner-Wesolowsky / Genz scheme keeps the absolute error well
    below 1e-10.
    """
    h = float(h)
    k = float(k)
    rho = float(rho)
    if not (math.isfinite(h) and math.isfinite(k)):
        raise DomainError(f"bvn_upper_tail requires finite h, k; got {h!r}, {k!r}")
    if not math.isfinite(rho) or abs(rho) > 1.0:
        raise DomainError(f"bvn_upper_tail requires |rho| <= 1, got {rho!r}")
    return kernels.bvn_upper_tail(h, k, rho)


def bvn_upper_tail_many(h: np.ndarray, k: np.ndarray, rho: float) -> np.ndarray:
    """Vectorized bvn_upper_tail at a common correlation."""
    h = np.asarray(h, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    rho = float(rho)
    if h.size and not (np.isfinite(h).all() and np.isfinite(k).all()):
        raise DomainError("bvn_upper_tail_many requires finite h, k")
    if not math.isfinite(rho) or abs(rho) > 1.0:
        raise DomainError(f"bvn_upper_tail_many requires |rho| <= 1, got {rho!r}")
    return kernels.bvn_upper_tail_many(h, k, rho)
