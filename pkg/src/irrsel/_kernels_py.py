"""Numerical kernels, NumPy implementation.

Fallback with the same call surface as the compiled extension
(``irrsel._kernels``), used when that extension is unavailable.

Algorithms:

* standard normal CDF via the complementary error function;
* standard normal quantile: Acklam's rational approximation refined by a
  single Halley step against the CDF, which makes the round trip with the
  CDF accurate to machine precision regardless of the initializer;
* bivariate normal upper-tail probability: the fixed-order
  Gauss-Legendre / asymptotic-series hybrid of Drezner & Wesolowsky (1989)
  as reorganized by Genz (2004), split at |rho| = 0.925.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc

NAME = "python"

_SQRT1_2 = math.sqrt(0.5)
_TWO_PI = 2.0 * math.pi
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

# Acklam's inverse-normal coefficients (central and tail rational forms).
_QA = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
       1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_QB = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
       6.680131188771972e+01, -1.328068155288572e+01)
_QC = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
       -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_QD = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
       3.754408661907416e+00)
_P_LOW = 0.02425

# Gauss-Legendre half-weights/nodes used by the bivariate-normal scheme.
_GL = {
    6: (np.array([0.1713244923791705, 0.3607615730481384,
                  0.4679139345726904]),
        np.array([0.9324695142031522, 0.6612093864662647,
                  0.2386191860831970])),
    12: (np.array([0.04717533638651177, 0.1069393259953183,
                   0.1600783285433464, 0.2031674267230659,
                   0.2334925365383547, 0.2491470458134029]),
         np.array([0.9815606342467191, 0.9041172563704750,
                   0.7699026741943050, 0.5873179542866171,
                   0.3678314989981802, 0.1252334085114692])),
    20: (np.array([0.01761400713915212, 0.04060142980038694,
                   0.06267204833410906, 0.08327674157670475,
                   0.1019301198172404, 0.1181945319615184,
                   0.1316886384491766, 0.1420961093183821,
                   0.1491729864726037, 0.1527533871307259]),
         np.array([0.9931285991850949, 0.9639719272779138,
                   0.9122344282513259, 0.8391169718222188,
                   0.7463319064601508, 0.6360536807265150,
                   0.5108670019508271, 0.3737060887154196,
                   0.2277858511416451, 0.07652652113349733])),
}


def _gl_nodes(rho: float):
    if abs(rho) < 0.3:
        w, x = _GL[6]
    elif abs(rho) < 0.75:
        w, x = _GL[12]
    else:
        w, x = _GL[20]
    return np.concatenate([w, w]), np.concatenate([1.0 - x, 1.0 + x])


def std_normal_cdf_many(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    return 0.5 * erfc(-z * _SQRT1_2)


def std_normal_cdf(z: float) -> float:
    return float(0.5 * erfc(-z * _SQRT1_2))


def std_normal_quantile_many(p) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    q = p - 0.5
    central = np.abs(q) <= 0.5 - _P_LOW
    low = p < _P_LOW
    high = p > 1.0 - _P_LOW

    x = np.zeros_like(p)

    r = np.where(central, q * q, 0.0)
    num = ((((_QA[0] * r + _QA[1]) * r + _QA[2]) * r + _QA[3]) * r + _QA[4]) * r + _QA[5]
    den = ((((_QB[0] * r + _QB[1]) * r + _QB[2]) * r + _QB[3]) * r + _QB[4]) * r + 1.0
    x = np.where(central, q * num / den, x)

    pt = np.where(low, p, np.where(high, 1.0 - p, 0.5))
    s = np.sqrt(-2.0 * np.log(pt))
    num = ((((_QC[0] * s + _QC[1]) * s + _QC[2]) * s + _QC[3]) * s + _QC[4]) * s + _QC[5]
    den = (((_QD[0] * s + _QD[1]) * s + _QD[2]) * s + _QD[3]) * s + 1.0
    tail = num / den
    x = np.where(low, tail, x)
    x = np.where(high, -tail, x)

    # One Halley refinement against the CDF; skipped where the normal
    # density underflows (|x| > 37), where the initializer is already at
    # the limit of what doubles can represent.
    refine = np.abs(x) < 37.0
    xr = np.where(refine, x, 0.0)
    err = std_normal_cdf_many(xr) - p
    u = err * _SQRT_TWO_PI * np.exp(0.5 * xr * xr)
    x = np.where(refine, xr - u / (1.0 + 0.5 * xr * u), x)
    return x


def std_normal_quantile(p: float) -> float:
    return float(std_normal_quantile_many(np.array([p]))[0])


def _bvnu_mid_rho(h, k, rho, w, x):
    # |rho| < 0.925: Drezner-Wesolowsky integral over sin-substituted angle.
    hk = h * k
    hs = 0.5 * (h * h + k * k)
    asr = 0.5 * math.asin(rho)
    sn = np.sin(asr * x)
    terms = np.exp((np.outer(hk, sn) - hs[:, None]) / (1.0 - sn * sn))
    bvn = terms @ w
    return bvn * asr / _TWO_PI + std_normal_cdf_many(-h) * std_normal_cdf_many(-k)


def _bvnu_high_rho(h, k, rho, w, x):
    # 0.925 <= |rho| < 1: asymptotic expansion plus Gauss-Legendre
    # correction on the residual integral.
    if rho < 0.0:
        k = -k
    hk = h * k
    bvn = np.zeros_like(h)

    ass = (1.0 - rho) * (1.0 + rho)
    a = math.sqrt(ass)
    bs = (h - k) ** 2
    c = (4.0 - hk) / 8.0
    d = (12.0 - hk) / 80.0
    asr = -0.5 * (bs / ass + hk)
    m1 = asr > -100.0
    bvn = np.where(
        m1,
        a * np.exp(np.where(m1, asr, 0.0))
        * (1.0 - c * (bs - ass) * (1.0 - d * bs) / 3.0 + c * d * ass * ass),
        bvn,
    )
    m2 = hk > -100.0
    b = np.sqrt(bs)
    sp = _SQRT_TWO_PI * std_normal_cdf_many(-b / a)
    bvn = bvn - np.where(
        m2,
        np.exp(np.where(m2, -0.5 * hk, 0.0)) * sp * b
        * (1.0 - c * bs * (1.0 - d * bs) / 3.0),
        0.0,
    )

    a *= 0.5
    total = np.zeros_like(h)
    for wi, xi in zip(w, x):
        xs = (a * xi) ** 2
        asr_i = -0.5 * (bs / xs + hk)
        mi = asr_i > -100.0
        rs = math.sqrt(1.0 - xs)
        sp_i = 1.0 + c * xs * (1.0 + 5.0 * d * xs)
        ep_i = np.exp(np.where(mi, -0.5 * hk * xs / ((1.0 + rs) ** 2), 0.0)) / rs
        total += wi * np.where(mi, np.exp(np.where(mi, asr_i, 0.0)) * (sp_i - ep_i), 0.0)
    bvn = (a * total - bvn) / _TWO_PI

    if rho > 0.0:
        bvn = bvn + std_normal_cdf_many(-np.maximum(h, k))
    else:
        ell = np.where(
            h < 0.0,
            std_normal_cdf_many(k) - std_normal_cdf_many(h),
            std_normal_cdf_many(-h) - std_normal_cdf_many(-k),
        )
        bvn = np.where(h >= k, -bvn, ell - bvn)
    return bvn


def bvn_upper_tail_many(h, k, rho: float) -> np.ndarray:
    """P(X > h_i, Y > k_i) for standard bivariate normals with common rho."""
    h = np.asarray(h, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    if rho == 1.0:
        return 1.0 - std_normal_cdf_many(np.maximum(h, k))
    if rho == -1.0:
        out = std_normal_cdf_many(-k) - std_normal_cdf_many(h)
        return np.maximum(out, 0.0) + 0.0
    if rho == 0.0:
        return std_normal_cdf_many(-h) * std_normal_cdf_many(-k)
    w, x = _gl_nodes(rho)
    if abs(rho) < 0.925:
        bvn = _bvnu_mid_rho(h, k, rho, w, x)
    else:
        bvn = _bvnu_high_rho(h, k, rho, w, x)
    return np.clip(bvn, 0.0, 1.0) + 0.0


def bvn_upper_tail(h: float, k: float, rho: float) -> float:
    return float(bvn_upper_tail_many(np.array([h]), np.array([k]), rho)[0])
