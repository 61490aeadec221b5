# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Numerical kernels, compiled implementation.

Same call surface and the same algorithms as ``irrsel._kernels_py``:
erfc-based normal CDF, Acklam-plus-Halley normal quantile, and the
Drezner-Wesolowsky / Genz fixed-order scheme for the bivariate normal
upper tail (split at |rho| = 0.925).
"""

from libc.math cimport asin, erfc, exp, fabs, log, sin, sqrt

import numpy as np

NAME = "c"

cdef double SQRT1_2 = sqrt(0.5)
cdef double TWO_PI = 6.283185307179586476925286766559
cdef double SQRT_TWO_PI = 2.506628274631000502415765284811

# Acklam's inverse-normal coefficients (central and tail rational forms).
cdef double[6] QA = [-3.969683028665376e+01, 2.209460984245205e+02,
                     -2.759285104469687e+02, 1.383577518672690e+02,
                     -3.066479806614716e+01, 2.506628277459239e+00]
cdef double[5] QB = [-5.447609879822406e+01, 1.615858368580409e+02,
                     -1.556989798598866e+02, 6.680131188771972e+01,
                     -1.328068155288572e+01]
cdef double[6] QC = [-7.784894002430293e-03, -3.223964580411365e-01,
                     -2.400758277161838e+00, -2.549732539343734e+00,
                     4.374664141464968e+00, 2.938163982698783e+00]
cdef double[4] QD = [7.784695709041462e-03, 3.224671290700398e-01,
                     2.445134137142996e+00, 3.754408661907416e+00]
cdef double P_LOW = 0.02425

# Gauss-Legendre half-weights/nodes used by the bivariate-normal scheme.
cdef double[3] GLW6 = [0.1713244923791705, 0.3607615730481384,
                       0.4679139345726904]
cdef double[3] GLX6 = [0.9324695142031522, 0.6612093864662647,
                       0.2386191860831970]
cdef double[6] GLW12 = [0.04717533638651177, 0.1069393259953183,
                        0.1600783285433464, 0.2031674267230659,
                        0.2334925365383547, 0.2491470458134029]
cdef double[6] GLX12 = [0.9815606342467191, 0.9041172563704750,
                        0.7699026741943050, 0.5873179542866171,
                        0.3678314989981802, 0.1252334085114692]
cdef double[10] GLW20 = [0.01761400713915212, 0.04060142980038694,
                         0.06267204833410906, 0.08327674157670475,
                         0.1019301198172404, 0.1181945319615184,
                         0.1316886384491766, 0.1420961093183821,
                         0.1491729864726037, 0.1527533871307259]
cdef double[10] GLX20 = [0.9931285991850949, 0.9639719272779138,
                         0.9122344282513259, 0.8391169718222188,
                         0.7463319064601508, 0.6360536807265150,
                         0.5108670019508271, 0.3737060887154196,
                         0.2277858511416451, 0.07652652113349733]


cdef inline double _cdf(double z) noexcept nogil:
    return 0.5 * erfc(-z * SQRT1_2)


cdef double _quantile(double p) noexcept nogil:
    cdef double q = p - 0.5
    cdef double r, s, x, err, u
    if fabs(q) <= 0.5 - P_LOW:
        r = q * q
        x = (((((QA[0] * r + QA[1]) * r + QA[2]) * r + QA[3]) * r + QA[4]) * r + QA[5]) * q / \
            (((((QB[0] * r + QB[1]) * r + QB[2]) * r + QB[3]) * r + QB[4]) * r + 1.0)
    elif p < P_LOW:
        s = sqrt(-2.0 * log(p))
        x = (((((QC[0] * s + QC[1]) * s + QC[2]) * s + QC[3]) * s + QC[4]) * s + QC[5]) / \
            ((((QD[0] * s + QD[1]) * s + QD[2]) * s + QD[3]) * s + 1.0)
    else:
        s = sqrt(-2.0 * log(1.0 - p))
        x = -(((((QC[0] * s + QC[1]) * s + QC[2]) * s + QC[3]) * s + QC[4]) * s + QC[5]) / \
            ((((QD[0] * s + QD[1]) * s + QD[2]) * s + QD[3]) * s + 1.0)
    # One Halley refinement against the CDF; skipped where the normal
    # density underflows (|x| > 37).
    if fabs(x) < 37.0:
        err = _cdf(x) - p
        u = err * SQRT_TWO_PI * exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


cdef double _bvnu(double h, double k, double rho) noexcept nogil:
    cdef double hk, hs, asr, sn, bvn, ass, a, bs, c, d, b, sp, xs, rs, ep, asr_i, ell
    cdef double xi
    cdef int n, i, sign
    cdef const double* w
    cdef const double* x

    if rho == 1.0:
        return 1.0 - _cdf(h if h > k else k)
    if rho == -1.0:
        bvn = _cdf(-k) - _cdf(h)
        return bvn if bvn > 0.0 else 0.0
    if rho == 0.0:
        return _cdf(-h) * _cdf(-k)

    if fabs(rho) < 0.3:
        n = 3
        w = GLW6
        x = GLX6
    elif fabs(rho) < 0.75:
        n = 6
        w = GLW12
        x = GLX12
    else:
        n = 10
        w = GLW20
        x = GLX20

    hk = h * k
    bvn = 0.0
    if fabs(rho) < 0.925:
        hs = 0.5 * (h * h + k * k)
        asr = 0.5 * asin(rho)
        for i in range(n):
            for sign in range(-1, 2, 2):
                sn = sin(asr * (1.0 + sign * x[i]))
                bvn += w[i] * exp((sn * hk - hs) / (1.0 - sn * sn))
        bvn = bvn * asr / TWO_PI + _cdf(-h) * _cdf(-k)
    else:
        if rho < 0.0:
            k = -k
            hk = -hk
        ass = (1.0 - rho) * (1.0 + rho)
        a = sqrt(ass)
        bs = (h - k) * (h - k)
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 80.0
        asr = -0.5 * (bs / ass + hk)
        if asr > -100.0:
            bvn = a * exp(asr) * (1.0 - c * (bs - ass) * (1.0 - d * bs) / 3.0
                                  + c * d * ass * ass)
        if hk > -100.0:
            b = sqrt(bs)
            sp = SQRT_TWO_PI * _cdf(-b / a)
            bvn -= exp(-0.5 * hk) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0)
        a *= 0.5
        for i in range(n):
            for sign in range(-1, 2, 2):
                xi = a * (1.0 + sign * x[i])
                xs = xi * xi
                asr_i = -0.5 * (bs / xs + hk)
                if asr_i > -100.0:
                    rs = sqrt(1.0 - xs)
                    sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs)
                    ep = exp(-0.5 * hk * xs / ((1.0 + rs) * (1.0 + rs))) / rs
                    bvn += a * w[i] * exp(asr_i) * (ep - sp)
        bvn = -bvn / TWO_PI
        if rho > 0.0:
            bvn += _cdf(-(h if h > k else k))
        else:
            bvn = -bvn
            if k > h:
                if h < 0.0:
                    ell = _cdf(k) - _cdf(h)
                else:
                    ell = _cdf(-h) - _cdf(-k)
                bvn += ell

    if bvn < 0.0:
        return 0.0
    if bvn > 1.0:
        return 1.0
    return bvn


def std_normal_cdf(double z):
    return _cdf(z)


def std_normal_quantile(double p):
    return _quantile(p)


def bvn_upper_tail(double h, double k, double rho):
    return _bvnu(h, k, rho)


def std_normal_cdf_many(z):
    cdef double[::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    out = np.empty(zv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(zv.shape[0]):
        ov[i] = _cdf(zv[i])
    return out


def std_normal_quantile_many(p):
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    out = np.empty(pv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(pv.shape[0]):
        ov[i] = _quantile(pv[i])
    return out


def bvn_upper_tail_many(h, k, double rho):
    cdef double[::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef double[::1] kv = np.ascontiguousarray(k, dtype=np.float64)
    if hv.shape[0] != kv.shape[0]:
        raise ValueError("h and k must have equal length")
    out = np.empty(hv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(hv.shape[0]):
        ov[i] = _bvnu(hv[i], kv[i], rho)
    return out
