"""Special functions used by the kernel pair and the archimedean term.

Only what the rest of the package needs: Bessel J of real order >= 0 on the
real line, the entire function (2/t)^nu J_nu(t) (kept separate so small
arguments never divide), and the digamma function on the right half plane.
All functions accept scalars or numpy arrays and work in binary64.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

# Below this the ascending series loses < 1 digit to cancellation.
SERIES_MAX_T = 2.0
_SERIES_TERMS = 40

# B_{2k} / (2k), k = 1..6
_PSI_ASYMP = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
)
_PSI_SHIFT_TO = 8.0


def hankel_threshold(nu: float) -> float:
    """Smallest argument where the large-argument expansion is used."""
    return max(30.0, nu * nu)


def _check_order(nu: float) -> float:
    nu = float(nu)
    if not math.isfinite(nu) or nu < 0:
        raise DomainError(f"Bessel order must be a finite real >= 0, got {nu}")
    return nu


def _scaled_series(nu: float, t: np.ndarray) -> np.ndarray:
    # sum_k (-1)^k (t^2/4)^k / (k! Gamma(k + nu + 1))
    q = -(t * t) / 4.0
    term = np.full_like(t, math.exp(-math.lgamma(nu + 1.0)))
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * (k + nu))
        total += term
    return total


def _hankel(nu: float, t: np.ndarray, n_terms: int = 40) -> np.ndarray:
    mu4 = 4.0 * nu * nu
    p = np.ones_like(t)
    q = np.zeros_like(t)
    term = np.ones_like(t)
    for k in range(1, n_terms):
        term = term * (mu4 - (2 * k - 1) ** 2) / (k * 8.0 * t)
        if k % 2 == 1:
            q += term * (1 if (k // 2) % 2 == 0 else -1)
        else:
            p += term * (1 if (k // 2) % 2 == 0 else -1)
        if np.all(np.abs(term) < 1e-17):
            break
    omega = t - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * t)) * (p * np.cos(omega) - q * np.sin(omega))


def _miller(nu: float, t: np.ndarray) -> np.ndarray:
    """Backward recurrence from a high order, normalised with
    (t/2)^f = sum_k (f+2k) Gamma(f+k)/k! J_{f+2k}(t), f = frac(nu)."""
    n0 = int(math.floor(nu))
    f = nu - n0
    tmax = float(np.max(t))
    start = int(tmax + 10.0 * tmax ** (1.0 / 3.0) + 40) + n0
    if (start % 2) == 1:
        start += 1
    j_next = np.zeros_like(t)  # order f + start + 1
    j_cur = np.full_like(t, 1e-30)  # order f + start
    target = np.zeros_like(t)
    norm = np.zeros_like(t)
    for n in range(start, -1, -1):
        # j_cur holds order f + n
        if n == n0:
            target = j_cur.copy()
        if n % 2 == 0:
            k = n // 2
            if k == 0:
                w = math.gamma(f + 1.0)
            else:
                w = (f + 2 * k) * math.exp(math.lgamma(f + k) - math.lgamma(k + 1.0))
            norm += w * j_cur
        if n == 0:
            break
        order = f + n
        j_prev = (2.0 * order / t) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            j_cur *= scale
            j_next *= scale
            target *= scale
            norm *= scale
    return (t / 2.0) ** f * target / norm


def _bessel_nonneg(nu: float, t: np.ndarray) -> np.ndarray:
    out = np.empty_like(t)
    small = t <= SERIES_MAX_T
    large = t >= hankel_threshold(nu)
    mid = ~(small | large)
    if np.any(small):
        ts = t[small]
        out[small] = _scaled_series(nu, ts) * (ts / 2.0) ** nu
    if np.any(mid):
        out[mid] = _miller(nu, t[mid])
    if np.any(large):
        out[large] = _hankel(nu, t[large])
    return out


def bessel_j(nu: float, t):
    """Bessel function of the first kind J_nu(t) for real order nu >= 0.

    Negative t is accepted only for integer order (J_n(-t) = (-1)^n J_n(t)).
    """
    nu = _check_order(nu)
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    neg = arr < 0
    if np.any(neg):
        if nu != math.floor(nu):
            raise DomainError("J_nu(t) for t < 0 is complex unless nu is an integer")
    res = _bessel_nonneg(nu, np.abs(arr))
    if np.any(neg) and int(nu) % 2 == 1:
        res = np.where(neg, -res, res)
    return float(res[0]) if scalar else res


def bessel_j_scaled(nu: float, t):
    """(2/|t|)^nu J_nu(|t|), continuous at 0 with value 1/Gamma(nu + 1)."""
    nu = _check_order(nu)
    arr = np.abs(np.asarray(t, dtype=float))
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    small = arr <= SERIES_MAX_T
    if np.any(small):
        out[small] = _scaled_series(nu, arr[small])
    if np.any(~small):
        tl = arr[~small]
        out[~small] = _bessel_nonneg(nu, tl) * (2.0 / tl) ** nu
    return float(out[0]) if scalar else out


def log_binom_central(mu: float) -> float:
    """log binom(2 mu, mu) for real mu, without forming the binomial."""
    return float(gammaln(2.0 * mu + 1.0) - 2.0 * gammaln(mu + 1.0))


def digamma(z):
    """psi(z) for complex z; reflection for Re z < 1/2, upward recurrence
    to Re z >= 8, then the Stirling series through B_12."""
    arr = np.asarray(z)
    is_real = not np.iscomplexobj(arr)
    scalar = arr.ndim == 0
    w = np.atleast_1d(arr.astype(complex))
    if np.any((w.real <= 0) & (w.imag == 0) & (w.real == np.round(w.real))):
        raise DomainError("digamma has poles at non-positive integers")
    reflect = w.real < 0.5
    refl_term = np.zeros_like(w)
    if np.any(reflect):
        zr = w[reflect]
        refl_term[reflect] = -math.pi / np.tan(math.pi * zr)
        w = np.where(reflect, 1.0 - w, w)
    acc = np.zeros_like(w)
    n_shift = int(max(0.0, math.ceil(_PSI_SHIFT_TO - float(np.min(w.real)))))
    for _ in range(n_shift):
        low = w.real < _PSI_SHIFT_TO
        if not np.any(low):
            break
        acc = np.where(low, acc - 1.0 / w, acc)
        w = np.where(low, w + 1.0, w)
    inv2 = 1.0 / (w * w)
    series = np.zeros_like(w)
    for c in reversed(_PSI_ASYMP):
        series = (series + c) * inv2
    res = np.log(w) - 0.5 / w - series + acc
    res = np.where(reflect, res + refl_term, res)
    if is_real:
        res = res.real
    return res[0] if scalar else res
