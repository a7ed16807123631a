"""The compactly supported kernel g_mu and its Fourier transform h_mu.

    g_mu(x) = 2^{2mu} / (pi sqrt(mu) binom(2mu, mu)) * (1 - x^2)^{mu - 1/2},  |x| <= 1
    h_mu(t) = Gamma(mu + 1) / sqrt(mu) * J_mu(|t|) * (2 / |t|)^mu

with the convention h(t) = int g(x) e^{ixt} dx, so h(0) = 1/sqrt(mu) and
g(x) = (1/2pi) int h(t) e^{-ixt} dt.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .errors import DomainError, NumericError
from .special import bessel_j, bessel_j_scaled, log_binom_central

__all__ = [
    "KernelParams",
    "KernelConstants",
    "constants",
    "g",
    "bessel_j",
    "h",
    "h_complex",
    "h_complex_with_error",
    "asymp_bound",
]

MU_MIN = 3.0


@dataclass(frozen=True)
class KernelParams:
    mu: float
    L: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu >= MU_MIN):
            raise DomainError(f"mu must be >= {MU_MIN} (g_mu is only C^2 there), got {self.mu}")
        if not (math.isfinite(self.L) and self.L > 0):
            raise DomainError(f"L must be > 0, got {self.L}")


@dataclass(frozen=True)
class KernelConstants:
    c_mu: float
    g0: float
    h0: float


def _log_c_mu(mu: float) -> float:
    return math.lgamma(mu + 1.0) + mu * math.log(2.0) - 0.5 * math.log(mu)


def _g_prefactor(mu: float) -> float:
    return math.exp(2.0 * mu * math.log(2.0) - log_binom_central(mu)) / (math.pi * math.sqrt(mu))


def constants(params: KernelParams) -> KernelConstants:
    mu = params.mu
    return KernelConstants(
        c_mu=math.exp(_log_c_mu(mu)),
        g0=_g_prefactor(mu),
        h0=1.0 / math.sqrt(mu),
    )


def g(params: KernelParams, x):
    mu = params.mu
    arr = np.asarray(x, dtype=float)
    inside = np.abs(arr) < 1.0
    base = np.where(inside, 1.0 - arr * arr, 0.0)
    out = np.where(inside, _g_prefactor(mu) * base ** (mu - 0.5), 0.0)
    return float(out) if out.ndim == 0 else out


def h(params: KernelParams, t):
    mu = params.mu
    pref = math.exp(math.lgamma(mu + 1.0)) / math.sqrt(mu)
    out = pref * bessel_j_scaled(mu, t)
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=64)
def _gauss_legendre(n: int):
    # scipy switches to an O(n) asymptotic method for large n; numpy's
    # eigenvalue route is cubic and dominates the run time above ~1000 nodes
    x, w = roots_legendre(n)
    return x, w


def _node_count(params: KernelParams, z: complex) -> int:
    n = int(abs(z.real) + abs(z.imag) + 8 * params.mu + 64)
    return n + (-n) % 16


def _gl_transform(params: KernelParams, z: complex, n: int) -> complex:
    x, w = _gauss_legendre(n)
    return complex(np.sum(w * g(params, x) * np.cos(z * x)))


def h_complex_with_error(params: KernelParams, z: complex, rtol: float = 1e-13,
                         max_nodes: int = 1 << 16) -> tuple[complex, float]:
    """Return (h_mu(z), error estimate) for complex z by Gauss-Legendre.

    The error estimate is the change between n and 2n nodes; node counts are
    doubled until it falls below rtol * max(1, |value|).
    """
    z = complex(z)
    if abs(z.imag) > 700:
        raise NumericError(
            f"|Im z| = {abs(z.imag):.3g} overflows binary64 (h grows like e^|Im z|); reduce L"
        )
    n = _node_count(params, z)
    prev = _gl_transform(params, z, n)
    while True:
        n *= 2
        cur = _gl_transform(params, z, n)
        err = abs(cur - prev)
        if err <= rtol * max(1.0, abs(cur)):
            return cur, err
        if n >= max_nodes:
            raise NumericError(
                f"h_complex({z}) did not converge with {n} nodes", achieved=err
            )
        prev = cur


def h_complex(params: KernelParams, z: complex) -> complex:
    return h_complex_with_error(params, z)[0]


def asymp_bound(params: KernelParams, t):
    """C_mu |t|^{-mu}, a majorant of |h_mu(t)| since |J_mu| <= 1."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr == 0):
        raise DomainError("asymp_bound is undefined at t = 0")
    out = np.exp(_log_c_mu(params.mu) - params.mu * np.log(np.abs(arr)))
    return float(out) if out.ndim == 0 else out
