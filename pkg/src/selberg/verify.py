"""Parameter schedule and numeric checks of the estimates used in the argument.

Only finite, proved inequalities are asserted (the pointwise bound on h_mu,
1 - x^2 >= e^{-2x^2}, nonnegativity, monotonicity). Every statement of the
form "X << Y" is reported as a fitted constant X / Y instead.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import trapezoid

from .errors import DomainError
from .explicit import arch_term_grid, prime_term
from .kernels import KernelParams, asymp_bound, constants, g, h
from .lfunc import Mode, SelbergDatum, primes_up_to

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# schedule

def rho(T: float, mode: Mode, log_T: float | None = None) -> float:
    lt = math.log(T) if log_T is None else log_T
    if mode == "i":
        if lt <= 1:
            raise DomainError("log log T must be positive")
        return lt / math.log(lt)
    if mode == "ii":
        return lt
    raise DomainError(f"mode must be 'i' or 'ii', got {mode!r}")


@dataclass(frozen=True)
class ParamSchedule:
    T: float
    W: float
    mode: Mode
    rho: float
    eps: float
    L: float
    mu: float

    @property
    def valid(self) -> bool:
        """Whether mu >= 3, i.e. the kernel is C^2."""
        return self.mu >= 3

    def kernel_params(self) -> KernelParams:
        return KernelParams(self.mu, self.L)


def schedule(T: float, W: float, mode: Mode, log_T: float | None = None) -> ParamSchedule:
    """rho(T), eps = 1/2W^2, L = W^2 rho log rho, mu = L / (2 W rho).

    ``log_T`` may be given instead of a huge T.
    """
    if W < 1:
        raise DomainError("W must be >= 1")
    if log_T is None and not T > 1:
        raise DomainError("T must be > 1")
    r = rho(T, mode, log_T)
    if r <= math.e:
        raise DomainError(f"rho(T) = {r:.4g} <= e: the schedule needs log rho > 1")
    L = W * W * r * math.log(r)
    mu = L / (2 * (W * r))
    return ParamSchedule(T=T if log_T is None else math.exp(min(log_T, 700.0)), W=W, mode=mode,
                         rho=r, eps=1.0 / (2 * W * W), L=L, mu=mu)


# --------------------------------------------------------------------------
# the archimedean term: asymptotics and an oscillatory integral

@dataclass(frozen=True)
class LemmaOneReport:
    t: float
    L: float
    mu: float
    T: float
    measured_H: float
    predicted: float
    e_mu: float
    quad_error: float

    @property
    def scaled_residual(self) -> float:
        return abs(self.measured_H - self.predicted) * self.L / self.e_mu


def e_mu(params: KernelParams, T: float) -> float:
    return constants(params).c_mu / T + 1.0


def lemma_one_check(datum: SelbergDatum, params: KernelParams, t_grid: Sequence[float], T: float,
                    tol: float = 1e-8) -> list[LemmaOneReport]:
    """Compare H_F(t) with g_mu(0) d_F log T / L; residual scaled by L / E_mu(T)."""
    ts = np.asarray(t_grid, dtype=float)
    if np.any(ts < T) or np.any(ts > 2 * T):
        raise DomainError("t_grid must lie in [T, 2T]")
    vals, errs = arch_term_grid(datum, params, ts, tol)
    k = constants(params)
    pred = k.g0 * datum.degree * math.log(T) / params.L
    em = e_mu(params, T)
    return [LemmaOneReport(float(t), params.L, params.mu, T, float(v), pred, em, float(e))
            for t, v, e in zip(ts, vals, errs)]


class LemmaTwo(NamedTuple):
    integral: complex
    bound: float
    ratio: float


def _gl_panels(a: float, b: float, max_width: float, nodes: int = 8):
    n = max(1, int(math.ceil((b - a) / max_width)))
    x, w = np.polynomial.legendre.leggauss(nodes)
    width = (b - a) / n
    left = a + width * np.arange(n)
    pts = (left[:, None] + 0.5 * width * (x[None, :] + 1)).ravel()
    wts = np.tile(w, n) * 0.5 * width
    return pts, wts


def lemma_two_check(F: SelbergDatum, G: SelbergDatum, params: KernelParams, T: float, m: int,
                    tol: float = 1e-7, conjugate: bool = False) -> LemmaTwo:
    """int_T^{2T} L m^{it} (H_F - H_G) dt against T(mu^{-1/4} + C_mu/T) + E_mu(2T) + E_mu(T).

    Gauss-Legendre panels no longer than a quarter period of m^{it}.
    """
    if abs(F.degree - G.degree) > 1e-12:
        raise DomainError(f"degrees differ ({F.degree} vs {G.degree})")
    if m < 2:
        raise DomainError("m must be >= 2")
    ts, ws = _gl_panels(T, 2 * T, math.pi / (2 * math.log(m)))
    hf, _ = arch_term_grid(F, params, ts, tol)
    hg, _ = arch_term_grid(G, params, ts, tol)
    sign = -1.0 if conjugate else 1.0
    osc = np.exp(sign * 1j * ts * math.log(m))
    integral = complex(np.sum(ws * params.L * osc * (hf - hg)))
    k = constants(params)
    bound = T * (params.mu ** -0.25 + k.c_mu / T) + e_mu(params, 2 * T) + e_mu(params, T)
    return LemmaTwo(integral, bound, abs(integral) / bound)


# --------------------------------------------------------------------------
# the tail integral of |h_mu|

class TailIntegral(NamedTuple):
    numeric: float
    bound: float
    closure: float

    @property
    def holds(self) -> bool:
        return self.numeric <= self.bound


def tail_integral_check(params: KernelParams, cutoff: float, upper: float | None = None) -> TailIntegral:
    """int_{|y| >= cutoff} |h_mu(y)| dy against 2 C_mu cutoff^{1-mu} / (mu - 1).

    The bound is the integral of the pointwise majorant C_mu |y|^{-mu}. The
    numeric value integrates |h| exactly between consecutive sign changes up
    to ``upper`` and closes the rest with the same majorant (``closure``).
    """
    if cutoff <= 0:
        raise DomainError("cutoff must be > 0")
    mu = params.mu
    if cutoff <= 2 and mu <= 3:
        log.warning("cutoff %.3g with mu = %.3g: slow decay, the majorant is loose", cutoff, mu)
    k = constants(params)
    Y = upper if upper is not None else max(2000.0, 50.0 * cutoff)
    grid = np.linspace(cutoff, Y, int((Y - cutoff) / 0.05) + 2)
    vals = h(params, grid)
    idx = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    x0, x1 = grid[idx], grid[idx + 1]
    y0, y1 = vals[idx], vals[idx + 1]
    roots = x0 - y0 * (x1 - x0) / (y1 - y0)
    breaks = np.concatenate([[cutoff], roots, [Y]])
    x, w = np.polynomial.legendre.leggauss(24)
    a, b = breaks[:-1], breaks[1:]
    pts = (a[:, None] + 0.5 * (b - a)[:, None] * (x[None, :] + 1))
    inner = np.sum(np.abs(h(params, pts.ravel())).reshape(pts.shape) * w[None, :], axis=1) * 0.5 * (b - a)
    one_side = float(np.sum(inner))
    closure = 2 * k.c_mu * Y ** (1 - mu) / (mu - 1)
    numeric = 2 * one_side + closure
    bound = 2 * k.c_mu * cutoff ** (1 - mu) / (mu - 1)
    return TailIntegral(numeric, bound, closure)


# --------------------------------------------------------------------------
# g lower bound

class GLowerBound(NamedTuple):
    g_value: float
    lower_bound: float

    @property
    def holds(self) -> bool:
        return self.g_value >= self.lower_bound * (1 - 1e-12)


def g_lower_bound_check(m: int, params: KernelParams) -> GLowerBound:
    """g_mu(log m / L) >= g_mu(0) exp(-2 (mu - 1/2) (log m / L)^2), valid for log m / L < 1/2."""
    if m < 2:
        raise DomainError("m must be >= 2")
    x = math.log(m) / params.L
    if x >= 0.5:
        raise DomainError(f"log m / L = {x:.4g} >= 1/2, outside the range of 1 - x^2 >= exp(-2x^2)")
    k = constants(params)
    return GLowerBound(g(params, x), k.g0 * math.exp(-2 * (params.mu - 0.5) * x * x))


# --------------------------------------------------------------------------
# mean square of the prime-term difference

class MeanSquare(NamedTuple):
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else (0.0 if self.lhs == 0 else math.inf)


def mean_square_check(F: SelbergDatum, G: SelbergDatum, params: KernelParams, T: float,
                      n_grid: int = 1024) -> MeanSquare:
    """Trapezoid value of int_T^{2T} (L (D_F - D_G))^2 dt and the majorant
    sum_{p <= e^{L/2}} |a_F(p^2) - a_G(p^2)|^2 (T + p) log^2 p / p^2."""
    if n_grid < 64:
        raise DomainError("n_grid must be >= 64")
    ts = np.linspace(T, 2 * T, n_grid)
    diff = params.L * (np.asarray(prime_term(F, params, ts)) - np.asarray(prime_term(G, params, ts)))
    lhs = float(trapezoid(diff * diff, ts))
    pmax = int(math.floor(math.exp(params.L / 2) * (1 + 1e-12)))
    rhs = 0.0
    for p in primes_up_to(pmax):
        p = int(p)
        d = abs(F.a(p * p) - G.a(p * p)) ** 2
        rhs += d * (T + p) * math.log(p) ** 2 / p**2
    return MeanSquare(lhs, rhs)


# --------------------------------------------------------------------------
# thin sets and condition envelopes

def thin_set_density_check(E: Sequence[int], delta: float, x_grid: Sequence[float]) -> float:
    """max over x of #{p in E : p <= x} / x^{1/2 - delta}."""
    if not 0 < delta < 0.5:
        raise DomainError("delta must lie in (0, 1/2)")
    xs = np.asarray(x_grid, dtype=float)
    if np.any(np.diff(xs) <= 0):
        raise DomainError("x_grid must be increasing")
    Es = np.sort(np.asarray(list(E), dtype=float))
    counts = np.searchsorted(Es, xs, side="right")
    return float(np.max(counts / xs ** (0.5 - delta))) if len(xs) else 0.0


def condition_ii_ratio(F: SelbergDatum, G: SelbergDatum, eps: float, x_grid: Sequence[float]) -> float:
    """max over x of the prime-square mean sum divided by exp(eps x / log x)."""
    from .lfunc import envelope_A, prime_square_mean_sum

    return max(prime_square_mean_sum(F, G, x) / envelope_A(eps, x, "ii") for x in x_grid)


def asymp_violations(params: KernelParams, ts) -> int:
    """Number of sample points where |h(t)| |t|^mu exceeds C_mu."""
    ts = np.asarray(ts, dtype=float)
    return int(np.count_nonzero(np.abs(h(params, ts)) > asymp_bound(params, ts)))
