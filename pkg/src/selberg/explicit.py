"""The explicit formula for a Selberg-class datum, term by term.

For a test function u with Fourier transform v(r) = int u(x) e^{irx} dx,

    sum_gamma v(gamma) = m_F (v(-i/2) + v(i/2))                       pole
                       + (1/2pi) int v(r) phi_F(r) dr                    H
                       - sum_m Lambda(m)/sqrt(m) (b(m) u(log m)
                                                  + conj b(m) u(-log m))  D

with phi_F(r) = 2 log Q + 2 Re sum_j lam_j psi(lam_j (1/2 + ir) + mu_j).
The shifted kernel v(r) = h_mu(L(r - t)) corresponds to
u(x) = g_mu(x/L) e^{-itx} / L.
"""
from __future__ import annotations

import csv
import io
import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, IncompleteDataError
from .kernels import KernelParams, constants, g, h, h_complex_with_error
from .lfunc import SelbergDatum
from .special import digamma
from .zeros import ZeroList, deficit_bound, smoothed_zero_sum

CSV_FIELDS = ("t", "L", "mu", "zero_side", "pole", "H", "D", "residual", "budget")

_PANEL_NODES = 8
_CHECK_NODES = 12
_ROUNDOFF = 1e-14


# --------------------------------------------------------------------------
# the archimedean factor

def log_conductor(datum: SelbergDatum) -> float:
    """log(Q^2 prod lam_j^{2 lam_j}); the constant in the smooth zero count."""
    return 2 * math.log(datum.q_param) + sum(2 * gf.lam * math.log(gf.lam) for gf in datum.gamma_factors)


def gamma_log_derivative(datum: SelbergDatum, r) -> np.ndarray:
    """2 Re sum_j lam_j psi(lam_j (1/2 + ir) + mu_j) for real r."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    for gf in datum.gamma_factors:
        out += 2.0 * gf.lam * digamma(gf.lam * (0.5 + 1j * r) + gf.mu_shift).real
    return out


def gamma_log_derivative_majorant(datum: SelbergDatum, r) -> np.ndarray:
    """Upper bound for |gamma_log_derivative(r)|.

    Uses |psi(z)| <= log(1 + |z|) + pi/2 + 1 + 1/Re z for Re z > 0, from
    psi(z) = psi(z + 1) - 1/z and |psi(w) - log w| <= 1/|w| for Re w >= 1.
    """
    r = np.abs(np.asarray(r, dtype=float))
    out = np.zeros_like(r)
    for gf in datum.gamma_factors:
        mu = complex(gf.mu_shift)
        re = gf.lam / 2 + mu.real
        size = gf.lam * (0.5 + r) + abs(mu)
        out += 2.0 * gf.lam * (np.log1p(size) + math.pi / 2 + 1 + 1 / re)
    return out


@lru_cache(maxsize=8)
def _gl(n):
    return np.polynomial.legendre.leggauss(n)


def _panel_integral(f, a: float, width: float, n_panels: int, nodes: int) -> float:
    x, w = _gl(nodes)
    total = 0.0
    chunk = 4096
    for start in range(0, n_panels, chunk):
        k = np.arange(start, min(n_panels, start + chunk))
        left = a + k * width
        pts = (left[:, None] + 0.5 * width * (x[None, :] + 1)).ravel()
        vals = f(pts).reshape(len(k), nodes)
        total += float(np.sum(vals @ w)) * 0.5 * width
    return total


def _half_line(f: Callable, start: float, direction: float) -> float:
    """int of f from start to direction * infinity, for f decaying at least like r^-2.

    quad over panels [2^k, 2^{k+1}] of the offset from start; stops once a
    panel adds < 1e-6 of the total. With that decay each later panel is at
    most half the previous one, so the last panel is added once more to
    cover the remainder.
    """
    fx = lambda x: f(start + direction * x)
    total = quad(fx, 0.0, 1.0, limit=200)[0]
    a = 1.0
    piece = 0.0
    for _ in range(200):
        piece = quad(fx, a, 2 * a, limit=200)[0]
        total += piece
        a *= 2
        if piece <= 1e-6 * total:
            break
    return total + piece


def arch_integral(datum: SelbergDatum, v: Callable, v_bound: Callable, center: float,
                  freq: float, tol: float) -> tuple[float, float]:
    """(1/2pi) int v(r) * gamma_log_derivative(r) dr with an error bound.

    The window [center - U, center + U] is widened until the majorant tail
    v_bound * gamma_log_derivative_majorant is below tol/2; inside, fixed
    Gauss-Legendre panels of half the oscillation period pi/freq are used and
    the quadrature error is estimated against a higher-order rule.
    """
    if not datum.gamma_factors:
        return 0.0, 0.0
    if tol <= 0:
        raise DomainError("tol must be > 0")

    def tail(U):
        f = lambda r: float(v_bound(r) * gamma_log_derivative_majorant(datum, r))
        right = _half_line(f, center + U, 1.0)
        left = _half_line(f, center - U, -1.0)
        return (right + left) / (2 * math.pi)

    U = max(20.0, 40 * math.pi / freq)
    t_bound = tail(U)
    while t_bound > tol / 2:
        U *= 2
        t_bound = tail(U)
    width = min(math.pi / freq, 0.5)
    n_panels = int(math.ceil(2 * U / width))
    width = 2 * U / n_panels

    def integrand(r):
        return np.real(v(r)) * gamma_log_derivative(datum, r)

    lo = center - U
    val = _panel_integral(integrand, lo, width, n_panels, _PANEL_NODES) / (2 * math.pi)
    chk = _panel_integral(integrand, lo, width, n_panels, _CHECK_NODES) / (2 * math.pi)
    err = abs(chk - val) + t_bound + _ROUNDOFF * n_panels * abs(chk)
    return chk, err


class _ArchCache:
    """Memo of arch_term results; concurrent reads, writes under a lock."""

    def __init__(self):
        self._data = {}
        self._lock = threading.Lock()

    def get(self, key):
        return self._data.get(key)

    def put(self, key, value):
        with self._lock:
            self._data.setdefault(key, value)


_ARCH_CACHE = _ArchCache()


def _datum_key(datum: SelbergDatum):
    return (datum.q_param, tuple((gf.lam, complex(gf.mu_shift)) for gf in datum.gamma_factors))


def _kernel_tail(datum: SelbergDatum, params: KernelParams, tmax: float, U: float) -> float:
    k = constants(params)
    L, mu = params.L, params.mu

    def f(s):
        d = L * s
        vb = k.h0 if d == 0 else min(k.h0, k.c_mu * d ** (-mu))
        return float(vb * gamma_log_derivative_majorant(datum, tmax + s))

    return 2 * _half_line(f, U, 1.0) / (2 * math.pi)


def arch_term_grid(datum: SelbergDatum, params: KernelParams, ts, tol: float = 1e-8):
    """H_F(t, L, mu) and error bounds for every t in ts on one shared kernel grid.

    H = 2 log Q g_mu(0) / L + (1/2pi) int h_mu(L s) gamma_log_derivative(t + s) ds.
    The offset window |s| <= U is sized for the largest |t| (the majorant of
    the digamma part grows with |r|), the kernel is evaluated once on it, and
    the quadrature error is estimated against a higher-order panel rule.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    k = constants(params)
    L = params.L
    const = 2.0 * math.log(datum.q_param) * k.g0 / L
    if not datum.gamma_factors:
        return np.full(len(ts), const), np.full(len(ts), _ROUNDOFF * abs(const))
    if tol <= 0:
        raise DomainError("tol must be > 0")
    tmax = float(np.max(np.abs(ts)))
    U = max(20.0, 40 * math.pi / L)
    t_bound = _kernel_tail(datum, params, tmax, U)
    while t_bound > tol / 2:
        U *= 2
        t_bound = _kernel_tail(datum, params, tmax, U)
    width = min(math.pi / L, 0.5)
    n_panels = int(math.ceil(2 * U / width))
    width = 2 * U / n_panels
    left = -U + width * np.arange(n_panels)
    rules = []
    for nodes in (_PANEL_NODES, _CHECK_NODES):
        x, w = _gl(nodes)
        s = (left[:, None] + 0.5 * width * (x[None, :] + 1)).ravel()
        wt = np.tile(w, n_panels) * 0.5 * width * h(params, L * s) / (2 * math.pi)
        rules.append((s, wt))
    vals = np.empty(len(ts))
    errs = np.empty(len(ts))
    for i, t in enumerate(ts):
        lo = float(rules[0][1] @ gamma_log_derivative(datum, t + rules[0][0]))
        hi = float(rules[1][1] @ gamma_log_derivative(datum, t + rules[1][0]))
        vals[i] = const + hi
        errs[i] = abs(hi - lo) + t_bound + _ROUNDOFF * (n_panels * abs(hi) + abs(const))
    return vals, errs


def arch_term(datum: SelbergDatum, params: KernelParams, t: float, tol: float = 1e-8) -> tuple[float, float]:
    """H_F(t, L, mu) = (1/2pi) int h_mu(L(r - t)) phi_F(r) dr and an error bound."""
    key = (_datum_key(datum), params.mu, params.L, float(t), tol)
    hit = _ARCH_CACHE.get(key)
    if hit is not None:
        return hit
    v, e = arch_term_grid(datum, params, [t], tol)
    out = (float(v[0]), float(e[0]))
    _ARCH_CACHE.put(key, out)
    return out


# --------------------------------------------------------------------------
# prime and pole terms

def _prime_data(datum: SelbergDatum, m_max: float):
    need = int(math.floor(m_max))
    if need >= 2 and datum.coefficient_horizon < need:
        raise IncompleteDataError(
            f"{datum.name}: prime sum needs coefficients up to floor(e^L) = {need}, "
            f"horizon is {datum.coefficient_horizon}; rebuild the datum with a larger horizon"
        )
    m, lam, b = datum.prime_power_arrays
    keep = m <= m_max
    return m[keep].astype(float), lam[keep], b[keep]


def prime_term_pair(datum: SelbergDatum, params: KernelParams, t) -> tuple[np.ndarray, np.ndarray]:
    """The two conjugate sub-sums of D_F(t, L, mu), each already divided by L."""
    L = params.L
    m, lam, b = _prime_data(datum, math.exp(L))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if len(m) == 0:
        z = np.zeros(len(t), dtype=complex)
        return z, z.copy()
    logm = np.log(m)
    weight = lam * g(params, logm / L) / np.sqrt(m)
    phase = np.exp(-1j * np.outer(t, logm))
    first = phase @ (b * weight) / L
    second = np.conj(phase) @ (np.conj(b) * weight) / L
    return first, second


def prime_term(datum: SelbergDatum, params: KernelParams, t):
    """D_F(t, L, mu): a finite sum over prime powers m <= e^L, real for real t."""
    first, second = prime_term_pair(datum, params, t)
    total = first + second
    out = total.real
    return float(out[0]) if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class PoleTerm:
    value: float
    error: float
    literal: complex


def pole_term(datum: SelbergDatum, params: KernelParams, t: float) -> PoleTerm:
    """m_F (v(i/2) + v(-i/2)) for v(r) = h_mu(L(r - t)), i.e. 2 m_F Re h_mu(L(t + i/2)).

    ``literal`` is the other reading m_F (h(L(-i/2 - t)) + h(L(i/2 + t))),
    which differs from the value by its imaginary part.
    """
    if datum.pole_order == 0:
        return PoleTerm(0.0, 0.0, 0j)
    z = params.L * complex(t, 0.5)
    hz, err = h_complex_with_error(params, z)
    mf = datum.pole_order
    return PoleTerm(2 * mf * hz.real, 2 * mf * err, 2 * mf * hz)


# --------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class ExplicitFormulaReport:
    t: float
    L: float
    mu: float
    zero_side: float
    pole_term: float
    arch_term_H: float
    prime_term_D: float
    budget: float
    parts: dict = field(default_factory=dict, compare=False)
    pole_literal: complex = 0j

    def __post_init__(self):
        if not self.budget >= 0:
            raise DomainError("budget must be >= 0")

    @property
    def residual(self) -> float:
        return self.zero_side - self.pole_term - self.arch_term_H + self.prime_term_D

    @property
    def ok(self) -> bool:
        return abs(self.residual) <= self.budget

    def row(self) -> dict:
        return {
            "t": self.t, "L": self.L, "mu": self.mu, "zero_side": self.zero_side,
            "pole": self.pole_term, "H": self.arch_term_H, "D": self.prime_term_D,
            "residual": self.residual, "budget": self.budget,
        }

    def minus(self, other: "ExplicitFormulaReport") -> "ExplicitFormulaReport":
        """Term-by-term difference, e.g. F minus G at the same (t, L, mu)."""
        return ExplicitFormulaReport(
            t=self.t, L=self.L, mu=self.mu,
            zero_side=self.zero_side - other.zero_side,
            pole_term=self.pole_term - other.pole_term,
            arch_term_H=self.arch_term_H - other.arch_term_H,
            prime_term_D=self.prime_term_D - other.prime_term_D,
            budget=self.budget + other.budget,
        )

    def text(self) -> str:
        flag = "ok" if self.ok else "FAIL"
        return (f"t={self.t:g} L={self.L:g} mu={self.mu:g}  Z={self.zero_side:.12g}  "
                f"pole={self.pole_term:.12g}  H={self.arch_term_H:.12g}  D={self.prime_term_D:.12g}  "
                f"residual={self.residual:.3e}  budget={self.budget:.3e}  [{flag}]")


def format_float(x: float) -> str:
    return repr(float(x))


def reports_to_csv(reports: Sequence[ExplicitFormulaReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for rep in reports:
        row = rep.row()
        w.writerow([format_float(row[k]) for k in CSV_FIELDS])
    return buf.getvalue()


def shifted_explicit_formula(datum: SelbergDatum, zeros: ZeroList, params: KernelParams,
                             t: float, tol: float = 1e-8) -> ExplicitFormulaReport:
    zero_side, zero_tail = smoothed_zero_sum(
        zeros, params, t, trunc_tol=tol, degree=datum.degree, log_conductor=log_conductor(datum))
    pole = pole_term(datum, params, t)
    H, H_err = arch_term(datum, params, t, tol)
    D = prime_term(datum, params, t)
    rounding = _ROUNDOFF * (abs(zero_side) * max(1.0, len(zeros)) + abs(D) * 100 + abs(H) + abs(pole.value))
    parts = {"zero_tail": zero_tail, "pole": pole.error, "H": H_err, "rounding": rounding}
    return ExplicitFormulaReport(
        t=float(t), L=params.L, mu=params.mu, zero_side=zero_side, pole_term=pole.value,
        arch_term_H=H, prime_term_D=D, budget=sum(parts.values()), parts=parts,
        pole_literal=pole.literal,
    )


# --------------------------------------------------------------------------
# general test-function pairs

@dataclass(frozen=True)
class TestFunctionPair:
    """A C^2 function u supported in [-R, R] with v(r) = int u(x) e^{irx} dx.

    u must satisfy u(-x) = conj u(x) so that v is real on the real line.
    ``v_bound(r)`` is a majorant of |v(r)| for real r, and ``center`` the point
    v is concentrated around.
    """

    __test__ = False

    u: Callable
    v: Callable
    support_radius: float
    v_bound: Callable
    center: float = 0.0
    name: str = ""

    def check(self, n: int = 2001, rtol: float = 1e-9) -> None:
        R = self.support_radius
        outside = np.array([R * 1.0001, R * 1.5, -R * 1.0001, -R * 1.5])
        if np.max(np.abs(self.u(outside))) > 0:
            raise DomainError(f"{self.name}: u is not supported in [-{R}, {R}]")
        x = np.linspace(0, R * 1.05, 200)
        if np.max(np.abs(self.u(-x) - np.conj(self.u(x)))) > rtol * max(1.0, np.max(np.abs(self.u(x)))):
            raise DomainError(f"{self.name}: u(-x) != conj u(x); v would not be real")
        scale = max(np.max(np.abs(self.u(np.linspace(-R, R, n)))), 1e-300)
        d2 = []
        for m in (n, 2 * n - 1):
            xs = np.linspace(-1.1 * R, 1.1 * R, m)
            step = xs[1] - xs[0]
            us = self.u(xs)
            d2.append(np.max(np.abs(us[2:] - 2 * us[1:-1] + us[:-2])) / step**2 / scale)
        if d2[1] > 1.5 * d2[0] + 1e-6:
            raise DomainError(f"{self.name}: second differences grow under refinement; u is not C^2")


def kernel_pair(params: KernelParams, t: float = 0.0) -> TestFunctionPair:
    """u(x) = g_mu(x/L) e^{-itx} / L, v(r) = h_mu(L(r - t))."""
    L = params.L
    k = constants(params)

    def u(x):
        x = np.asarray(x, dtype=float)
        return g(params, x / L) * np.exp(-1j * t * x) / L

    def v(r):
        if np.iscomplexobj(r) or isinstance(r, complex):
            return h_complex_with_error(params, L * (complex(r) - t))[0]
        return h(params, L * (np.asarray(r, dtype=float) - t))

    def v_bound(r):
        d = abs(L * (r - t))
        return k.h0 if d == 0 else min(k.h0, k.c_mu * d ** (-params.mu))

    return TestFunctionPair(u, v, L, v_bound, center=t, name=f"kernel(mu={params.mu}, L={L}, t={t})")


def cosine_bump_pair(radius: float) -> TestFunctionPair:
    """u(x) = cos^4(pi x / 2R) on [-R, R], a C^3 bump, with its closed-form transform."""
    R = float(radius)
    a = math.pi / R

    def u(x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) < R, np.cos(0.5 * a * x) ** 4, 0.0)

    def sinpart(w):
        # int_{-R}^{R} cos(w x) dx = 2R sinc(wR/pi) with numpy's normalised sinc
        return 2 * R * np.sinc(w * R / math.pi)

    def v(r):
        r = np.asarray(r)
        return (3 * sinpart(r) + 2 * (sinpart(r + a) + sinpart(r - a))
                + 0.5 * (sinpart(r + 2 * a) + sinpart(r - 2 * a))) / 8

    def v_bound(r):
        r = abs(r)
        # |v| <= int |u| = 3R/4;  |v| <= int |u''''| / r^4 <= 5 R a^4 / r^4
        return min(0.75 * R, 5 * R * a**4 / r**4) if r > 0 else 0.75 * R

    return TestFunctionPair(u, v, R, v_bound, 0.0, name=f"cos^4 bump R={R:g}")


def general_explicit_formula(datum: SelbergDatum, zeros: ZeroList, pair: TestFunctionPair,
                             tol: float = 1e-8, t_label: float = 0.0, L_label: float = float("nan"),
                             mu_label: float = float("nan")) -> ExplicitFormulaReport:
    """All four terms for an arbitrary test-function pair."""
    pair.check()
    R = pair.support_radius
    gam = zeros.signed()
    zero_side = float(np.sum(np.real(pair.v(gam)))) if len(gam) else 0.0
    zero_tail = deficit_bound(pair.v_bound, zeros.complete_to, datum.degree, log_conductor(datum),
                              peaks=(pair.center,))
    if datum.pole_order:
        vp = pair.v(0.5j)
        vm = pair.v(-0.5j)
        pole = float(np.real(datum.pole_order * (vp + vm)))
        literal = complex(datum.pole_order * (vp + vm))
    else:
        pole, literal = 0.0, 0j
    u0 = complex(np.asarray(pair.u(np.array([0.0])))[0])
    const = 2 * math.log(datum.q_param) * u0.real
    H, H_err = arch_integral(datum, pair.v, pair.v_bound, pair.center, R, tol)
    H += const
    m, lam, b = _prime_data(datum, math.exp(R))
    if len(m):
        logm = np.log(m)
        terms = lam / np.sqrt(m) * (b * pair.u(logm) + np.conj(b) * pair.u(-logm))
        D = float(np.sum(terms).real)
    else:
        D = 0.0
    rounding = _ROUNDOFF * (abs(zero_side) * max(1.0, len(gam)) + abs(D) * 100 + abs(H) + abs(pole))
    parts = {"zero_tail": zero_tail, "H": H_err, "rounding": rounding}
    return ExplicitFormulaReport(
        t=t_label, L=L_label, mu=mu_label, zero_side=zero_side, pole_term=pole,
        arch_term_H=H, prime_term_D=D, budget=sum(parts.values()), parts=parts, pole_literal=literal,
    )
