"""Selberg-class data and Dirichlet-series arithmetic.

Normalisation of the Euler data: log F(s) = sum_m b(m) Lambda(m) / (m^s log m),
so -F'/F(s) = sum_m b(m) Lambda(m) m^{-s} and, at each prime, with X = p^{-s},

    log F_p(X) = sum_k b(p^k) X^k / k.

Coefficients are kept per prime power; a(m) is rebuilt from the local
factors on demand.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal, Mapping, Sequence

import numpy as np

from .errors import DomainError, IncompleteDataError, ResourceError

Mode = Literal["i", "ii"]

MAX_TABLE = 2 * 10**8


# --------------------------------------------------------------------------
# sieves

def _check_table_size(n: int) -> None:
    if n > MAX_TABLE:
        raise ResourceError(f"table up to {n} exceeds the limit {MAX_TABLE}")


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    _check_table_size(n)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve)


def smallest_prime_factor(n: int) -> np.ndarray:
    _check_table_size(n)
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in primes_up_to(n):
        p = int(p)
        block = spf[p :: p]
        block[block == 0] = p
        spf[p :: p] = block
    return spf


def prime_powers_up_to(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(m, p, k) arrays for every prime power m = p^k <= n, sorted by m."""
    ms, ps, ks = [], [], []
    for p in primes_up_to(n):
        p = int(p)
        m, k = p, 1
        while m <= n:
            ms.append(m)
            ps.append(p)
            ks.append(k)
            m *= p
            k += 1
    order = np.argsort(ms, kind="stable")
    return (np.asarray(ms, dtype=np.int64)[order], np.asarray(ps, dtype=np.int64)[order],
            np.asarray(ks, dtype=np.int64)[order])


def von_mangoldt_table(x_max: int) -> np.ndarray:
    """Array lam with lam[m] = Lambda(m) for 0 <= m <= x_max (lam[0] = lam[1] = 0)."""
    if x_max < 2:
        raise DomainError("x_max must be >= 2")
    _check_table_size(x_max)
    lam = np.zeros(x_max + 1)
    m, p, _ = prime_powers_up_to(x_max)
    lam[m] = np.log(p)
    return lam


# --------------------------------------------------------------------------
# local power series at one prime

def local_exp(b: Sequence[complex]) -> list[complex]:
    """Local Dirichlet coefficients [a(1), a(p), ..., a(p^K)] from [b(p), ..., b(p^K)].

    From A = exp(sum_k b_k X^k / k):  k a_k = sum_{j=1}^k b_j a_{k-j}.
    """
    a = [1.0 + 0j]
    for k in range(1, len(b) + 1):
        s = sum(b[j - 1] * a[k - j] for j in range(1, k + 1))
        a.append(s / k)
    return a


def local_log(a: Sequence[complex]) -> list[complex]:
    """Inverse of local_exp; a[0] must be 1."""
    if abs(a[0] - 1) > 1e-12:
        raise DomainError("local factor must start with a(1) = 1")
    b: list[complex] = []
    for k in range(1, len(a)):
        s = k * a[k] - sum(b[j - 1] * a[k - j] for j in range(1, k))
        b.append(complex(s))
    return b


# --------------------------------------------------------------------------
# data model

@dataclass(frozen=True)
class GammaFactor:
    lam: float
    mu_shift: complex = 0j

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"Gamma-factor lambda must be > 0, got {self.lam}")
        if complex(self.mu_shift).real < 0:
            raise DomainError(f"Gamma-factor shift must have Re >= 0, got {self.mu_shift}")


@dataclass(frozen=True)
class SelbergDatum:
    name: str
    pole_order: int
    q_param: float
    root_number: complex
    gamma_factors: tuple[GammaFactor, ...]
    euler_b: Mapping[int, complex] = field(repr=False)
    theta: float = 0.0
    coefficient_horizon: int = 0

    def __post_init__(self):
        if int(self.pole_order) != self.pole_order or self.pole_order < 0:
            raise DomainError("pole_order must be a nonnegative integer")
        if not self.q_param > 0:
            raise DomainError(f"Q must be > 0, got {self.q_param}")
        if abs(abs(complex(self.root_number)) - 1) > 1e-12:
            raise DomainError(f"|root number| must be 1, got {abs(complex(self.root_number))}")
        if not self.theta < 0.5:
            raise DomainError(f"theta must be < 1/2, got {self.theta}")
        object.__setattr__(self, "gamma_factors", tuple(self.gamma_factors))

    @property
    def degree(self) -> float:
        return 2.0 * sum(gf.lam for gf in self.gamma_factors)

    def b(self, m: int) -> complex:
        """b(m); zero off prime powers, error past the horizon."""
        if m in self.euler_b:
            return complex(self.euler_b[m])
        if m > self.coefficient_horizon:
            raise IncompleteDataError(f"{self.name}: b({m}) beyond horizon {self.coefficient_horizon}")
        if is_prime_power(m):
            raise IncompleteDataError(f"{self.name}: missing Euler coefficient b({m})")
        return 0j

    def local_b(self, p: int, kmax: int) -> list[complex]:
        out = []
        m = p
        for k in range(1, kmax + 1):
            if m not in self.euler_b:
                raise IncompleteDataError(f"{self.name}: missing Euler coefficient b({p}^{k} = {m})")
            out.append(complex(self.euler_b[m]))
            m *= p
        return out

    def a(self, m: int) -> complex:
        return complex(self.dirichlet[m])

    @cached_property
    def dirichlet(self) -> np.ndarray:
        return dirichlet_from_euler(self, self.coefficient_horizon)

    @cached_property
    def prime_power_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(m, Lambda(m), b(m)) over every prime power up to the horizon."""
        m, p, _ = prime_powers_up_to(self.coefficient_horizon)
        b = np.array([self.b(int(x)) for x in m], dtype=complex)
        return m, np.log(p.astype(float)), b

    def ramanujan_constant(self, eps: float = 0.1) -> float:
        """max |a(m)| / m^eps over the stored range."""
        a = np.abs(self.dirichlet[1:])
        m = np.arange(1, len(a) + 1, dtype=float)
        return float(np.max(a / m**eps)) if len(a) else 0.0

    def euler_bound_constant(self) -> float:
        """max |b(p^k)| / p^{k theta} over the stored range."""
        if not self.euler_b:
            return 0.0
        m = np.array(list(self.euler_b.keys()), dtype=float)
        b = np.abs(np.array(list(self.euler_b.values()), dtype=complex))
        return float(np.max(b / m**self.theta))


def is_prime_power(m: int) -> bool:
    if m < 2:
        return False
    for p in range(2, math.isqrt(m) + 1):
        if m % p == 0:
            while m % p == 0:
                m //= p
            return m == 1
    return True


def dirichlet_from_euler(datum: SelbergDatum, m_max: int) -> np.ndarray:
    """Array a with a[m] = a_F(m) for 1 <= m <= m_max; a[0] is 0."""
    if m_max < 1:
        raise DomainError("m_max must be >= 1")
    _check_table_size(m_max)
    spf = smallest_prime_factor(max(m_max, 2))
    local: dict[int, list[complex]] = {}
    for p in primes_up_to(m_max):
        p = int(p)
        kmax = int(math.floor(math.log(m_max) / math.log(p) + 1e-12))
        while p ** (kmax + 1) <= m_max:
            kmax += 1
        while p**kmax > m_max:
            kmax -= 1
        local[p] = local_exp(datum.local_b(p, kmax))
    a = np.zeros(m_max + 1, dtype=complex)
    a[1] = 1.0
    for m in range(2, m_max + 1):
        p = int(spf[m])
        r, k = m, 0
        while r % p == 0:
            r //= p
            k += 1
        a[m] = local[p][k] * a[r]
    return a


def euler_from_local_a(local_a: Mapping[int, Sequence[complex]], horizon: int) -> dict[int, complex]:
    """Euler data b(p^k) from local Dirichlet coefficients {p: [1, a(p), a(p^2), ...]}."""
    out: dict[int, complex] = {}
    for p, a in local_a.items():
        for k, bk in enumerate(local_log(a), start=1):
            if p**k <= horizon:
                out[p**k] = bk
    return out


def local_a_from_datum(datum: SelbergDatum) -> dict[int, list[complex]]:
    out = {}
    H = datum.coefficient_horizon
    for p in primes_up_to(H):
        p = int(p)
        kmax = 0
        while p ** (kmax + 1) <= H:
            kmax += 1
        out[p] = local_exp(datum.local_b(p, kmax))
    return out


def perturbed(datum: SelbergDatum, m: int, delta: complex, name: str | None = None) -> SelbergDatum:
    """Copy of datum with the Dirichlet coefficient a(m) at a prime power shifted by delta.

    The Euler data are recomputed through the local logarithm, so every b(p^j),
    j >= k, changes consistently.
    """
    if not is_prime_power(m):
        raise DomainError("only prime-power coefficients can be perturbed independently")
    local = local_a_from_datum(datum)
    p = next(q for q in range(2, m + 1) if m % q == 0)
    k = round(math.log(m) / math.log(p))
    local[p][k] += delta
    return SelbergDatum(
        name=name or f"{datum.name}+a({m})",
        pole_order=datum.pole_order,
        q_param=datum.q_param,
        root_number=datum.root_number,
        gamma_factors=datum.gamma_factors,
        euler_b=euler_from_local_a(local, datum.coefficient_horizon),
        theta=datum.theta,
        coefficient_horizon=datum.coefficient_horizon,
    )


# --------------------------------------------------------------------------
# built-ins

DEFAULT_HORIZON = 30_000


def zeta(horizon: int = DEFAULT_HORIZON) -> SelbergDatum:
    m, _, _ = prime_powers_up_to(horizon)
    return SelbergDatum(
        name="zeta",
        pole_order=1,
        q_param=1.0 / math.sqrt(math.pi),
        root_number=1.0,
        gamma_factors=(GammaFactor(0.5, 0j),),
        euler_b={int(x): 1.0 + 0j for x in m},
        theta=0.0,
        coefficient_horizon=horizon,
    )


def one(horizon: int = 1) -> SelbergDatum:
    """The constant function 1: no zeros, poles, primes or Gamma-factors."""
    return SelbergDatum(
        name="one", pole_order=0, q_param=1.0, root_number=1.0, gamma_factors=(),
        euler_b={int(x): 0j for x in prime_powers_up_to(horizon)[0]},
        theta=0.0, coefficient_horizon=horizon,
    )


def _primitive_root(n: int) -> int:
    phi = sum(1 for m in range(1, n) if math.gcd(m, n) == 1)
    for g in range(2, n):
        if math.gcd(g, n) != 1:
            continue
        x, order = g % n, 1
        while x != 1:
            x = x * g % n
            order += 1
        if order == phi:
            return g
    raise DomainError(f"no primitive root mod {n}")


def _factor(q: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= q:
        if q % p == 0:
            e = 0
            while q % p == 0:
                q //= p
                e += 1
            out.append((p, e))
        p += 1
    if q > 1:
        out.append((q, 1))
    return out


def _conrey_local(p: int, e: int, n: int, m: int) -> complex:
    pe = p**e
    n %= pe
    m %= pe
    if m % p == 0:
        return 0j
    if p == 2:
        if e == 1:
            return 1 + 0j
        eps_n = 1 if n % 4 == 1 else -1
        eps_m = 1 if m % 4 == 1 else -1
        if e == 2:
            return complex((-1) if (eps_n == -1 and eps_m == -1) else 1)

        def log5(x):
            y = x if x % 4 == 1 else (-x) % pe
            acc, a = 1, 0
            while acc != y:
                acc = acc * 5 % pe
                a += 1
            return a

        frac = (1 - eps_n) * (1 - eps_m) / 8 + log5(n) * log5(m) / 2 ** (e - 2)
        return cmath.exp(2j * math.pi * frac)
    if pe == 2:
        return 1 + 0j
    g = _primitive_root(pe)
    phi = pe - pe // p

    def dlog(x):
        acc, a = 1, 0
        while acc != x:
            acc = acc * g % pe
            a += 1
        return a

    return cmath.exp(2j * math.pi * dlog(n) * dlog(m) / phi)


def character_values(q: int, index: int) -> np.ndarray:
    """Values chi(m), 0 <= m < q, of the Dirichlet character with Conrey label q.index."""
    if q < 1 or q > 20:
        raise DomainError("built-in characters cover moduli 1..20")
    if math.gcd(index, q) != 1 or not (1 <= index <= max(q, 1)):
        raise DomainError(f"Conrey index {index} is not a unit mod {q}")
    fac = _factor(q)
    vals = np.zeros(q, dtype=complex)
    for m in range(q):
        if math.gcd(m, q) != 1:
            continue
        v = 1 + 0j
        for p, e in fac:
            v *= _conrey_local(p, e, index, m)
        vals[m] = v
    return np.round(vals.real, 15) + 1j * np.round(vals.imag, 15)


def conductor(q: int, values: np.ndarray) -> int:
    for d in sorted(d for d in range(1, q + 1) if q % d == 0):
        if all(abs(values[m] - 1) < 1e-9 for m in range(1, q) if math.gcd(m, q) == 1 and m % d == 1 % d):
            return d
    return q


def dirichlet_l(q: int, index: int, horizon: int = DEFAULT_HORIZON) -> SelbergDatum:
    """L(s, chi) for the primitive character with Conrey label q.index."""
    chi = character_values(q, index)
    f = conductor(q, chi)
    if f != q:
        raise DomainError(f"character {q}.{index} is induced from conductor {f}; use a primitive one")
    parity = 0 if q <= 2 or abs(chi[q - 1] - 1) < 1e-9 else 1
    tau = sum(chi[m] * cmath.exp(2j * math.pi * m / q) for m in range(q))
    w = tau / ((1j) ** parity * math.sqrt(q))
    w /= abs(w)
    m, _, _ = prime_powers_up_to(horizon)
    return SelbergDatum(
        name=f"L(s,chi_{q}.{index})",
        pole_order=1 if q == 1 else 0,
        q_param=math.sqrt(q / math.pi),
        root_number=complex(w),
        gamma_factors=(GammaFactor(0.5, 0.5 * parity + 0j),),
        euler_b={int(x): complex(chi[int(x) % q]) for x in m},
        theta=0.0,
        coefficient_horizon=horizon,
    )


def chi4(horizon: int = DEFAULT_HORIZON) -> SelbergDatum:
    """L(s, chi_{-4}), Conrey label 4.3."""
    return dirichlet_l(4, 3, horizon)


def builtin(spec: str, horizon: int = DEFAULT_HORIZON) -> SelbergDatum:
    """'zeta', 'one', 'chi4' or 'dirichlet:q:index'."""
    parts = spec.split(":")
    if parts[0] == "zeta" and len(parts) == 1:
        return zeta(horizon)
    if parts[0] == "one" and len(parts) == 1:
        return one(horizon)
    if parts[0] == "chi4" and len(parts) == 1:
        return chi4(horizon)
    if parts[0] == "dirichlet" and len(parts) == 3:
        return dirichlet_l(int(parts[1]), int(parts[2]), horizon)
    raise DomainError(f"unknown built-in L-function {spec!r}")


# --------------------------------------------------------------------------
# differences of two data

@dataclass(frozen=True)
class CoeffDifference:
    c: Mapping[int, complex] = field(repr=False)
    thin_set_E: tuple[int, ...]
    delta: float
    theta: float = 0.0
    horizon: int = 0

    def __post_init__(self):
        if not self.delta > 0:
            raise DomainError("delta must be > 0")

    def bound_constant(self) -> float:
        """Fitted constant K with |c(m)| <= K m^theta on the stored range."""
        if not self.c:
            return 0.0
        return max(abs(v) / m**self.theta for m, v in self.c.items())


def coeff_difference(F: SelbergDatum, G: SelbergDatum, delta: float = 0.25,
                     horizon: int | None = None) -> CoeffDifference:
    H = min(F.coefficient_horizon, G.coefficient_horizon) if horizon is None else horizon
    m, p, k = prime_powers_up_to(H)
    c = {}
    for mm in m:
        mm = int(mm)
        d = F.b(mm) - G.b(mm)
        if d != 0:
            c[mm] = d
    thin = tuple(int(pp) for pp in primes_up_to(H) if abs(F.dirichlet[pp] - G.dirichlet[pp]) > 0)
    return CoeffDifference(c=c, thin_set_E=thin, delta=delta,
                           theta=max(F.theta, G.theta), horizon=H)


def log_deriv_difference(diff: CoeffDifference, s: complex, m_max: int) -> tuple[complex, float]:
    """Truncated -F'/F(s) + G'/G(s) = sum_{m <= m_max} c(m) Lambda(m) m^{-s}, with a tail bound.

    The tail bound uses |c(m)| <= K m^theta with K fitted on the stored range
    and Lambda(m) <= log m, summed over all integers m > m_max.
    """
    s = complex(s)
    sigma = s.real - diff.theta
    if sigma <= 1.0:
        raise DomainError(
            f"Re(s) = {s.real} gives no absolutely convergent tail; need Re(s) > 1 + theta = {1 + diff.theta}"
        )
    if m_max > diff.horizon:
        raise IncompleteDataError(f"m_max {m_max} exceeds coefficient horizon {diff.horizon}")
    total = 0j
    for m, cm in diff.c.items():
        if m <= m_max:
            p = next(q for q in range(2, m + 1) if m % q == 0)
            total += cm * math.log(p) * cmath.exp(-s * math.log(m))
    K = diff.bound_constant()
    a = sigma - 1.0
    M = float(m_max)
    # sum_{m > M} m^{-sigma} log m <= int_M^inf x^{-sigma} log x dx  (M >= e^{1/sigma})
    tail = K * M ** (-a) * (math.log(M) / a + 1.0 / a**2)
    return total, tail


@dataclass(frozen=True)
class PrimeSquareCheck:
    p: int
    stored: complex
    inline_value: complex
    oracle_value: complex

    @property
    def inline_matches(self) -> bool:
        return abs(self.inline_value - self.stored) <= 1e-12 * max(1.0, abs(self.stored))

    @property
    def oracle_matches(self) -> bool:
        return abs(self.oracle_value - self.stored) <= 1e-12 * max(1.0, abs(self.stored))


def prime_square_relation_check(datum: SelbergDatum, p: int) -> PrimeSquareCheck:
    """Compare stored b(p^2) with a(p^2) - a(p)b(p)/2 and with 2a(p^2) - a(p)b(p).

    Only the second form is consistent with exponentiating the local logarithm.
    """
    ap, ap2 = datum.a(p), datum.a(p * p)
    bp, bp2 = datum.b(p), datum.b(p * p)
    return PrimeSquareCheck(
        p=p,
        stored=bp2,
        inline_value=ap2 - ap * bp / 2,
        oracle_value=2 * ap2 - ap * bp,
    )


def prime_square_mean_sum(F: SelbergDatum, G: SelbergDatum, x: float) -> float:
    """sum_{p <= e^x} |a_F(p^2) - a_G(p^2)|^2 log p / p."""
    pmax = int(math.floor(math.exp(x) * (1 + 1e-12)))
    if pmax * pmax > min(F.coefficient_horizon, G.coefficient_horizon):
        raise IncompleteDataError(
            f"need coefficients up to p^2 = {pmax * pmax}; horizon is "
            f"{min(F.coefficient_horizon, G.coefficient_horizon)}"
        )
    total = 0.0
    for p in primes_up_to(pmax):
        p = int(p)
        total += abs(F.a(p * p) - G.a(p * p)) ** 2 * math.log(p) / p
    return total


def envelope_A(eps: float, x: float, mode: Mode) -> float:
    """exp(eps x / log x) under condition (ii), exp(eps x) otherwise."""
    if eps <= 0:
        raise DomainError("eps must be > 0")
    if mode == "ii":
        if x <= 1:
            raise DomainError("envelope in mode (ii) needs x > 1")
        return math.exp(eps * x / math.log(x))
    if mode == "i":
        return math.exp(eps * x)
    raise DomainError(f"mode must be 'i' or 'ii', got {mode!r}")
