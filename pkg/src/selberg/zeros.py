"""Zero-ordinate tables and sums over them."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, FormatError, IncompleteDataError
from .kernels import KernelParams, asymp_bound, constants, h

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_MATCH_TOL = 1e-6


@dataclass(frozen=True)
class ZeroList:
    """Ordinates gamma of zeros 1/2 + i gamma.

    All zeros with |gamma| <= complete_to are present. When ``symmetric`` is
    set only gamma > 0 is stored and -gamma is implied.
    """

    ordinates: np.ndarray = field(repr=False)
    complete_to: float = 0.0
    symmetric: bool = True
    source: str = ""

    def __post_init__(self):
        arr = np.asarray(self.ordinates, dtype=float).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "ordinates", arr)
        if self.complete_to < 0:
            raise DomainError("complete_to must be >= 0")
        if len(arr) and np.any(np.diff(arr) < 0):
            raise DomainError("ordinates must be sorted ascending")
        if self.symmetric and len(arr) and arr[0] <= 0:
            raise DomainError("a symmetric list stores positive ordinates only")

    def __len__(self):
        return len(self.ordinates)

    def signed(self) -> np.ndarray:
        """The full multiset of ordinates, both signs when symmetric, sorted."""
        if not self.symmetric:
            return self.ordinates.copy()
        return np.concatenate([-self.ordinates[::-1], self.ordinates])

    def truncated(self, height: float) -> "ZeroList":
        keep = self.ordinates[np.abs(self.ordinates) <= height]
        return ZeroList(keep, min(self.complete_to, height), self.symmetric,
                        f"{self.source} (truncated to {height:g})")

    def shifted(self, s: float) -> "ZeroList":
        """Non-symmetric copy with every signed ordinate moved by s."""
        return ZeroList(self.signed() + s, 0.0, False, f"{self.source} (shifted by {s:g})")


class ZeroDiff(NamedTuple):
    only_F: ZeroList
    only_G: ZeroList
    match_tol: float

    def size(self) -> int:
        return len(self.only_F) + len(self.only_G)


class CountingFit(NamedTuple):
    c_fit: float
    max_residual: float


def resolve_data_path(name: str | os.PathLike) -> Path:
    """Plain path if it exists, else look in $SELBERG_DATA_DIR, then the bundled data."""
    p = Path(name)
    if p.exists():
        return p
    for base in (os.environ.get("SELBERG_DATA_DIR"), DATA_DIR):
        if base and (Path(base) / p).exists():
            return Path(base) / p
    raise FileNotFoundError(f"zero table {name} not found (also looked in SELBERG_DATA_DIR and bundled data)")


def load_zeros(path, complete_to: float | None = None, symmetric: bool = True) -> ZeroList:
    """Read one ordinate per line; '#' starts a comment line.

    A header line '# complete_to: X' supplies the completeness height when the
    argument is None; without either, the largest ordinate is used.
    """
    path = resolve_data_path(path)
    values: list[float] = []
    header_height = None
    source = str(path)
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("complete_to:"):
                    header_height = float(body.split(":", 1)[1])
                elif body.startswith("source:"):
                    source = body.split(":", 1)[1].strip()
                continue
            try:
                v = float(line)
            except ValueError:
                raise FormatError(f"not a number: {line!r}", line=lineno, path=path) from None
            if not math.isfinite(v):
                raise FormatError(f"non-finite ordinate {line!r}", line=lineno, path=path)
            if values and v < values[-1]:
                raise FormatError(f"ordinate {v} is smaller than the previous {values[-1]}",
                                  line=lineno, path=path)
            if symmetric and v <= 0:
                raise FormatError("symmetric tables store positive ordinates only",
                                  line=lineno, path=path)
            values.append(v)
    if complete_to is None:
        complete_to = header_height if header_height is not None else (values[-1] if values else 0.0)
    return ZeroList(np.array(values), float(complete_to), symmetric, source)


def count_zeros(z: ZeroList, T: float) -> int:
    """#{gamma : |gamma| <= T}, counting both signs for a symmetric list."""
    if T > z.complete_to:
        raise IncompleteDataError(f"T = {T} exceeds completeness height {z.complete_to}")
    if z.symmetric:
        return 2 * int(np.searchsorted(z.ordinates, T, side="right"))
    return int(np.count_nonzero(np.abs(z.ordinates) <= T))


def counting_fit(z: ZeroList, degree: float, T_grid: Sequence[float]) -> CountingFit:
    """Least-squares C in count(T) ~ (d/pi) T log T + C T; residuals scaled by 1/log T."""
    T = np.asarray(T_grid, dtype=float)
    if len(T) < 3:
        raise DomainError("counting_fit needs at least 3 grid points")
    if np.any(T < 2):
        raise DomainError("grid points must be >= 2")
    counts = np.array([count_zeros(z, x) for x in T], dtype=float)
    r = counts - degree / math.pi * T * np.log(T)
    c = float(np.dot(T, r) / np.dot(T, T))
    resid = np.abs(r - c * T) / np.log(T)
    return CountingFit(c, float(np.max(resid)))


def symmetric_difference(zf: ZeroList, zg: ZeroList, T: float,
                         match_tol: float = DEFAULT_MATCH_TOL) -> ZeroDiff:
    """Multiset difference of the signed ordinates with |gamma| <= T.

    Matching is greedy on the two sorted lists: an ordinate is paired with
    the next unmatched one of the other list when they lie within match_tol.
    """
    if match_tol <= 0:
        raise DomainError("match_tol must be > 0")
    if T > zf.complete_to or T > zg.complete_to:
        raise IncompleteDataError(f"T = {T} exceeds a completeness height "
                                  f"({zf.complete_to}, {zg.complete_to})")
    a = zf.signed()
    b = zg.signed()
    a = a[np.abs(a) <= T]
    b = b[np.abs(b) <= T]
    only_a, only_b = [], []
    i = j = 0
    while i < len(a) and j < len(b):
        if abs(a[i] - b[j]) <= match_tol:
            i += 1
            j += 1
        elif a[i] < b[j]:
            only_a.append(a[i])
            i += 1
        else:
            only_b.append(b[j])
            j += 1
    only_a.extend(a[i:])
    only_b.extend(b[j:])
    return ZeroDiff(
        ZeroList(np.array(only_a), T, False, "only in F"),
        ZeroList(np.array(only_b), T, False, "only in G"),
        match_tol,
    )


def condition_i_ratio(diff: ZeroDiff, T: float) -> float:
    """|Z_F(T) sym.diff. Z_G(T)| / (T log T / log log T)."""
    if T <= math.e:
        raise DomainError("need T > e for log log T > 0")
    return diff.size() / (T * math.log(T) / math.log(math.log(T)))


def _density(gamma, degree: float, log_conductor: float) -> float:
    # per-sign density majorant of the smooth counting function
    return max(0.0, degree * math.log(max(gamma, 1.0)) + max(0.0, log_conductor)) / (2 * math.pi)


def deficit_bound(weight, complete_to: float, degree: float = 1.0, log_conductor: float = 0.0,
                  peaks: Sequence[float] = (), peak_value: float | None = None) -> float:
    """Bound on sum weight(gamma) over the zeros with |gamma| > complete_to.

    ``weight`` is a nonnegative majorant of |v(gamma)| (vectorised not needed);
    ``peaks`` are the signed locations where it may be maximal. The counting-law
    density is integrated on both half-lines and (1 + log) times the largest
    weight on the cut-off region is added as slack for the fluctuation of the
    true count around its smooth part.
    """
    if degree == 0 and log_conductor <= 0:
        return 0.0
    Tc = complete_to
    total = 0.0
    for sign in (1.0, -1.0):
        f = lambda x, s=sign: weight(s * x) * _density(x, degree, log_conductor)
        inside = sorted(abs(c) for c in peaks if c * sign > Tc)
        if inside:
            hi = inside[-1] + 1.0
            val, _ = quad(f, Tc, hi, limit=800, points=inside)
            rest, _ = quad(f, hi, np.inf, limit=400)
            total += val + rest
            peak = peak_value if peak_value is not None else max(weight(sign * c) for c in inside)
        else:
            val, _ = quad(f, Tc, np.inf, limit=400)
            total += val
            peak = weight(sign * Tc)
        total += (1.0 + math.log(Tc + 3.0)) * peak
    return total


def completeness_deficit(params: KernelParams, t: float, complete_to: float,
                         degree: float = 1.0, log_conductor: float = 0.0) -> float:
    """Bound on sum h_mu(L(gamma - t)) over the zeros with |gamma| > complete_to."""
    k = constants(params)
    L, mu = params.L, params.mu

    def weight(gamma):
        d = abs(L * (gamma - t))
        return k.h0 if d == 0 else min(k.h0, k.c_mu * d ** (-mu))

    return deficit_bound(weight, complete_to, degree, log_conductor, peaks=(t,), peak_value=k.h0)


def smoothed_zero_sum(z: ZeroList, params: KernelParams, t: float, trunc_tol: float = 1e-10,
                      degree: float = 1.0, log_conductor: float = 0.0) -> tuple[float, float]:
    """(sum_gamma h_mu(L(gamma - t)), tail_bound).

    Stored ordinates farther than R from t are dropped, with R chosen so the
    asymptotic majorant over all stored zeros stays below trunc_tol; the
    dropped zeros enter the tail bound through their exact majorant sum. The
    bound also includes the completeness deficit beyond z.complete_to.
    """
    gam = z.signed()
    k = constants(params)
    tail = completeness_deficit(params, t, z.complete_to, degree, log_conductor)
    if len(gam) == 0:
        return 0.0, tail
    n = len(gam)
    R = (n * k.c_mu / (0.5 * trunc_tol)) ** (1.0 / params.mu) / params.L
    near = np.abs(gam - t) <= R
    value = float(np.sum(h(params, params.L * (gam[near] - t))))
    far = gam[~near]
    if len(far):
        tail += float(np.sum(asymp_bound(params, params.L * (far - t))))
    return value, tail
