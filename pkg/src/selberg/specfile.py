"""Reader for L-function description files.

Format (``#`` starts a comment, blank lines ignored)::

    name = zeta-from-file
    builtin = zeta            # optional starting point: zeta, one, chi4, dirichlet:q:index
    pole_order = 1
    Q = 0.5641895835477563
    root_number = 1           # any Python numeric literal, e.g. 0.6+0.8j
    gamma_factors = [(0.5, 0, 0)]   # (lambda, Re mu, Im mu)
    theta = 0
    horizon = 1000
    euler:
    2 1 1.0 0.0               # p k Re b(p^k) Im b(p^k)

The rows after ``euler:`` give the Euler data b(p^k) of -F'/F. They override
the built-in values when ``builtin`` is set; otherwise unlisted prime powers
up to ``horizon`` are zero.
"""
from __future__ import annotations

import ast
import math
import os
from pathlib import Path

from .errors import DomainError, FormatError
from .lfunc import DEFAULT_HORIZON, GammaFactor, SelbergDatum, builtin, prime_powers_up_to

_KEYS = {"name", "builtin", "pole_order", "Q", "root_number", "gamma_factors", "theta", "horizon"}


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def _literal(text: str, lineno: int, path):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        raise FormatError(f"cannot parse value {text!r}", line=lineno, path=path) from None


def _number(value, key, lineno, path, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float, complex)):
        raise FormatError(f"{key} must be a number", line=lineno, path=path)
    if kind is not complex and isinstance(value, complex):
        raise FormatError(f"{key} must be real", line=lineno, path=path)
    return kind(value)


def parse_lfunction(text: str, path: str | os.PathLike = "<string>") -> SelbergDatum:
    fields: dict[str, tuple[object, int]] = {}
    euler_rows: list[tuple[int, int, complex, int]] = []
    in_euler = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.rstrip(":").strip() == "euler" and line.endswith(":"):
            in_euler = True
            continue
        if in_euler:
            parts = line.split()
            if len(parts) != 4:
                raise FormatError("euler rows need 4 columns: p k re im", line=lineno, path=path)
            try:
                p, k = int(parts[0]), int(parts[1])
                val = complex(float(parts[2]), float(parts[3]))
            except ValueError:
                raise FormatError(f"bad euler row {line!r}", line=lineno, path=path) from None
            if k < 1 or not _is_prime(p):
                raise FormatError(f"({p}, {k}) is not a prime and exponent >= 1", line=lineno, path=path)
            euler_rows.append((p, k, val, lineno))
            continue
        if "=" not in line:
            raise FormatError(f"expected 'key = value', got {line!r}", line=lineno, path=path)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise FormatError(f"unknown key {key!r}", line=lineno, path=path)
        if key in fields:
            raise FormatError(f"duplicate key {key!r}", line=lineno, path=path)
        fields[key] = (value, lineno)

    def get(key, default=None):
        return fields[key] if key in fields else (default, 0)

    horizon_raw, ln = get("horizon")
    horizon = DEFAULT_HORIZON if horizon_raw is None else _literal(horizon_raw, ln, path)
    if isinstance(horizon, bool) or not isinstance(horizon, int) or horizon < 1:
        raise FormatError("horizon must be a positive integer", line=ln, path=path)

    base = None
    name_raw, _ = get("name")
    b_raw, ln = get("builtin")
    if b_raw is not None and b_raw.lower() != "none":
        try:
            base = builtin(b_raw.strip("'\""), horizon)
        except (DomainError, ValueError) as exc:
            raise FormatError(str(exc), line=ln, path=path) from None

    def num(key, kind=float, default=None):
        raw, ln = get(key)
        if raw is None:
            if default is None:
                raise FormatError(f"missing key {key!r}", line=None, path=path)
            return default, ln
        return _number(_literal(raw, ln, path), key, ln, path, kind), ln

    pole_order, ln = num("pole_order", float, base.pole_order if base else None)
    if pole_order != int(pole_order) or pole_order < 0:
        raise FormatError("pole_order must be a nonnegative integer", line=ln, path=path)
    Q, ln = num("Q", float, base.q_param if base else None)
    if not Q > 0:
        raise FormatError(f"Q must be > 0, got {Q}", line=ln, path=path)
    w, ln = num("root_number", complex, base.root_number if base else None)
    if abs(abs(w) - 1) > 1e-12:
        raise FormatError(f"|root_number| must be 1, got {abs(w):.15g}", line=ln, path=path)
    theta, ln = num("theta", float, base.theta if base else 0.0)
    if not theta < 0.5:
        raise FormatError(f"theta must be < 1/2, got {theta}", line=ln, path=path)

    gf_raw, ln = get("gamma_factors")
    if gf_raw is None:
        if base is None:
            raise FormatError("missing key 'gamma_factors'", line=None, path=path)
        factors = base.gamma_factors
    else:
        parsed = _literal(gf_raw, ln, path)
        if not isinstance(parsed, (list, tuple)):
            raise FormatError("gamma_factors must be a list of (lambda, mu_re, mu_im)", line=ln, path=path)
        factors = []
        for item in parsed:
            if not isinstance(item, (list, tuple)) or len(item) != 3:
                raise FormatError("each gamma factor is (lambda, mu_re, mu_im)", line=ln, path=path)
            lam, re, im = (_number(x, "gamma_factors", ln, path) for x in item)
            if not lam > 0:
                raise FormatError(f"gamma factor lambda must be > 0, got {lam}", line=ln, path=path)
            if re < 0:
                raise FormatError(f"gamma factor Re mu must be >= 0, got {re}", line=ln, path=path)
            factors.append(GammaFactor(lam, complex(re, im)))
        factors = tuple(factors)

    if base is not None:
        euler = {m: v for m, v in base.euler_b.items() if m <= horizon}
    else:
        euler = {int(m): 0j for m in prime_powers_up_to(horizon)[0]}
    for p, k, val, ln in euler_rows:
        if p**k > horizon:
            raise FormatError(f"{p}^{k} exceeds horizon {horizon}", line=ln, path=path)
        euler[p**k] = val

    name = name_raw.strip("'\"") if name_raw else (base.name if base else Path(str(path)).stem)
    return SelbergDatum(
        name=name, pole_order=int(pole_order), q_param=Q, root_number=w,
        gamma_factors=factors, euler_b=euler, theta=theta, coefficient_horizon=horizon,
    )


def load_lfunction(ref: str | os.PathLike, horizon: int = DEFAULT_HORIZON) -> SelbergDatum:
    """``builtin:NAME`` or a path to a description file."""
    ref = str(ref)
    if ref.startswith("builtin:"):
        return builtin(ref[len("builtin:"):], horizon)
    path = Path(ref)
    return parse_lfunction(path.read_text(), path)
