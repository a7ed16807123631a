"""Command-line front end: ``python -m selberg <command> ...``.

Exit status: 0 success, 1 a hard check failed, 2 usage / IO / domain error.
Options may also come from a JSON file (``--config``); keys are the option
names with dashes replaced by underscores, and command-line flags win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import quad

from . import explicit, verify
from .errors import DomainError, FormatError, IncompleteDataError, NumericError, ResourceError, SelbergError
from .kernels import KernelParams, constants, g, h
from .lfunc import DEFAULT_HORIZON, chi4, perturbed, primes_up_to, zeta
from .specfile import load_lfunction
from .zeros import condition_i_ratio, count_zeros, counting_fit, load_zeros, symmetric_difference

log = logging.getLogger("selberg")

BUNDLED_ZEROS = {"zeta": "zeta_zeros.txt", "chi4": "chi4_zeros.txt", "dirichlet:4:3": "chi4_zeros.txt"}

DEFAULTS = {
    "lfunction": "builtin:zeta",
    "zeros": None,
    "other": None,
    "t": None,
    "t_grid": None,
    "L": 4.0,
    "mu": 3.0,
    "T": None,
    "W": 10.0,
    "mode": "ii",
    "tol": None,
    "out": None,
    "format": "text",
    "jobs": 1,
    "checks": None,
    "degree": 1.0,
    "match_tol": 1e-6,
}


class UsageError(SelbergError):
    pass


@dataclass
class Row:
    check: str
    quantity: str
    value: float
    limit: float | None
    kind: str  # "hard" or "fitted"
    passed: bool | None

    def csv(self):
        lim = "" if self.limit is None else repr(float(self.limit))
        status = "" if self.passed is None else ("pass" if self.passed else "FAIL")
        return [self.check, self.quantity, repr(float(self.value)), lim, self.kind, status]

    def text(self):
        lim = "" if self.limit is None else f"{self.limit:.4g}"
        status = "info" if self.passed is None else ("pass" if self.passed else "FAIL")
        return f"{self.check:<16} {self.quantity:<34} {self.value:>14.6g} {lim:>12} {status}"


def _emit_rows(rows: list[Row], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "quantity", "value", "limit", "kind", "status"])
        for r in rows:
            w.writerow(r.csv())
        return buf.getvalue()
    head = f"{'check':<16} {'quantity':<34} {'value':>14} {'limit':>12} status"
    return "\n".join([head] + [r.text() for r in rows]) + "\n"


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def parse_grid(spec) -> list[float]:
    """'a,b,c' or 'start:stop:n' (inclusive linspace) or a JSON list."""
    if isinstance(spec, (list, tuple)):
        return [float(x) for x in spec]
    spec = str(spec).strip()
    if spec.count(":") == 2 and "," not in spec:
        a, b, n = spec.split(":")
        return [float(x) for x in np.linspace(float(a), float(b), int(n))]
    try:
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse grid {spec!r}") from None


# --------------------------------------------------------------------------
# kernel-selftest

KERNEL_TOLS = {"fourier_pair": 1e-8, "normalization": 1e-10, "h_at_zero": 1e-12}


def _cos_transform(params: KernelParams, t: float) -> float:
    val, _ = quad(lambda x: g(params, x), -1.0, 1.0, weight="cos", wvar=t,
                  epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def kernel_selftest(mus, tol: float | None = None) -> list[Row]:
    rows = []
    for mu in mus:
        p = KernelParams(mu)
        k = constants(p)
        ts = np.linspace(-50, 50, 201)
        err = max(abs(h(p, t) - _cos_transform(p, t)) for t in ts)
        lim = tol if tol is not None else KERNEL_TOLS["fourier_pair"]
        rows.append(Row(f"mu={mu:g}", "fourier_pair max|h - int g cos|", err, lim, "hard", err < lim))

        integral, _ = quad(lambda x: g(p, x), -1, 1, epsabs=1e-14, epsrel=1e-13)
        err = abs(integral - 1 / math.sqrt(mu))
        lim = tol if tol is not None else KERNEL_TOLS["normalization"]
        rows.append(Row(f"mu={mu:g}", "normalization |int g - mu^-1/2|", err, lim, "hard", err < lim))
        err = abs(h(p, 0.0) - 1 / math.sqrt(mu))
        lim = tol if tol is not None else KERNEL_TOLS["h_at_zero"]
        rows.append(Row(f"mu={mu:g}", "h_at_zero |h(0) - mu^-1/2|", err, lim, "hard", err <= lim))

        ts = np.logspace(-1, 3, 1000)
        ratio = float(np.max(np.abs(h(p, ts)) * ts**mu / k.c_mu))
        rows.append(Row(f"mu={mu:g}", "asymp max |h| t^mu / C_mu", ratio, 1.0, "hard", ratio <= 1.0))

        xs = np.linspace(-1, 1, 1000)
        peak_ok = bool(np.all(g(p, xs) <= k.g0))
        rows.append(Row(f"mu={mu:g}", "peak max g / g(0)", float(np.max(g(p, xs)) / k.g0), 1.0, "hard", peak_ok))
        dev = abs(k.g0 * math.sqrt(math.pi) - 1)
        rows.append(Row(f"mu={mu:g}", "peak |g(0) sqrt(pi) - 1|", dev, 1 / (4 * mu), "hard", dev <= 1 / (4 * mu)))
    return rows


def cmd_kernel_selftest(cfg) -> int:
    mus = [cfg["mu"]] if cfg.get("mu_given") else [3.0, 5.5, 10.0]
    rows = kernel_selftest(mus, cfg["tol"])
    text = _emit_rows(rows, cfg["format"])
    failed = [r for r in rows if r.passed is False]
    if failed and cfg["format"] == "text":
        text += f"first violated check: {failed[0].check} {failed[0].quantity.split()[0]}\n"
    _write(text, cfg["out"])
    if failed:
        log.error("first violated check: %s %s", failed[0].check, failed[0].quantity.split()[0])
    return 1 if failed else 0


# --------------------------------------------------------------------------
# explicit

def _horizon_for(L: float) -> int:
    return max(DEFAULT_HORIZON, int(math.floor(math.exp(L))) + 1)


def _load_datum(ref: str, L: float = 0.0):
    return load_lfunction(ref, _horizon_for(L))


def _zero_table(cfg):
    path = cfg["zeros"]
    if path is None:
        ref = cfg["lfunction"]
        name = ref[len("builtin:"):] if ref.startswith("builtin:") else None
        if name not in BUNDLED_ZEROS:
            raise UsageError("--zeros is required for this L-function")
        path = BUNDLED_ZEROS[name]
    return load_zeros(path)


def _t_values(cfg) -> list[float]:
    if cfg["t_grid"] is not None:
        return parse_grid(cfg["t_grid"])
    if cfg["t"] is not None:
        return [float(cfg["t"])]
    raise UsageError("give --t or --t-grid")


def run_explicit(cfg) -> list[explicit.ExplicitFormulaReport]:
    params = KernelParams(float(cfg["mu"]), float(cfg["L"]))
    datum = _load_datum(cfg["lfunction"], params.L)
    zeros = _zero_table(cfg)
    tol = cfg["tol"] if cfg["tol"] is not None else 1e-8
    ts = _t_values(cfg)

    def one(t):
        return explicit.shifted_explicit_formula(datum, zeros, params, t, tol)

    with ThreadPoolExecutor(max_workers=max(1, int(cfg["jobs"]))) as pool:
        return list(pool.map(one, ts))


def cmd_explicit(cfg) -> int:
    reports = run_explicit(cfg)
    if cfg["format"] == "csv":
        text = explicit.reports_to_csv(reports)
    else:
        text = "\n".join(r.text() for r in reports) + "\n"
    _write(text, cfg["out"])
    return 0 if all(r.ok for r in reports) else 1


# --------------------------------------------------------------------------
# verify

VERIFY_CHECKS = ("schedule", "lemma1", "tail", "gbound", "meansquare", "lemma2", "thinset")


def _verify_schedule(cfg) -> list[Row]:
    T = cfg["T"] if cfg["T"] is not None else math.exp(100)
    s = verify.schedule(float(T), float(cfg["W"]), cfg["mode"])
    exact = s.L / (s.W * s.rho) == 2 * s.mu
    return [
        Row("schedule", "rho", s.rho, None, "fitted", None),
        Row("schedule", "L", s.L, None, "fitted", None),
        Row("schedule", "mu", s.mu, None, "fitted", None),
        Row("schedule", "eps", s.eps, None, "fitted", None),
        Row("schedule", "L/(W rho) - 2 mu", s.L / (s.W * s.rho) - 2 * s.mu, 0.0, "hard", exact),
        Row("schedule", "valid (mu >= 3)", float(s.valid), None, "fitted", None),
    ]


def _verify_lemma1(cfg) -> list[Row]:
    reps = verify.lemma_one_check(zeta(), KernelParams(4, 10), [1000, 1500, 2000], 1000.0)
    worst = max(r.scaled_residual for r in reps)
    return [Row("lemma1", "max scaled residual (zeta, T=1000)", worst, None, "fitted", None),
            Row("lemma1", "min e_mu", min(r.e_mu for r in reps), 1.0, "hard",
                all(r.e_mu >= 1 and math.isfinite(r.scaled_residual) for r in reps))]


def _verify_tail(cfg) -> list[Row]:
    rows, fitted = [], []
    for mu in (3, 4, 6, 10, 15):
        ti = verify.tail_integral_check(KernelParams(mu), 2.0 * mu)
        rows.append(Row("tail", f"mu={mu} int_{{|y|>=2mu}} |h|", ti.numeric, ti.bound, "hard", ti.holds))
        fitted.append(ti.numeric / math.exp(-mu))
    rows.append(Row("tail", "max numeric / e^-mu", max(fitted), None, "fitted", None))
    return rows


def _verify_gbound(cfg) -> list[Row]:
    rows = []
    for m, L, mu in ((2, 10.0, 3.0), (7, 100.0, 20.0)):
        r = verify.g_lower_bound_check(m, KernelParams(mu, L))
        rows.append(Row("gbound", f"m={m} L={L:g} mu={mu:g} g/lower", r.g_value / r.lower_bound, 1.0,
                        "hard", r.holds))
    return rows


def _verify_meansquare(cfg) -> list[Row]:
    z = zeta()
    ms = verify.mean_square_check(z, perturbed(z, 4, 1.0), KernelParams(3, 3), 50.0)
    return [Row("meansquare", "lhs", ms.lhs, 0.0, "hard", ms.lhs >= 0),
            Row("meansquare", "lhs / rhs", ms.ratio, None, "fitted", None)]


def _verify_lemma2(cfg) -> list[Row]:
    r = verify.lemma_two_check(zeta(), chi4(), KernelParams(4, 5), 100.0, 2, tol=1e-6)
    return [Row("lemma2", "|integral| / bound (zeta vs chi4)", r.ratio, None, "fitted", None)]


def _verify_thinset(cfg) -> list[Row]:
    ratio = verify.thin_set_density_check(primes_up_to(100).tolist(), 0.1, [100.0])
    rows = [Row("thinset", "primes<=100, delta=0.1", ratio, None, "fitted", None)]
    if ratio > 1:
        rows.append(Row("thinset", "flag: not thin at this scale", 1.0, None, "fitted", None))
    return rows


def cmd_verify(cfg) -> int:
    wanted = parse_names(cfg["checks"]) if cfg["checks"] else list(VERIFY_CHECKS)
    unknown = [c for c in wanted if c not in VERIFY_CHECKS]
    if unknown:
        raise UsageError(f"unknown checks {unknown}; choose from {', '.join(VERIFY_CHECKS)}")
    runners = {name: globals()[f"_verify_{name}"] for name in VERIFY_CHECKS}
    rows: list[Row] = []
    for name in wanted:
        rows.extend(runners[name](cfg))
    _write(_emit_rows(rows, cfg["format"]), cfg["out"])
    return 1 if any(r.passed is False for r in rows) else 0


def parse_names(spec) -> list[str]:
    if isinstance(spec, (list, tuple)):
        return [str(s) for s in spec]
    return [s.strip() for s in str(spec).split(",") if s.strip()]


# --------------------------------------------------------------------------
# zeros and schedule

def _T_values(cfg) -> list[float]:
    if cfg["T"] is None:
        raise UsageError("give --T")
    return parse_grid(cfg["T"]) if isinstance(cfg["T"], str) else [float(cfg["T"])]


def cmd_zeros_count(cfg) -> int:
    zeros = _zero_table(cfg)
    Ts = _T_values(cfg)
    rows = [Row("zeros-count", f"N({T:g})", count_zeros(zeros, T), None, "fitted", None) for T in Ts]
    if len(Ts) >= 3:
        fit = counting_fit(zeros, float(cfg["degree"]), Ts)
        rows.append(Row("zeros-count", "counting fit C", fit.c_fit, None, "fitted", None))
        rows.append(Row("zeros-count", "max residual / log T", fit.max_residual, None, "fitted", None))
    _write(_emit_rows(rows, cfg["format"]), cfg["out"])
    return 0


def cmd_zeros_diff(cfg) -> int:
    if cfg["zeros"] is None or cfg["other"] is None:
        raise UsageError("zeros-diff needs --zeros and --other")
    a, b = load_zeros(cfg["zeros"]), load_zeros(cfg["other"])
    rows = []
    for T in _T_values(cfg):
        d = symmetric_difference(a, b, T, float(cfg["match_tol"]))
        rows.append(Row("zeros-diff", f"T={T:g} only first", len(d.only_F), None, "fitted", None))
        rows.append(Row("zeros-diff", f"T={T:g} only second", len(d.only_G), None, "fitted", None))
        if T > math.e:
            rows.append(Row("zeros-diff", f"T={T:g} size / (T log T / log2 T)",
                            condition_i_ratio(d, T), None, "fitted", None))
    _write(_emit_rows(rows, cfg["format"]), cfg["out"])
    return 0


def cmd_schedule(cfg) -> int:
    if cfg["T"] is None:
        raise UsageError("give --T")
    _write(_emit_rows(_verify_schedule(cfg), cfg["format"]), cfg["out"])
    return 0


COMMANDS = {
    "kernel-selftest": cmd_kernel_selftest,
    "explicit": cmd_explicit,
    "verify": cmd_verify,
    "zeros-count": cmd_zeros_count,
    "zeros-diff": cmd_zeros_diff,
    "schedule": cmd_schedule,
}


def _parse_T(text: str):
    """Accept a number, a comma grid, or e^X for very large T."""
    text = text.strip()
    if text.startswith("e^"):
        return math.exp(float(text[2:]))
    return text if ("," in text or text.count(":") == 2) else float(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values")
    common.add_argument("--lfunction", help="description file or builtin:NAME")
    common.add_argument("--zeros", help="zero table path or bundled file name")
    common.add_argument("--other", help="second zero table (zeros-diff)")
    common.add_argument("--t", type=float)
    common.add_argument("--t-grid", dest="t_grid", help="'a,b,c' or 'start:stop:n'")
    common.add_argument("--L", type=float)
    common.add_argument("--mu", type=float)
    common.add_argument("--T", type=_parse_T, help="number, e^X, or a grid")
    common.add_argument("--W", type=float)
    common.add_argument("--mode", choices=("i", "ii"))
    common.add_argument("--tol", type=float)
    common.add_argument("--out")
    common.add_argument("--format", choices=("text", "csv"))
    common.add_argument("--jobs", type=int)
    common.add_argument("--checks", help=f"comma list from {','.join(VERIFY_CHECKS)}")
    common.add_argument("--degree", type=float)
    common.add_argument("--match-tol", dest="match_tol", type=float)
    parser = argparse.ArgumentParser(prog="selberg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        bad = set(data) - set(DEFAULTS)
        if bad:
            raise UsageError(f"unknown config keys: {sorted(bad)}")
        cfg.update(data)
    flags = {k: v for k, v in vars(args).items() if v is not None and k in DEFAULTS}
    cfg["mu_given"] = "mu" in flags or (args.config is not None and "mu" in data)
    cfg.update(flags)
    if cfg["tol"] is not None and not cfg["tol"] > 0:
        raise UsageError("tolerance must be > 0")
    return cfg


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except IncompleteDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("hint: a larger zero table (--zeros) or a smaller L reduces the data needed", file=sys.stderr)
        return 2
    except (UsageError, DomainError, FormatError, ResourceError, NumericError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
