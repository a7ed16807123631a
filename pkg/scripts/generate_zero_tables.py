"""Regenerate the bundled zero tables with mpmath.

zeta: mpmath.zetazero(n) for every ordinate up to the requested height.
chi_-4: sign changes of the real-valued Hardy function of L(s, chi_-4),
refined with findroot, then counted against the Riemann-von Mangoldt
main term as a sanity check.

    python scripts/generate_zero_tables.py --out src/selberg/data
"""
from __future__ import annotations

import argparse
from pathlib import Path

import mpmath as mp

mp.mp.dps = 30


def zeta_zeros(height):
    out = []
    n = 1
    while True:
        g = mp.zetazero(n).imag
        if g > height:
            return out
        out.append(g)
        n += 1


def _chi4(n):
    return (0, 1, 0, -1)[n % 4]


def _hardy_chi4(t):
    # Lambda(s) = (4/pi)^{(s+1)/2} Gamma((s+1)/2) L(s, chi_-4), root number 1
    s = mp.mpc(0.5, t)
    theta = (t / 2) * mp.log(4 / mp.pi) + mp.im(mp.loggamma((s + 1) / 2))
    val = mp.exp(1j * theta) * mp.dirichlet(s, [0, 1, 0, -1])
    return mp.re(val)


def chi4_zeros(height, step=0.02):
    out = []
    t = mp.mpf(0.5)
    prev = _hardy_chi4(t)
    while t < height + 1:
        t2 = t + step
        cur = _hardy_chi4(t2)
        if prev == 0 or prev * cur < 0:
            root = mp.findroot(_hardy_chi4, (t, t2), solver="anderson")
            if root <= height:
                out.append(root)
        prev, t = cur, t2
    return out


def write(path, zeros, height, source):
    with open(path, "w") as fh:
        fh.write(f"# source: {source}\n")
        fh.write(f"# complete_to: {height}\n")
        fh.write("# ordinates gamma > 0 of zeros 1/2 + i*gamma, ascending\n")
        for g in zeros:
            fh.write(mp.nstr(g, 15, strip_zeros=False) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="src/selberg/data")
    ap.add_argument("--zeta-height", type=float, default=1000.0)
    ap.add_argument("--chi4-height", type=float, default=200.0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    z = zeta_zeros(args.zeta_height)
    write(out / "zeta_zeros.txt", z, args.zeta_height,
          f"mpmath {mp.__version__} zetazero, {len(z)} ordinates")
    c = chi4_zeros(args.chi4_height)
    T = mp.mpf(args.chi4_height)
    smooth = T / (2 * mp.pi) * mp.log(4 * T / (2 * mp.pi * mp.e))
    print(f"chi_-4: {len(c)} zeros to {T}; smooth count {float(smooth):.2f}")
    write(out / "chi4_zeros.txt", c, args.chi4_height,
          f"mpmath {mp.__version__} Hardy-function sign changes of L(s, chi_-4), {len(c)} ordinates")
    print(f"zeta: {len(z)} zeros")


if __name__ == "__main__":
    main()
