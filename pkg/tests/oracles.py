"""Slow, independent reference implementations.

Nothing here imports the package under test.  Floors use ``math.isqrt``,
orbits use mpmath at high precision, sums are plain loops or direct
exponentials, and rationals are ``fractions.Fraction``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import mpmath
import numpy as np


def floor_power_3_2(n: int) -> int:
    # floor(n**1.5) = isqrt(n**3)
    return math.isqrt(n**3)


def weyl_max_direct(values: list[int], G: int, chunk: int = 64) -> tuple[float, int]:
    """``max_{1<=k<G} |(1/j) sum_n exp(2 pi i k v_n / G)|`` by direct summation."""
    v = np.asarray(values, dtype=np.int64)
    j = v.size
    best, arg = -1.0, -1
    for k0 in range(1, G, chunk):
        ks = np.arange(k0, min(G, k0 + chunk), dtype=np.int64)
        # reduce k*v mod G in integers before the exponential
        ph = np.mod(np.outer(ks, v), G).astype(np.float64) * (2 * np.pi / G)
        mags = np.abs(np.exp(1j * ph).sum(axis=1)) / j
        i = int(np.argmax(mags))
        if mags[i] > best:
            best, arg = float(mags[i]), int(ks[i])
    return best, arg


def sumset_triple_loop(A: list[int], B: list[int], lo: int, hi: int) -> set[int]:
    out = set()
    for n in range(lo, hi + 1):
        for a in A:
            for b in B:
                if a + b == n:
                    out.add(n)
    return out


def convolve_direct(f: dict, g: dict, moduli: tuple[int, ...]) -> dict:
    """``(1/|G|) sum_z f(z) g(t - z)`` with Fractions, on residue tuples."""
    elems = list(product(*[range(q) for q in moduli]))
    order = len(elems)
    out = {}
    for t in elems:
        s = Fraction(0)
        for z in elems:
            tz = tuple((ti - zi) % q for ti, zi, q in zip(t, z, moduli))
            s += f[z] * g[tz]
        out[t] = s / order
    return out


def orbit_frac(alpha: mpmath.mpf, n: int) -> mpmath.mpf:
    return mpmath.frac(n * alpha)


def named(name: str, dps: int = 60) -> mpmath.mpf:
    with mpmath.workdps(dps):
        return {"sqrt2": mpmath.sqrt(2), "golden": (1 + mpmath.sqrt(5)) / 2, "sqrt3": mpmath.sqrt(3),
                "pi": mpmath.pi}[name]


def bohr_direct(alpha: mpmath.mpf, a: float, b: float, lo: int, hi: int, dps: int = 60) -> list[int]:
    with mpmath.workdps(dps):
        return [n for n in range(lo, hi + 1) if a <= mpmath.frac(n * alpha) < b]


def rotation_average_direct(coef_k: int, alpha: mpmath.mpf, points: list[int], dps: int = 40) -> complex:
    """``(1/|P|) sum_n exp(2 pi i k n alpha)``."""
    with mpmath.workdps(dps):
        s = mpmath.mpc(0)
        for n in points:
            s += mpmath.expjpi(2 * coef_k * mpmath.frac(n * alpha))
        return complex(s / len(points))


def geometric_average(alpha: mpmath.mpf, N: int, k: int = 1, dps: int = 40) -> complex:
    """Closed form of ``(1/N) sum_{n=1..N} exp(2 pi i k n alpha)``."""
    with mpmath.workdps(dps):
        w = mpmath.expjpi(2 * k * alpha)
        return complex(w * (1 - w**N) / (1 - w) / N)


def squarefull_by_factoring(hi: int) -> list[int]:
    out = []
    for n in range(1, hi + 1):
        m, ok, p = n, True, 2
        while p * p <= m:
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                if e == 1:
                    ok = False
            p += 1
        if m > 1:
            ok = False
        if ok:
            out.append(n)
    return out


def ap_density_brute(member: np.ndarray, k: int, d: int, M: int) -> Fraction:
    """Max over windows of length ``M`` of the share of ``c`` with ``c + l d`` all members."""
    n = member.size - k * d
    ok = np.ones(n, dtype=bool)
    for l in range(k + 1):
        ok &= member[l * d:l * d + n]
    c = np.concatenate(([0], np.cumsum(ok)))
    return Fraction(int((c[M:] - c[:-M]).max()), M)
