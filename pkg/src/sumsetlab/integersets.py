"""Exact enumeration of the sparse example sets.

Conventions: ``squares`` and ``k_th_powers`` include ``0 = 0**k``;
``sums_two_squares`` uses ``n, m >= 1``; ``squarefull`` includes 1;
``sparse_digit`` includes the empty sum 0.
"""

from __future__ import annotations

import math
from typing import Sequence

import gmpy2
import numpy as np

from .windowsets import WindowSet

KINDS = ("squares", "k_th_powers", "primes", "prime_powers", "sums_two_squares",
         "squarefull", "sparse_digit")


def prime_sieve(n: int) -> np.ndarray:
    """Primes ``<= n`` by the sieve of Eratosthenes."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    is_p[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if is_p[p]:
            is_p[p * p::2 * p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def _powers(k: int, hi: int) -> np.ndarray:
    if hi < 0:
        return np.zeros(0, dtype=np.int64)
    top = int(gmpy2.iroot(gmpy2.mpz(hi), k)[0])
    return np.arange(top + 1, dtype=np.int64) ** k


def _prime_powers(hi: int) -> np.ndarray:
    out = []
    for p in prime_sieve(hi).tolist():
        q = p
        while q <= hi:
            out.append(q)
            q *= p
    return np.array(sorted(out), dtype=np.int64)


def _sums_two_squares(hi: int) -> np.ndarray:
    if hi < 2:
        return np.zeros(0, dtype=np.int64)
    r = math.isqrt(hi - 1)
    hit = np.zeros(hi + 1, dtype=bool)
    sq = np.arange(1, r + 1, dtype=np.int64) ** 2
    for a in sq.tolist():
        b = sq[sq <= hi - a]
        hit[a + b] = True
    return np.flatnonzero(hit).astype(np.int64)


def _squarefull(hi: int) -> np.ndarray:
    # every square-full number is a**2 * b**3 for some a, b >= 1
    if hi < 1:
        return np.zeros(0, dtype=np.int64)
    hit = np.zeros(hi + 1, dtype=bool)
    b = 1
    while b**3 <= hi:
        top = math.isqrt(hi // b**3)
        hit[(np.arange(1, top + 1, dtype=np.int64) ** 2) * b**3] = True
        b += 1
    return np.flatnonzero(hit).astype(np.int64)


def validate_sparse_digits(ns: Sequence[int]) -> list[int]:
    ns = [int(x) for x in ns]
    if not ns or ns[0] <= 0:
        raise ValueError("sparse_digit needs positive integers n_i")
    for a, b in zip(ns, ns[1:]):
        if b % a:
            raise ValueError(f"sparse_digit requires n_i | n_(i+1); {a} does not divide {b}")
        if b < 3 * a:
            raise ValueError(f"sparse_digit requires n_(i+1)/n_i >= 3; got {b}/{a}")
    return ns


def _sparse_digit(ns: Sequence[int], hi: int) -> np.ndarray:
    sums = np.zeros(1, dtype=np.int64)
    for x in validate_sparse_digits(ns):
        if x > hi:
            break
        sums = np.union1d(sums, sums + x)
    return sums[sums <= hi]


def enumerate_set(kind: str, hi: int, k: int = 2, digits: Sequence[int] = ()) -> np.ndarray:
    """Sorted elements ``<= hi`` of the named set (all are non-negative)."""
    if kind == "squares":
        return _powers(2, hi)
    if kind == "k_th_powers":
        if k < 1:
            raise ValueError("k_th_powers needs k >= 1")
        return _powers(k, hi)
    if kind == "primes":
        return prime_sieve(hi)
    if kind == "prime_powers":
        return _prime_powers(hi)
    if kind == "sums_two_squares":
        return _sums_two_squares(hi)
    if kind == "squarefull":
        return _squarefull(hi)
    if kind == "sparse_digit":
        return _sparse_digit(digits, hi)
    raise ValueError(f"unknown example set {kind!r}; expected one of {', '.join(KINDS)}")


def example_set(kind: str, window: tuple[int, int], k: int = 2,
                digits: Sequence[int] = ()) -> WindowSet:
    lo, hi = window
    desc = {"k_th_powers": f"{k}th powers", "sparse_digit": f"subset sums of {list(digits)}"}.get(kind, kind)
    return WindowSet.from_elements(enumerate_set(kind, hi, k, digits), lo, hi, desc)


def first_terms(kind: str, j: int, k: int = 2, digits: Sequence[int] = ()) -> np.ndarray:
    """The ``j`` smallest positive elements, e.g. ``1, 4, ..., j**2`` for squares."""
    if j < 1:
        raise ValueError("j must be positive")
    hi = max(16, 2 * j)
    while True:
        vals = enumerate_set(kind, hi, k, digits)
        vals = vals[vals >= 1]
        if vals.size >= j:
            return vals[:j]
        if kind == "sparse_digit" and hi > 4 * sum(validate_sparse_digits(digits)):
            raise ValueError(f"only {vals.size} positive subset sums exist")
        hi *= 4
