"""Real constants at controlled precision and exact floor evaluation.

Rational inputs stay rational.  Irrational inputs are carried as
fixed-point integers ``floor(x * 2**bits)`` computed by mpmath with guard
bits, so every derived floor either comes with a proof of correctness or
is flagged as ambiguous.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import mpmath
import numpy as np

DEFAULT_PRECISION_BITS = int(os.environ.get("SUMSETLAB_PRECISION_BITS", "128"))
# results within this distance of an integer are reported as floor-ambiguous
AMBIGUITY_BITS = 40

_NAMED = {
    "sqrt2": lambda: mpmath.sqrt(2),
    "sqrt3": lambda: mpmath.sqrt(3),
    "sqrt5": lambda: mpmath.sqrt(5),
    "golden": lambda: (1 + mpmath.sqrt(5)) / 2,
    "pi": lambda: mpmath.pi,
    "e": lambda: mpmath.e,
}


@dataclass(frozen=True)
class Real:
    """A real number that is either an exact rational or a named irrational.

    ``name`` is one of the named constants, optionally suffixed ``-frac`` to
    take its fractional part; ``sign`` negates it.
    """

    text: str
    exact: Fraction | None = None
    name: str | None = None
    sign: int = 1

    @property
    def is_rational(self) -> bool:
        return self.exact is not None

    def __neg__(self) -> "Real":
        text = self.text[1:] if self.text.startswith("-") else "-" + self.text
        if self.exact is not None:
            return Real(text, -self.exact)
        return Real(text, None, self.name, -self.sign)

    def mp(self, bits: int) -> mpmath.mpf:
        with mpmath.workprec(bits + 32):
            if self.exact is not None:
                return mpmath.mpf(self.exact.numerator) / self.exact.denominator
            base = self.name[:-5] if self.name.endswith("-frac") else self.name
            v = _NAMED[base]()
            if self.name.endswith("-frac"):
                v = v - mpmath.floor(v)
            return self.sign * v

    def fixed(self, bits: int) -> int:
        """``floor(x * 2**bits)``; exact for rationals, correct up to one unit otherwise."""
        if self.exact is not None:
            return math.floor(self.exact * (1 << bits))
        with mpmath.workprec(bits + 64):
            return int(mpmath.floor(self.mp(bits + 32) * mpmath.mpf(2) ** bits))

    def __float__(self) -> float:
        return float(self.exact) if self.exact is not None else float(self.mp(64))


def parse_real(token: str | float | int | Fraction | Real) -> Real:
    """Parse ``1.5``, ``3/2``, ``sqrt2``, ``pi-frac`` and friends."""
    if isinstance(token, Real):
        return token
    if isinstance(token, (int, Fraction)):
        return Real(str(token), Fraction(token))
    if isinstance(token, float):
        # decimal literal semantics: 1.3 means 13/10, not the binary double
        return Real(repr(token), Fraction(repr(token)))
    t = token.strip()
    if t.startswith("-"):
        return -parse_real(t[1:])
    base = t[:-5] if t.endswith("-frac") else t
    if base in _NAMED:
        return Real(t, None, t)
    try:
        return Real(t, Fraction(t))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a real literal or named constant: {token!r}") from None


# ---------------------------------------------------------------------------
# floors of n**alpha


def power_floor_values(alpha: Real, n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``floor(n**alpha)`` for positive integers ``n``, plus an ambiguity mask.

    Rational ``alpha = p/q`` uses integer ``q``-th roots of ``n**p`` and is
    exact.  Irrational ``alpha`` is evaluated with mpmath at a precision
    that scales with the size of the result.
    """
    n = np.asarray(n, dtype=np.int64)
    if np.any(n < 1):
        raise ValueError("power_floor is defined for n >= 1")
    out = np.empty(n.shape, dtype=object)
    flags = np.zeros(n.shape, dtype=bool)
    if alpha.is_rational:
        p, q = alpha.exact.numerator, alpha.exact.denominator
        if p <= 0:
            raise ValueError("alpha must be positive")
        for i, v in enumerate(n.tolist()):
            out[i] = int(gmpy2.iroot(gmpy2.mpz(v) ** p, q)[0])
        return _as_int_array(out), flags
    a_hi = float(alpha)
    top = float(n.max()) ** a_hi if n.size else 1.0
    bits = int(math.log2(top + 2)) + AMBIGUITY_BITS + 40
    with mpmath.workprec(bits):
        a = alpha.mp(bits)
        eps = mpmath.mpf(2) ** -AMBIGUITY_BITS
        for i, v in enumerate(n.tolist()):
            if v == 1:
                out[i] = 1
                continue
            x = mpmath.power(v, a)
            f = mpmath.floor(x)
            out[i] = int(f)
            r = x - f
            flags[i] = r < eps or 1 - r < eps
    return _as_int_array(out), flags


def _as_int_array(values: np.ndarray) -> np.ndarray:
    try:
        return values.astype(np.int64)
    except OverflowError:
        return values


# ---------------------------------------------------------------------------
# generalised polynomials  c_1 n^{e_1} + ... + c_k n^{e_k}

_TERM = re.compile(r"([+-]?)\s*([^+\-]+)")


@dataclass(frozen=True)
class GenPoly:
    terms: tuple[tuple[Real, int], ...]

    @property
    def text(self) -> str:
        parts = []
        for c, e in self.terms:
            parts.append(f"{c.text}*n^{e}" if e else c.text)
        return "+".join(parts).replace("+-", "-")

    def has_irrational_term(self) -> bool:
        return any(not c.is_rational and e >= 1 for c, e in self.terms)


def parse_genpoly(text: str) -> GenPoly:
    """Parse ``sqrt2*n^4-pi*n^2`` style expressions into coefficient/exponent pairs."""
    src = text.replace(" ", "")
    if not src:
        raise ValueError("empty polynomial")
    terms = []
    pos = 0
    for m in _TERM.finditer(src):
        if m.start() != pos:
            raise ValueError(f"cannot parse polynomial near {src[pos:]!r}")
        pos = m.end()
        sign, body = m.group(1), m.group(2)
        if "n" in body:
            if "*" in body:
                coef, mono = body.rsplit("*", 1)
            else:
                coef, mono = "1", body
            if mono == "n":
                exp = 1
            elif mono.startswith("n^"):
                exp = int(mono[2:])
            else:
                raise ValueError(f"bad monomial {mono!r} in {text!r}")
        else:
            coef, exp = body, 0
        c = parse_real(coef)
        terms.append((-c if sign == "-" else c, exp))
    if pos != len(src):
        raise ValueError(f"cannot parse polynomial near {src[pos:]!r}")
    return GenPoly(tuple(terms))


def genpoly_floor_values(poly: GenPoly, n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``floor(poly(n))`` with an ambiguity mask.

    Coefficients become ``bits``-bit fixed point integers, each off by less
    than one unit; the accumulated error at ``n`` is below
    ``sum |n|**e`` units, and a floor is trusted only when the fractional
    part clears that error by the ambiguity margin.
    """
    n = np.asarray(n, dtype=np.int64)
    nmax = int(np.abs(n).max()) if n.size else 1
    spread = sum(max(nmax, 1) ** e for _, e in poly.terms)
    bits = spread.bit_length() + AMBIGUITY_BITS + 24
    coefs = [(c.fixed(bits), e) for c, e in poly.terms]
    one = 1 << bits
    margin = one >> AMBIGUITY_BITS
    out = np.empty(n.shape, dtype=object)
    flags = np.zeros(n.shape, dtype=bool)
    for i, v in enumerate(n.tolist()):
        acc = 0
        err = 0
        for C, e in coefs:
            pe = v**e
            acc += C * pe
            err += abs(pe)
        fl, rem = divmod(acc, one)
        out[i] = fl
        flags[i] = rem < err + margin or one - rem <= err + margin
    return _as_int_array(out), flags
