"""Averaging sequences as finitely supported measures on the integers.

A :class:`FiniteMeasure` stores integer numerators over one common
denominator, so masses add exactly and restriction never loses precision.
Floating point enters only when a Weyl sum is evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from . import integersets
from .reals import GenPoly, Real, genpoly_floor_values, parse_genpoly, parse_real, power_floor_values
from .serial import rational
from .windowsets import WindowSet

Membership = Union[WindowSet, Callable[[np.ndarray], np.ndarray]]

DEFAULT_GRID = 1024


@dataclass(frozen=True, eq=False)
class FiniteMeasure:
    """Weights ``numerators[i] / denominator`` on the sorted ``support``.

    ``flagged`` lists support points whose floor evaluation came within
    ``2**-40`` of an integer.
    """

    support: np.ndarray
    numerators: np.ndarray
    denominator: int
    flagged: tuple[int, ...] = ()

    def __post_init__(self):
        s = np.asarray(self.support, dtype=np.int64)
        w = np.asarray(self.numerators, dtype=np.int64)
        if s.shape != w.shape or s.ndim != 1:
            raise ValueError("support and weights must be 1-d and of equal length")
        if s.size > 1 and np.any(np.diff(s) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "numerators", w)

    @classmethod
    def uniform(cls, points: Sequence[int] | np.ndarray, flagged: Sequence[int] = ()) -> "FiniteMeasure":
        """Normalised counting measure on a multiset; repeated points merge their mass."""
        pts = np.asarray(points, dtype=np.int64)
        if pts.size == 0:
            raise ValueError("cannot normalise counting measure on an empty set")
        support, counts = np.unique(pts, return_counts=True)
        return cls(support, counts, int(pts.size), tuple(sorted(set(int(x) for x in flagged))))

    @classmethod
    def from_weights(cls, weights: dict[int, Fraction]) -> "FiniteMeasure":
        items = sorted((int(k), Fraction(v)) for k, v in weights.items() if v != 0)
        den = math.lcm(*(v.denominator for _, v in items)) if items else 1
        return cls(np.array([k for k, _ in items], dtype=np.int64),
                   np.array([int(v * den) for _, v in items], dtype=np.int64), den)

    @property
    def total(self) -> Fraction:
        return Fraction(int(self.numerators.sum()), self.denominator)

    @property
    def is_probability(self) -> bool:
        return self.total == 1

    @property
    def is_subprobability(self) -> bool:
        return self.total < 1

    def weight(self, n: int) -> Fraction:
        i = np.searchsorted(self.support, n)
        if i < self.support.size and self.support[i] == n:
            return Fraction(int(self.numerators[i]), self.denominator)
        return Fraction(0)

    def weights(self) -> list[Fraction]:
        return [Fraction(int(w), self.denominator) for w in self.numerators]

    def float_weights(self) -> np.ndarray:
        return self.numerators.astype(np.float64) / self.denominator

    def mass(self, A: Membership) -> Fraction:
        return Fraction(int(self.numerators[_member_mask(A, self.support)].sum()), self.denominator)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteMeasure):
            return NotImplemented
        a, b = self._canonical(), other._canonical()
        return (np.array_equal(a[0], b[0]) and np.array_equal(a[1] * b[2], b[1] * a[2]))

    def _canonical(self):
        keep = self.numerators > 0
        return self.support[keep], self.numerators[keep], self.denominator

    def to_json(self) -> dict:
        return {
            "support": self.support.tolist(),
            "numerators": self.numerators.tolist(),
            "denominator": self.denominator,
            "total": rational(self.total),
            "flagged": list(self.flagged),
        }


def _member_mask(A: Membership, points: np.ndarray) -> np.ndarray:
    if isinstance(A, WindowSet):
        if points.size and (points.min() < A.lo or points.max() > A.hi):
            raise ValueError(f"points fall outside the set's window [{A.lo}, {A.hi}]")
        return A.bits[points - A.lo]
    return np.asarray(A(points), dtype=bool)


def restrict(nu: FiniteMeasure, A: Membership) -> FiniteMeasure:
    """``E -> nu(A ∩ E)``; a sub-probability measure with total ``nu(A)``."""
    keep = _member_mask(A, nu.support)
    flagged = tuple(x for x in nu.flagged if keep[np.searchsorted(nu.support, x)])
    return FiniteMeasure(nu.support[keep], nu.numerators[keep], nu.denominator, flagged)


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class SequenceFamily:
    """A rule producing the ``j``-th finite set of an averaging sequence.

    kinds: ``interval`` (``1..j``), ``power_floor`` (``floor(n**alpha)``,
    ``n <= j``), ``genpoly`` (``floor(poly(n))``, ``n <= j``) and
    ``explicit`` (the first ``j`` entries of a list or named set).
    """

    kind: str
    alpha: Real | None = None
    poly: GenPoly | None = None
    values: tuple[int, ...] | None = None
    named: str | None = None
    k: int = 2
    description: str = ""

    @classmethod
    def interval(cls) -> "SequenceFamily":
        return cls("interval", description="interval")

    @classmethod
    def power_floor(cls, alpha) -> "SequenceFamily":
        a = parse_real(alpha)
        if a.is_rational and a.exact.denominator == 1:
            raise ValueError(f"power_floor needs a non-integer exponent, got {a.text}")
        if float(a) <= 0:
            raise ValueError("power_floor needs a positive exponent")
        return cls("power_floor", alpha=a, description=f"power:{a.text}")

    @classmethod
    def genpoly(cls, poly: str | GenPoly, declared_irrational: bool = False) -> "SequenceFamily":
        """``declared_irrational`` vouches for an irrational degree->=1 coefficient
        when no named irrational constant appears."""
        p = parse_genpoly(poly) if isinstance(poly, str) else poly
        if not (declared_irrational or p.has_irrational_term()):
            raise ValueError("genpoly needs an irrational coefficient on a term of degree >= 1")
        return cls("genpoly", poly=p, description=f"genpoly:{p.text}")

    @classmethod
    def explicit(cls, values: Sequence[int], description: str = "explicit") -> "SequenceFamily":
        return cls("explicit", values=tuple(int(v) for v in values), description=description)

    @classmethod
    def explicit_set(cls, kind: str, k: int = 2) -> "SequenceFamily":
        """First ``j`` positive elements of a named example set (squares, primes, ...)."""
        if kind not in integersets.KINDS or kind == "sparse_digit":
            raise ValueError(f"no explicit family for {kind!r}")
        return cls("explicit", named=kind, k=k,
                   description=f"explicit:{kind}" + (f":{k}" if kind == "k_th_powers" else ""))

    def terms(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """The generating values for ``n = 1..j`` (with repetitions) and their ambiguity flags."""
        if j < 1:
            raise ValueError("j must be at least 1")
        n = np.arange(1, j + 1, dtype=np.int64)
        if self.kind == "interval":
            return n, np.zeros(j, dtype=bool)
        if self.kind == "power_floor":
            return power_floor_values(self.alpha, n)
        if self.kind == "genpoly":
            return genpoly_floor_values(self.poly, n)
        if self.kind == "explicit":
            if self.named is not None:
                vals = integersets.first_terms(self.named, j, k=self.k)
            else:
                if j > len(self.values):
                    raise ValueError(f"explicit family has only {len(self.values)} values")
                vals = np.array(self.values[:j], dtype=np.int64)
            return vals, np.zeros(j, dtype=bool)
        raise ValueError(f"unknown family kind {self.kind!r}")

    def to_json(self) -> dict:
        return {"kind": self.kind, "description": self.description}


def measure_at(family: SequenceFamily, j: int) -> FiniteMeasure:
    """Normalised counting measure on the family's ``j``-th set."""
    vals, flags = family.terms(j)
    return FiniteMeasure.uniform(vals, vals[flags].tolist())


# ---------------------------------------------------------------------------
# Weyl sums


def weyl_sum(nu: FiniteMeasure, theta: float | Fraction, turns: bool = False) -> complex:
    """``sum_n nu(n) exp(i n theta)``.

    With ``turns=True`` ``theta`` is a rational number of full turns
    (``theta = 2*pi*t``) and ``n*t`` is reduced mod 1 exactly.
    """
    w = nu.float_weights()
    if turns:
        t = Fraction(theta)
        r = (nu.support.astype(object) * t.numerator) % t.denominator
        phase = 2 * np.pi * np.array([int(x) for x in r], dtype=np.float64) / t.denominator
    else:
        phase = np.mod(nu.support.astype(np.float64) * float(theta), 2 * np.pi)
    return complex(np.sum(w * np.exp(1j * phase)))


def weyl_sums_uniform_grid(nu: FiniteMeasure, G: int) -> np.ndarray:
    """Weyl sums at every ``theta = 2*pi*k/G``, ``k = 0..G-1``.

    Only ``n mod G`` matters on this grid, so the sums are the DFT of the
    residue histogram of ``nu``.
    """
    if G < 1:
        raise ValueError("grid size must be positive")
    hist = np.bincount(np.mod(nu.support, G), weights=nu.float_weights(), minlength=G)
    return G * np.fft.ifft(hist)


@dataclass(frozen=True)
class ProfileRow:
    j: int
    theta_argmax: float
    max_abs: float
    k_argmax: int | None = None

    def to_json(self) -> dict:
        return {"j": self.j, "theta_argmax": self.theta_argmax, "max_abs": self.max_abs,
                "k_argmax": self.k_argmax}


@dataclass
class EquidistributionProfile:
    family: str
    grid: str
    rows: list[ProfileRow] = field(default_factory=list)
    flagged_counts: dict[int, int] = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = ["j,theta_argmax,max_abs"]
        lines += [f"{r.j},{r.theta_argmax:.17g},{r.max_abs:.17g}" for r in self.rows]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"family": self.family, "grid": self.grid,
                "rows": [r.to_json() for r in self.rows],
                "flagged_counts": {str(k): v for k, v in self.flagged_counts.items()}}


def equidistribution_profile(family: SequenceFamily, theta_grid: int | Sequence[float] = DEFAULT_GRID,
                             j_list: Sequence[int] = (1000, 10000, 100000)) -> EquidistributionProfile:
    """Max of ``|weyl_sum|`` over a theta grid, for each ``j``.

    An integer ``theta_grid = G`` means ``{2*pi*k/G : 1 <= k <= G-1}``;
    otherwise an explicit list of radians, from which 0 is removed.
    """
    prof = EquidistributionProfile(family.description,
                                   f"2pi*k/{theta_grid}" if isinstance(theta_grid, int) else "explicit")
    for j in j_list:
        nu = measure_at(family, j)
        prof.flagged_counts[j] = len(nu.flagged)
        if isinstance(theta_grid, int):
            vals = np.abs(weyl_sums_uniform_grid(nu, theta_grid))[1:]
            k = int(np.argmax(vals)) + 1
            prof.rows.append(ProfileRow(j, 2 * np.pi * k / theta_grid, float(vals[k - 1]), k))
        else:
            thetas = [float(t) for t in theta_grid if float(t) % (2 * np.pi) != 0.0]
            vals = np.array([abs(weyl_sum(nu, t)) for t in thetas])
            i = int(np.argmax(vals))
            prof.rows.append(ProfileRow(j, thetas[i], float(vals[i])))
    return prof


# ---------------------------------------------------------------------------
# density along an averaging sequence


@dataclass(frozen=True)
class DNuEstimate:
    """``max_{j in [j_lo, j_hi]} nu_j(A)`` with the maximising ``j``."""

    value: Fraction
    j_witness: int
    count: int
    j_range: tuple[int, int]

    def to_json(self) -> dict:
        return {"value": rational(self.value), "j_witness": self.j_witness, "count": self.count,
                "j_range": list(self.j_range)}


def d_nu(A: Membership, family: SequenceFamily, j_max: int, j_min: int | None = None) -> DNuEstimate:
    """Tail maximum of ``nu_j(A)`` over ``j in [j_max // 2, j_max]``.

    Each ``nu_j`` puts mass ``1/j`` on every generating term, so
    ``nu_j(A)`` is a running count divided by ``j``.
    """
    if j_max < 1:
        raise ValueError("j_max must be positive")
    j_lo = max(1, j_max // 2) if j_min is None else j_min
    vals, _ = family.terms(j_max)
    hits = np.cumsum(_member_mask(A, vals), dtype=np.int64)
    j = np.arange(1, j_max + 1, dtype=np.int64)
    tail = slice(j_lo - 1, j_max)
    ratio = hits[tail] / j[tail]
    cand = np.flatnonzero(ratio >= ratio.max() - 1e-9) + j_lo - 1
    best = max(cand.tolist(), key=lambda i: (Fraction(int(hits[i]), i + 1), -i))
    return DNuEstimate(Fraction(int(hits[best]), best + 1), best + 1, int(hits[best]), (j_lo, j_max))
