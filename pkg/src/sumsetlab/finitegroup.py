"""Exact computation on finite abelian groups ``Z/q1 x ... x Z/qk``.

Elements are residue vectors; internally an element is its flat C-order
index into an array of shape ``moduli``.  Functions carry integer
numerators over one common denominator so every quantity is an exact
rational.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .integersets import KINDS, enumerate_set, example_set  # noqa: F401  (re-exported)
from .serial import rational
from .windowsets import WindowSet

MEMORY_CAP = 2**21
# transform results must land this close to an integer before rounding is trusted
ROUNDING_GUARD = 0.25


class BlockerError(ValueError):
    """No coset of the basis fits the measure budget."""

    def __init__(self, message: str, min_cost: Fraction, subgroup: tuple[int, ...] | None):
        super().__init__(message)
        self.min_cost = min_cost
        self.subgroup = subgroup

    def to_json(self) -> dict:
        return {"status": "failure", "reason": str(self), "min_cost": rational(self.min_cost),
                "subgroup": list(self.subgroup) if self.subgroup else None}


# ---------------------------------------------------------------------------
# groups and subsets


@dataclass(frozen=True)
class FiniteAbelianGroup:
    moduli: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(q) for q in self.moduli)
        if not m or any(q < 1 for q in m):
            raise ValueError("moduli must be positive integers")
        if math.prod(m) > MEMORY_CAP:
            raise MemoryError(f"group order {math.prod(m)} exceeds the cap of {MEMORY_CAP} elements")
        object.__setattr__(self, "moduli", m)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteAbelianGroup":
        return cls((n,))

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.moduli

    @property
    def spec(self) -> str:
        if len(self.moduli) == 1:
            return f"cyclic:{self.moduli[0]}"
        return "product:" + ",".join(map(str, self.moduli))

    def index_of(self, residues: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(int(r) % q for r, q in zip(residues, self.moduli)), self.moduli))

    def residues(self, index: int) -> tuple[int, ...]:
        return tuple(int(v) for v in np.unravel_index(int(index), self.moduli))

    def integer_index(self, n: np.ndarray | int) -> np.ndarray:
        """Flat index of the image of the integer(s) ``n`` under ``n -> (n mod q_i)``."""
        n = np.asarray(n, dtype=np.int64)
        return np.ravel_multi_index(tuple(np.mod(n, q) for q in self.moduli), self.moduli)

    def negate(self, idx: np.ndarray) -> np.ndarray:
        res = np.unravel_index(idx, self.moduli)
        return np.ravel_multi_index(tuple(np.mod(-r, q) for r, q in zip(res, self.moduli)), self.moduli)

    def to_json(self) -> dict:
        return {"moduli": list(self.moduli), "order": self.order, "spec": self.spec}


def parse_group(text: str) -> FiniteAbelianGroup:
    """``cyclic:180180`` or ``product:4,9,5,7,11,13``."""
    kind, _, body = text.partition(":")
    try:
        if kind == "cyclic":
            return FiniteAbelianGroup((int(body),))
        if kind == "product":
            return FiniteAbelianGroup(tuple(int(v) for v in body.split(",")))
    except ValueError as exc:
        raise ValueError(f"group grammar: {exc}") from None
    raise ValueError(f"group grammar: expected 'cyclic:<q>' or 'product:<q1>,<q2>,...', got {text!r}")


@dataclass(frozen=True, eq=False)
class GroupSubset:
    group: FiniteAbelianGroup
    mask: np.ndarray
    scan_bound: int | None = None
    stable: bool | None = None

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool).reshape(self.group.shape).copy()
        m.flags.writeable = False
        object.__setattr__(self, "mask", m)

    @classmethod
    def from_indices(cls, group: FiniteAbelianGroup, idx: Iterable[int]) -> "GroupSubset":
        m = np.zeros(group.order, dtype=bool)
        m[np.asarray(list(idx) if not isinstance(idx, np.ndarray) else idx, dtype=np.int64)] = True
        return cls(group, m)

    @classmethod
    def from_residues(cls, group: FiniteAbelianGroup, elems: Iterable[Sequence[int] | int]) -> "GroupSubset":
        idx = [group.index_of(e if not np.isscalar(e) else (e,)) for e in elems]
        return cls.from_indices(group, idx)

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @property
    def measure(self) -> Fraction:
        return Fraction(self.size, self.group.order)

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask.ravel())

    def residues(self) -> list[tuple[int, ...]]:
        return [self.group.residues(i) for i in self.indices()]

    def complement(self) -> "GroupSubset":
        return GroupSubset(self.group, ~self.mask)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroupSubset) and self.group == other.group and np.array_equal(self.mask, other.mask)

    def __hash__(self) -> int:
        return hash((self.group, self.mask.tobytes()))

    def __add__(self, other: "GroupSubset") -> "GroupSubset":
        return subset_sum(self, other)

    def to_json(self) -> dict:
        out = {"group": self.group.to_json(), "size": self.size, "measure": rational(self.measure)}
        if self.size <= 4096:
            out["elements"] = self.indices().tolist()
        if self.scan_bound is not None:
            out["scan_bound"] = self.scan_bound
            out["stable"] = self.stable
        return out


@dataclass(frozen=True, eq=False)
class GroupFunction:
    """``f(x) = num[x] / den``."""

    group: FiniteAbelianGroup
    num: np.ndarray
    den: int = 1

    def __post_init__(self):
        n = np.asarray(self.num)
        if n.dtype != object:
            n = n.astype(np.int64)
        n = n.reshape(self.group.shape).copy()
        n.flags.writeable = False
        if self.den < 1:
            raise ValueError("denominator must be positive")
        object.__setattr__(self, "num", n)

    @classmethod
    def from_values(cls, group: FiniteAbelianGroup, values: Sequence, unit: bool = True) -> "GroupFunction":
        vals = [Fraction(v) if not isinstance(v, float) else Fraction(repr(v)) for v in np.ravel(values)]
        if len(vals) != group.order:
            raise ValueError(f"need {group.order} values, got {len(vals)}")
        den = math.lcm(*[v.denominator for v in vals])
        f = cls(group, _int_array([v.numerator * (den // v.denominator) for v in vals]), den)
        if unit:
            f.check_unit()
        return f

    @classmethod
    def indicator(cls, group: FiniteAbelianGroup, elems: Iterable) -> "GroupFunction":
        return cls(group, GroupSubset.from_residues(group, elems).mask.astype(np.int64), 1)

    @classmethod
    def of_subset(cls, S: GroupSubset) -> "GroupFunction":
        return cls(S.group, S.mask.astype(np.int64), 1)

    @classmethod
    def constant(cls, group: FiniteAbelianGroup, c) -> "GroupFunction":
        c = Fraction(c)
        return cls(group, np.full(group.shape, c.numerator, dtype=np.int64), c.denominator)

    def check_unit(self) -> "GroupFunction":
        if np.any(self.num < 0) or np.any(self.num > self.den):
            raise ValueError("function values must lie in [0, 1]")
        return self

    def value(self, residues: Sequence[int] | int) -> Fraction:
        r = (residues,) if np.isscalar(residues) else tuple(residues)
        return Fraction(int(self.num[tuple(int(v) % q for v, q in zip(r, self.group.moduli))]), self.den)

    def values(self) -> list[Fraction]:
        return [Fraction(int(v), self.den) for v in self.num.ravel()]

    @property
    def mean(self) -> Fraction:
        return Fraction(int(self.num.sum(dtype=object) if self.num.dtype == object else self.num.sum()),
                        self.den * self.group.order)

    @property
    def sup(self) -> Fraction:
        return Fraction(int(self.num.max()), self.den)

    def support(self) -> GroupSubset:
        return GroupSubset(self.group, self.num != 0)

    def shift(self, a: Sequence[int] | int) -> "GroupFunction":
        """``x -> f(x - a)``."""
        a = (a,) if np.isscalar(a) else tuple(a)
        return GroupFunction(self.group, np.roll(self.num, tuple(int(v) for v in a), axis=tuple(range(len(a)))),
                             self.den)

    def reduced(self) -> "GroupFunction":
        g = math.gcd(self.den, *[int(v) for v in np.unique(self.num)])
        if g <= 1:
            return self
        return GroupFunction(self.group, self.num // g, self.den // g)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupFunction) or other.group != self.group:
            return False
        # a/b == c/d  <=>  a d == c b
        return bool(np.all(self.num.astype(object) * other.den == other.num.astype(object) * self.den))

    def __hash__(self) -> int:
        r = self.reduced()
        return hash((self.group, r.den, tuple(int(v) for v in r.num.ravel())))

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "denominator": self.den,
                "numerators": [int(v) for v in self.num.ravel()]}


def _int_array(vals: Sequence[int]) -> np.ndarray:
    if all(-(2**62) < v < 2**62 for v in vals):
        return np.array(vals, dtype=np.int64)
    return np.array(vals, dtype=object)


def parse_function(text: str, group: FiniteAbelianGroup) -> GroupFunction:
    """``ind:0,1`` (indicator of listed elements; use ``;`` inside an element
    of a product group, e.g. ``ind:0;1,2;3``), ``const:1/2``, or
    ``values:1/2,0,1,...`` listing every value in index order."""
    kind, _, body = text.partition(":")
    try:
        if kind == "ind":
            elems = [tuple(int(v) for v in e.split(";")) for e in body.split(",") if e]
            return GroupFunction.indicator(group, elems)
        if kind == "const":
            f = GroupFunction.constant(group, Fraction(body))
            return f.check_unit()
        if kind == "values":
            return GroupFunction.from_values(group, body.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"function grammar: {exc}") from None
    raise ValueError(f"function grammar: expected 'ind:<elems>', 'const:<q>' or 'values:<list>', got {text!r}")


# ---------------------------------------------------------------------------
# convolution


def _cyclic_conv_direct(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``c(t) = sum_z a(z) b(t - z)`` on the group of shape ``a.shape``."""
    big = a.dtype == object or b.dtype == object or _bound(a) * _bound(b) * a.size >= 2**62
    out = np.zeros(a.shape, dtype=object if big else np.int64)
    bb = b.astype(object) if big else b
    axes = tuple(range(a.ndim))
    for z in zip(*np.nonzero(a)):
        out += a[z] * np.roll(bb, z, axis=axes)
    return out


def _bound(a: np.ndarray) -> int:
    return int(np.max(np.abs(a))) if a.size else 0


def _cyclic_conv_transform(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Same as the direct sum via floating FFTs on split limbs.

    Each limb product is bounded by ``2**(2*bits) * |G| <= 2**40``, so
    double-precision FFT error stays far below ``ROUNDING_GUARD``; any
    result that strays further raises instead of rounding silently.
    """
    if a.dtype == object or b.dtype == object or np.any(a < 0) or np.any(b < 0):
        raise ArithmeticError("transform path handles non-negative int64 inputs only")
    n = a.size
    bits = max(1, (40 - n.bit_length()) // 2)
    mask = (1 << bits) - 1

    def limbs(x):
        out = []
        x = x.copy()
        while True:
            out.append(x & mask)
            x >>= bits
            if not x.any():
                return out

    la, lb = limbs(a), limbs(b)
    fa = [np.fft.fftn(v.astype(np.float64)) for v in la]
    fb = [np.fft.fftn(v.astype(np.float64)) for v in lb]
    big = _bound(a) * _bound(b) * n >= 2**62
    total = np.zeros(a.shape, dtype=object if big else np.int64)
    for i, x in enumerate(fa):
        for j, y in enumerate(fb):
            # circular convolution: ifft(fft(a) * fft(b))
            r = np.fft.ifftn(x * y).real
            rr = np.rint(r)
            if np.max(np.abs(r - rr), initial=0.0) >= ROUNDING_GUARD:
                raise ArithmeticError("transform rounding guard tripped")
            part = rr.astype(np.int64)
            total += (part.astype(object) if big else part) << (bits * (i + j))
    return total


def convolve(f: GroupFunction, g: GroupFunction, method: str = "auto") -> GroupFunction:
    """``(f*g)(t) = (1/|G|) sum_z f(z) g(t - z)``, exactly."""
    if f.group != g.group:
        raise ValueError("functions live on different groups")
    if method not in ("auto", "direct", "transform"):
        raise ValueError(f"unknown method {method!r}")
    G = f.group
    if method == "transform" or (method == "auto" and np.count_nonzero(f.num) * G.order > 2**16):
        try:
            c = _cyclic_conv_transform(f.num, g.num)
        except ArithmeticError:
            if method == "transform":
                raise
            c = _cyclic_conv_direct(f.num, g.num)
    else:
        c = _cyclic_conv_direct(f.num, g.num)
    return GroupFunction(G, c, f.den * g.den * G.order).reduced()


def convolve_array(h: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Floating normalized convolution on ``Z/g1 x ... x Z/gd``: ``(1/N) sum_b h(t-b) psi(b)``."""
    h = np.asarray(h)
    psi = np.asarray(psi)
    if h.shape != psi.shape:
        raise ValueError("arrays must share the group shape")
    return np.fft.ifftn(np.fft.fftn(h) * np.fft.fftn(psi)) / h.size


def subset_sum(E: GroupSubset, K: GroupSubset) -> GroupSubset:
    """``E + K`` as a subset of the group."""
    if E.group != K.group:
        raise ValueError("subsets live on different groups")
    a, b = E.mask.astype(np.int64), K.mask.astype(np.int64)
    try:
        c = _cyclic_conv_transform(a, b)
    except ArithmeticError:
        c = _cyclic_conv_direct(a, b)
    return GroupSubset(E.group, c > 0)


# ---------------------------------------------------------------------------
# Steinhaus bounds


@dataclass(frozen=True)
class SteinhausReport:
    mean_f: Fraction
    mean_g: Fraction
    support_measure: Fraction
    sup: Fraction
    mean_conv: Fraction

    @property
    def support_ok(self) -> bool:
        return self.support_measure >= max(self.mean_f, self.mean_g)

    @property
    def sup_ok(self) -> bool:
        return self.sup <= min(self.mean_f, self.mean_g)

    @property
    def mean_ok(self) -> bool:
        return self.mean_conv == self.mean_f * self.mean_g

    @property
    def passed(self) -> bool:
        return self.support_ok and self.sup_ok and self.mean_ok

    def to_json(self) -> dict:
        return {"mean_f": rational(self.mean_f), "mean_g": rational(self.mean_g),
                "support": rational(self.support_measure), "sup": rational(self.sup),
                "mean": rational(self.mean_conv), "support_ok": self.support_ok,
                "sup_ok": self.sup_ok, "mean_ok": self.mean_ok, "passed": self.passed}


def steinhaus_check(f: GroupFunction, g: GroupFunction, method: str = "auto") -> SteinhausReport:
    """Support, supremum and mean of ``f*g`` against the means of ``f`` and ``g``."""
    f.check_unit()
    g.check_unit()
    if f.mean <= 0 or g.mean <= 0:
        raise ValueError("both functions need a positive mean")
    c = convolve(f, g, method)
    return SteinhausReport(f.mean, g.mean, c.support().measure, c.sup, c.mean)


# ---------------------------------------------------------------------------
# projections of integer sets


def _residues_of(A, G: FiniteAbelianGroup, bound: int, k: int) -> np.ndarray:
    """Flat indices hit by the elements of ``A`` that the scan bound admits."""
    if isinstance(A, WindowSet):
        e = A.elements()
        return np.unique(G.integer_index(e[np.abs(e) <= bound]))
    if isinstance(A, str):
        if A in ("squares", "k_th_powers"):
            # bound limits the base n of n**k; residues are computed modularly
            kk = 2 if A == "squares" else k
            n = np.arange(bound + 1, dtype=np.int64)
            res = []
            for q in G.moduli:
                r = np.ones_like(n)
                base = n % q
                for _ in range(kk):
                    r = (r * base) % q
                res.append(r)
            return np.unique(np.ravel_multi_index(tuple(res), G.moduli))
        if A == "all":
            return np.unique(G.integer_index(np.arange(bound + 1)))
        return np.unique(G.integer_index(enumerate_set(A, bound, k)))
    e = np.asarray(list(A), dtype=np.int64)
    return np.unique(G.integer_index(e[np.abs(e) <= bound]))


def default_scan_bound(A, G: FiniteAbelianGroup) -> int:
    if isinstance(A, str) and A in ("squares", "k_th_powers", "all"):
        return 2 * G.order
    if isinstance(A, WindowSet):
        return max(abs(A.lo), abs(A.hi))
    return max(50 * G.order, 10**6)


def project_set(A, G: FiniteAbelianGroup, scan_bound: int | None = None, k: int = 2) -> GroupSubset:
    """Residues of ``A`` in ``G`` (the integer ``n`` maps to ``(n mod q_i)``).

    ``A`` is a kind name from :data:`KINDS` (or ``"all"``), a WindowSet or
    an iterable of integers.  For powers the scan bound limits the base,
    otherwise the element.  ``stable`` records whether halving the bound
    gives the same image.
    """
    bound = scan_bound if scan_bound is not None else default_scan_bound(A, G)
    full = _residues_of(A, G, bound, k)
    half = _residues_of(A, G, bound // 2, k)
    m = np.zeros(G.order, dtype=bool)
    m[full] = True
    return GroupSubset(G, m, bound, bool(np.array_equal(full, half)))


# ---------------------------------------------------------------------------
# coset basis and the Steinhaus converse


def _divisors(q: int) -> list[int]:
    return sorted(d for d in range(1, q + 1) if q % d == 0)


def subgroup_basis(G: FiniteAbelianGroup, max_index: int | None = None) -> list[tuple[int, ...]]:
    """Product subgroups ``H_m = {x : x_i = 0 mod m_i}`` with ``m_i | q_i``, ordered by (index, m).

    For pairwise coprime moduli (and for cyclic groups) these are all subgroups.
    """
    cands = itertools.product(*[_divisors(q) for q in G.moduli])
    out = [m for m in cands if max_index is None or math.prod(m) <= max_index]
    return sorted(out, key=lambda m: (math.prod(m), m))


def _quotient_hist(mask: np.ndarray, G: FiniteAbelianGroup, m: tuple[int, ...]) -> np.ndarray:
    """Counts of members in each coset of ``H_m``, indexed by ``x mod m``."""
    idx = np.flatnonzero(mask.ravel())
    res = np.unravel_index(idx, G.moduli)
    q = np.ravel_multi_index(tuple(r % mi for r, mi in zip(res, m)), m)
    return np.bincount(q, minlength=math.prod(m)).reshape(m)


def _coset_mask(G: FiniteAbelianGroup, m: tuple[int, ...], r: tuple[int, ...]) -> np.ndarray:
    grids = np.ogrid[tuple(slice(0, q) for q in G.moduli)]
    mask = np.ones(G.shape, dtype=bool)
    for g, mi, ri in zip(grids, m, r):
        mask = mask & (g % mi == ri % mi)
    return mask


def _removal_mask(G: FiniteAbelianGroup, E: GroupSubset, m: tuple[int, ...], r: tuple[int, ...]) -> np.ndarray:
    """``V - E`` for the coset ``V = r + H_m``: all ``x`` with ``x mod m`` in ``r - (E mod m)``."""
    pe = _quotient_hist(E.mask, G, m) > 0
    # x + e in V  <=>  (x mod m) in r - pe
    allowed = np.roll(np.flip(pe, axis=tuple(range(len(m)))), tuple(ri + 1 for ri in r),
                      axis=tuple(range(len(m))))
    grids = np.ogrid[tuple(slice(0, q) for q in G.moduli)]
    return allowed[tuple(g % mi for g, mi in zip(grids, m))]


@dataclass(frozen=True, eq=False)
class BlockerCertificate:
    group: FiniteAbelianGroup
    E: GroupSubset
    eps: Fraction
    cosets: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    costs: tuple[Fraction, ...]
    K: GroupSubset
    z: tuple[int, ...] = ()
    notes: dict = field(default_factory=dict)

    @property
    def measure_K(self) -> Fraction:
        return self.K.measure

    @property
    def budget_used(self) -> Fraction:
        return sum(self.costs, Fraction(0))

    def replay(self) -> bool:
        """Re-derive ``K`` and check every coset against ``E + K`` by a direct loop."""
        G = self.group
        removed = np.zeros(G.shape, dtype=bool)
        for m, r in self.cosets:
            removed |= _removal_mask(G, self.E, m, r)
        if not np.array_equal(~removed, self.K.mask):
            return False
        if self.K.measure < 1 - self.budget_used:
            return False
        Kflat = self.K.mask.ravel()
        Eres = [np.array(v) for v in np.unravel_index(self.E.indices(), G.moduli)]
        for m, r in self.cosets:
            v = np.flatnonzero(_coset_mask(G, m, r).ravel())
            vres = np.unravel_index(v, G.moduli)
            for e in zip(*Eres):
                diff = np.ravel_multi_index(tuple((vr - ei) % q for vr, ei, q in zip(vres, e, G.moduli)),
                                            G.moduli)
                if Kflat[diff].any():
                    return False
        return True

    def omitted_cosets_ok(self) -> bool:
        """``E + K`` omits at least one coset of every covered subgroup (checked by convolution)."""
        EK = subset_sum(self.E, self.K).mask
        return all(not (EK & _coset_mask(self.group, m, r)).any() for m, r in self.cosets)

    def to_json(self) -> dict:
        return {"kind": "blocker_certificate", "group": self.group.to_json(),
                "eps": rational(self.eps), "z": list(self.z),
                "E": self._E_json(),
                "cosets": [{"subgroup_moduli": list(m), "index": math.prod(m), "representative": list(r),
                            "cost": rational(c)} for (m, r), c in zip(self.cosets, self.costs)],
                "measure_K": rational(self.measure_K), "budget_used": rational(self.budget_used),
                "notes": self.notes}

    def _E_json(self) -> dict:
        out = {"size": self.E.size, "measure": rational(self.E.measure), "scan_bound": self.E.scan_bound,
               "stable": self.E.stable}
        source = self.notes.get("source")
        if source is not None and self.E.size > 4096:
            # large projections are stored by how to regenerate them
            out["source"] = source
        else:
            out["elements"] = self.E.indices().tolist()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "BlockerCertificate":
        G = FiniteAbelianGroup(tuple(obj["group"]["moduli"]))
        Ej = obj["E"]
        if "elements" in Ej:
            E = GroupSubset.from_indices(G, Ej["elements"])
            E = GroupSubset(G, E.mask, Ej.get("scan_bound"), Ej.get("stable"))
        else:
            src = Ej["source"]
            E = project_set(src["kind"], G, Ej["scan_bound"], src.get("k", 2))
        if E.size != Ej["size"]:
            raise ValueError("E does not match its recorded size")
        cosets = tuple((tuple(c["subgroup_moduli"]), tuple(c["representative"])) for c in obj["cosets"])
        costs = tuple(Fraction(c["cost"]["num"], c["cost"]["den"]) for c in obj["cosets"])
        removed = np.zeros(G.shape, dtype=bool)
        for m, r in cosets:
            removed |= _removal_mask(G, E, m, r)
        eps = Fraction(obj["eps"]["num"], obj["eps"]["den"])
        cert = cls(G, E, eps, cosets, costs, GroupSubset(G, ~removed), tuple(obj.get("z", ())),
                   obj.get("notes", {}))
        mk = obj.get("measure_K")
        if mk is not None and Fraction(mk["num"], mk["den"]) != cert.measure_K:
            raise ValueError("recorded m(K) disagrees with the cosets and E")
        return cert


def _conv_quotient(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact ``c(r) = sum_u a(u) b(r - u)`` on the quotient group."""
    try:
        return _cyclic_conv_transform(a.astype(np.int64), b.astype(np.int64))
    except ArithmeticError:
        return _cyclic_conv_direct(a.astype(np.int64), b.astype(np.int64))


def steinhaus_converse(E: GroupSubset, eps, coset_basis: int | Sequence[Sequence[int]] | None = None
                       ) -> BlockerCertificate:
    """Greedy finite analogue of the Steinhaus converse.

    Subgroups are visited in (index, moduli) order.  A subgroup is used
    when its removal cost ``m(V - E) = |E mod m| / index`` still fits the
    strict budget ``sum cost < eps``; among its cosets the one removing the
    fewest surviving points of ``K`` is taken, then the one meeting ``E``
    least, then the smallest representative.  ``K`` is the complement of
    the union of all ``V - E``.
    """
    G = E.group
    eps = Fraction(eps)
    if coset_basis is None or isinstance(coset_basis, int):
        basis = subgroup_basis(G, coset_basis)
    else:
        basis = [tuple(int(v) for v in m) for m in coset_basis]
        for m in basis:
            if len(m) != len(G.moduli) or any(q % mi for q, mi in zip(G.moduli, m)):
                raise ValueError(f"{m} does not index a subgroup of {G.spec}")
    removed = np.zeros(G.shape, dtype=bool)
    chosen, costs = [], []
    spent = Fraction(0)
    min_cost, min_m = None, None
    for m in basis:
        index = math.prod(m)
        pe = _quotient_hist(E.mask, G, m) > 0
        cost = Fraction(int(pe.sum()), index)
        if index > 1 and (min_cost is None or cost < min_cost):
            min_cost, min_m = cost, m
        if index == 1 or spent + cost >= eps:
            continue
        # points x with (x mod m) = r - u, u in (E mod m):  histogram convolved with the reflected image
        new_loss = _conv_quotient(_quotient_hist(~removed, G, m), pe)
        hit_E = _conv_quotient(_quotient_hist(E.mask, G, m), pe)
        # conv(h, pe)(r) = sum_u h(r - u) pe(u) counts x with x + u = r, i.e. x in V - E
        order = np.lexsort((np.arange(index), hit_E.ravel(), new_loss.ravel()))
        r = tuple(int(v) for v in np.unravel_index(int(order[0]), m))
        removed |= _removal_mask(G, E, m, r)
        chosen.append((m, r))
        costs.append(cost)
        spent += cost
    if not chosen:
        raise BlockerError(f"no coset fits the budget eps={eps}; cheapest m(V-E) is {min_cost}",
                           min_cost if min_cost is not None else Fraction(1), min_m)
    return BlockerCertificate(G, E, eps, tuple(chosen), tuple(costs), GroupSubset(G, ~removed),
                              notes={"basis_size": len(basis)})


def blocker_set(cert: BlockerCertificate, window: tuple[int, int], z: Sequence[int] | int = 0) -> WindowSet:
    """``{n in window : z + n in K}`` with ``n`` mapped to ``(n mod q_i)``."""
    G = cert.group
    lo, hi = window
    zz = (z,) * len(G.moduli) if np.isscalar(z) else tuple(z)
    n = np.arange(lo, hi + 1, dtype=np.int64)
    idx = np.ravel_multi_index(tuple(np.mod(n + zi, q) for zi, q in zip(zz, G.moduli)), G.moduli)
    return WindowSet(lo, hi, cert.K.mask.ravel()[idx], f"blocker K on {G.spec}, m(K)={cert.measure_K}")


def build_blocker(A, G: FiniteAbelianGroup, eps, z: Sequence[int] | int = 0, window: tuple[int, int] = (0, 10**6),
                  coset_basis=None, scan_bound: int | None = None, k: int = 2
                  ) -> tuple[WindowSet, BlockerCertificate]:
    """Project ``A`` to ``G``, run the converse, and pull ``K`` back to the integers."""
    E = project_set(A, G, scan_bound, k)
    cert = steinhaus_converse(E, eps, coset_basis)
    zz = (z,) * len(G.moduli) if np.isscalar(z) else tuple(z)
    notes = dict(cert.notes)
    if isinstance(A, str):
        notes["source"] = {"kind": A, "k": k}
    cert = BlockerCertificate(cert.group, cert.E, cert.eps, cert.cosets, cert.costs, cert.K,
                              tuple(int(v) for v in zz), notes)
    return blocker_set(cert, window, zz), cert
