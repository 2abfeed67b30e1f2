"""Rotations of the torus ``T^d = (R/Z)^d`` and their entry-time sets.

Orbit points ``frac(z0 + n*alpha)`` are computed directly (never by
iterated addition) from a 128-bit fixed-point copy of ``alpha``, and
returned as 64-bit fixed-point fractions: ``x / 2**64``.  For ``|n| < 2**31``
the result is within ``2**-63`` of the true orbit point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import finitegroup
from .averaging import FiniteMeasure
from .reals import DEFAULT_PRECISION_BITS, Real, parse_real
from .serial import rational
from .windowsets import APScan, WindowSet, ap_density_scan

ONE = 1 << 64
_MASK64 = ONE - 1
# distance (in 2**-64 units) within which an orbit point counts as on a boundary
BOUNDARY_ULPS = 16
MAX_GRID_DIM = 3


def _frac_fixed(x: Fraction) -> int:
    return math.floor((x - math.floor(x)) * ONE)


# ---------------------------------------------------------------------------
# rotations


@dataclass(frozen=True)
class TorusRotation:
    """``R(z) = z + alpha`` on ``T^d``; ``alpha`` components are used mod 1."""

    alpha: tuple[Real, ...]
    precision: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        if not self.alpha:
            raise ValueError("dimension must be positive")
        if self.precision < 128:
            raise ValueError("orbit arithmetic needs at least 128 bits of alpha")
        object.__setattr__(self, "alpha", tuple(parse_real(a) for a in self.alpha))

    @classmethod
    def of(cls, *alpha, precision: int = DEFAULT_PRECISION_BITS) -> "TorusRotation":
        return cls(tuple(alpha), precision)

    @property
    def dimension(self) -> int:
        return len(self.alpha)

    @property
    def rational_components(self) -> tuple[bool, ...]:
        return tuple(a.is_rational for a in self.alpha)

    def alpha_fixed128(self) -> tuple[int, ...]:
        """``floor(frac(alpha_i) * 2**128)`` per component."""
        out = []
        for a in self.alpha:
            v = a.fixed(self.precision) % (1 << self.precision)
            out.append(v >> (self.precision - 128))
        return tuple(out)

    def error_bound(self, n_max: int) -> float:
        """Bound on ``|x/2**64 - frac(n alpha)|`` for ``|n| <= n_max``."""
        return 2.0**-64 + (abs(n_max) + 1) * 2.0**-128 + 2.0**-64

    def orbit_fixed(self, n: np.ndarray, z0: Sequence | None = None) -> np.ndarray:
        """Fixed-point orbit points, shape ``(len(n), d)``, dtype uint64."""
        n = np.asarray(n, dtype=np.int64).ravel()
        out = np.empty((n.size, self.dimension), dtype=np.uint64)
        z = _point_fixed(z0, self.dimension)
        big = np.abs(n) >= 2**31
        for i, a in enumerate(self.alpha_fixed128()):
            col = _orbit_small(n[~big], a) if np.any(~big) else np.zeros(0, np.uint64)
            out[~big, i] = col
            if np.any(big):
                out[big, i] = [((int(v) * a) >> 64) & _MASK64 for v in n[big].tolist()]
            out[:, i] += np.uint64(z[i])
        return out

    def orbit_point(self, n: int) -> tuple[float, ...]:
        return tuple(float(x) / ONE for x in self.orbit_fixed(np.array([n]))[0])

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "alpha": [a.text for a in self.alpha],
                "rational": list(self.rational_components), "precision_bits": self.precision}


def _orbit_small(n: np.ndarray, a128: int) -> np.ndarray:
    """``floor(frac(n * a128 / 2**128) * 2**64)`` for ``|n| < 2**31``, wrapping uint64 arithmetic."""
    neg = n < 0
    m = np.abs(n).astype(np.uint64)
    hi = np.uint64(a128 >> 64)
    lo = a128 & _MASK64
    l1, l0 = np.uint64(lo >> 32), np.uint64(lo & 0xFFFFFFFF)
    with np.errstate(over="ignore"):
        top = m * hi
        carry = (m * l1 + ((m * l0) >> np.uint64(32))) >> np.uint64(32)
        x = top + carry
        x[neg] = np.uint64(0) - x[neg]
    return x


def _point_fixed(z: Sequence | None, d: int) -> list[int]:
    if z is None:
        return [0] * d
    z = list(z) if not np.isscalar(z) else [z]
    if len(z) != d:
        raise ValueError(f"point has {len(z)} coordinates, torus has {d}")
    out = []
    for c in z:
        if isinstance(c, (int, np.integer)) and not isinstance(c, bool) and 0 <= c < ONE and c >= 1:
            # bare non-zero integers would all be 0 mod 1; treat as fixed point
            out.append(int(c))
        else:
            r = parse_real(c if not isinstance(c, float) else repr(c))
            out.append(r.fixed(64) % ONE if not r.is_rational else _frac_fixed(r.exact))
    return out


# ---------------------------------------------------------------------------
# regions


Box = tuple[tuple[Fraction, Fraction], ...]


def _canonical_boxes(boxes: Sequence[Box], d: int) -> tuple[Box, ...]:
    # split wrap-around sides, then cut into the grid of all endpoints
    flat: list[Box] = []
    for box in boxes:
        if len(box) != d:
            raise ValueError(f"box {box} has wrong dimension for T^{d}")
        pieces: list[list[tuple[Fraction, Fraction]]] = [[]]
        for a, b in box:
            if a == b:
                sides = [(Fraction(0), Fraction(1))] if a != 0 or b != 0 else []
                if a == 0 and b == 0:
                    sides = []
            elif a < b:
                sides = [(a, b)]
            else:
                sides = [(a, Fraction(1)), (Fraction(0), b)] if b > 0 else [(a, Fraction(1))]
            pieces = [p + [s] for p in pieces for s in sides]
        flat.extend(tuple(p) for p in pieces if len(p) == d)
    if not flat:
        return ()
    cuts = []
    for i in range(d):
        pts = {Fraction(0), Fraction(1)}
        for box in flat:
            pts.update(box[i])
        cuts.append(sorted(pts))
    cells = []
    for idx in np.ndindex(*[len(c) - 1 for c in cuts]):
        cell = tuple((cuts[i][k], cuts[i][k + 1]) for i, k in enumerate(idx))
        if any(all(b[i][0] <= cell[i][0] and cell[i][1] <= b[i][1] for i in range(d)) for b in flat):
            cells.append(cell)
    return _merge_cells(cells, d)


def _merge_cells(cells: list[Box], d: int) -> tuple[Box, ...]:
    # glue cells adjacent along the last axis that share every other side
    cells = sorted(cells)
    out: list[list] = []
    for c in cells:
        if out and out[-1][:-1] == list(c[:-1]) and out[-1][-1][1] == c[-1][0]:
            out[-1][-1] = (out[-1][-1][0], c[-1][1])
        else:
            out.append(list(c))
    return tuple(tuple(c) for c in out)


@dataclass(frozen=True)
class TorusRegion:
    """Finite union of half-open boxes ``prod [a_i, b_i)`` on ``T^d``.

    ``a_i > b_i`` wraps around; ``a_i == b_i`` (non-zero) is the whole
    circle.  The stored boxes are disjoint and non-wrapping.
    """

    dimension: int
    boxes: tuple[Box, ...]

    @classmethod
    def from_boxes(cls, boxes: Sequence[Sequence[Sequence]], dimension: int | None = None) -> "TorusRegion":
        conv = [tuple((_frac01(a), _frac01(b, upper=True)) for a, b in box) for box in boxes]
        d = dimension if dimension is not None else (len(conv[0]) if conv else 1)
        return cls(d, _canonical_boxes(conv, d))

    @classmethod
    def interval(cls, a, b) -> "TorusRegion":
        return cls.from_boxes([[(a, b)]])

    @classmethod
    def full(cls, d: int = 1) -> "TorusRegion":
        return cls(d, (tuple((Fraction(0), Fraction(1)) for _ in range(d)),))

    @classmethod
    def empty(cls, d: int = 1) -> "TorusRegion":
        return cls(d, ())

    @property
    def measure(self) -> Fraction:
        return sum((math.prod((b - a for a, b in box), start=Fraction(1)) for box in self.boxes), Fraction(0))

    def is_full(self) -> bool:
        return self.measure == 1

    def translate(self, t: Sequence) -> "TorusRegion":
        """``U + t``; ``t`` holds Fractions or 64-bit fixed-point ints."""
        tt = [Fraction(int(c), ONE) if isinstance(c, (int, np.integer)) else Fraction(c) for c in t]
        shifted = []
        for box in self.boxes:
            sides = []
            for (a, b), s in zip(box, tt):
                if a == 0 and b == 1:
                    sides.append((Fraction(0), Fraction(0) + 1))
                else:
                    na, nb = (a + s) % 1, (b + s) % 1
                    sides.append((na, nb if nb != 0 else Fraction(1)) if (na, nb) != (0, 0) else (na, Fraction(1)))
            shifted.append(tuple(sides))
        return TorusRegion(self.dimension, _canonical_boxes(_expand_full(shifted), self.dimension))

    def intersect(self, other: "TorusRegion") -> "TorusRegion":
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        out = []
        for p in self.boxes:
            for q in other.boxes:
                sides = [(max(a1, a2), min(b1, b2)) for (a1, b1), (a2, b2) in zip(p, q)]
                if all(a < b for a, b in sides):
                    out.append(tuple(sides))
        return TorusRegion(self.dimension, _canonical_boxes(out, self.dimension))

    def union(self, other: "TorusRegion") -> "TorusRegion":
        return TorusRegion(self.dimension, _canonical_boxes(self.boxes + other.boxes, self.dimension))

    def contains_fixed(self, x: np.ndarray, tol: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """Membership of fixed-point points ``x`` (shape ``(m, d)``) and a near-boundary mask."""
        x = np.asarray(x, dtype=np.uint64).reshape(-1, self.dimension)
        inside = np.zeros(x.shape[0], dtype=bool)
        near = np.zeros(x.shape[0], dtype=bool)
        t = np.uint64(tol)
        for box in self.boxes:
            ok = np.ones(x.shape[0], dtype=bool)
            for i, (a, b) in enumerate(box):
                A = math.ceil(a * ONE)
                xi = x[:, i]
                if A > 0:
                    ok &= xi >= np.uint64(A)
                    near |= _circ_dist(xi, A) <= t
                if b < 1:
                    B = math.ceil(b * ONE)
                    ok &= xi < np.uint64(B)
                    near |= _circ_dist(xi, B) <= t
            inside |= ok
        return inside, near

    def to_json(self) -> dict:
        return {"dimension": self.dimension,
                "boxes": [[[rational(a), rational(b)] for a, b in box] for box in self.boxes],
                "measure": rational(self.measure)}


def _expand_full(boxes):
    return [tuple((a, b) if not (a == 0 and b == 1) else (Fraction(0), Fraction(1)) for a, b in box)
            for box in boxes]


def _frac01(v, upper: bool = False) -> Fraction:
    r = parse_real(v if not isinstance(v, float) else repr(v))
    x = r.exact if r.is_rational else Fraction(r.fixed(64), ONE)
    if upper and x == 1:
        return Fraction(1)
    return x % 1


def _circ_dist(x: np.ndarray, c: int) -> np.ndarray:
    cc = np.uint64(c % ONE)
    with np.errstate(over="ignore"):
        d1 = x - cc
        d2 = cc - x
    return np.minimum(d1, d2)


def parse_region(text: str, dimension: int | None = None) -> TorusRegion:
    """``box:0,0.4``, ``box:0,0.4;0.1,0.5`` (one ``a,b`` pair per axis),
    ``full`` / ``full:2``, unions joined by ``|``."""
    boxes = []
    full_d = None
    for part in text.split("|"):
        part = part.strip()
        if part.startswith("full"):
            full_d = int(part.split(":", 1)[1]) if ":" in part else (dimension or 1)
            continue
        if not part.startswith("box:"):
            raise ValueError(f"region grammar: expected 'box:a,b[;a,b...]' or 'full', got {part!r}")
        sides = []
        for side in part[4:].split(";"):
            ab = side.split(",")
            if len(ab) != 2:
                raise ValueError(f"region grammar: side {side!r} is not 'a,b'")
            sides.append((ab[0], ab[1]))
        boxes.append(sides)
    if full_d is not None:
        return TorusRegion.full(full_d)
    d = dimension or len(boxes[0])
    return TorusRegion.from_boxes(boxes, d)


def parse_rotation(text: str, precision: int = DEFAULT_PRECISION_BITS) -> TorusRotation:
    """``torus:d=1,alpha=sqrt2`` or ``torus:d=2,alpha=sqrt2,sqrt3``."""
    if not text.startswith("torus:"):
        raise ValueError(f"rotation grammar: expected 'torus:d=<d>,alpha=<a1>[,<a2>...]', got {text!r}")
    body = text[len("torus:"):]
    if not body.startswith("d=") or ",alpha=" not in body:
        raise ValueError("rotation grammar: expected 'd=<d>,alpha=...'")
    d_part, a_part = body.split(",alpha=", 1)
    d = int(d_part[2:])
    alphas = [a.strip() for a in a_part.split(",")]
    if len(alphas) != d:
        raise ValueError(f"rotation grammar: d={d} but {len(alphas)} alpha components")
    return TorusRotation(tuple(parse_real(a) for a in alphas), precision)


# ---------------------------------------------------------------------------
# Bohr sets


def _boundary_tol(rot: TorusRotation, n_max: int) -> int:
    return BOUNDARY_ULPS + int(math.ceil(rot.error_bound(n_max) * ONE))


def bohr_set(rot: TorusRotation, region: TorusRegion, window: tuple[int, int], z0=None,
             return_flags: bool = False):
    """``{n in window : frac(z0 + n alpha) in region}``.

    With ``return_flags`` also returns the integers whose orbit point lies
    within the arithmetic error of a region boundary (their membership is
    decided by the fixed-point test but should not be relied on).
    """
    if region.dimension != rot.dimension:
        raise ValueError("region and rotation dimensions differ")
    lo, hi = window
    n = np.arange(lo, hi + 1, dtype=np.int64)
    x = rot.orbit_fixed(n, z0)
    inside, near = region.contains_fixed(x, _boundary_tol(rot, max(abs(lo), abs(hi))))
    S = WindowSet(lo, hi, inside, f"Bohr({','.join(a.text for a in rot.alpha)}; m={region.measure})")
    if return_flags:
        return S, n[near]
    return S


@dataclass(frozen=True)
class EntryGaps:
    max_gap: int | None
    distinct_gaps: tuple[int, ...]
    entries: int
    first: int | None
    last: int | None

    def to_json(self) -> dict:
        return {"max_gap": self.max_gap, "distinct_gaps": list(self.distinct_gaps),
                "entries": self.entries, "first": self.first, "last": self.last}


def entry_gap_bound(rot: TorusRotation, region: TorusRegion, window: tuple[int, int], z0=None) -> EntryGaps:
    """Largest difference of consecutive entry times inside the window."""
    e = bohr_set(rot, region, window, z0).elements()
    if e.size < 2:
        return EntryGaps(None, (), int(e.size), int(e[0]) if e.size else None, int(e[-1]) if e.size else None)
    g = np.diff(e)
    return EntryGaps(int(g.max()), tuple(int(v) for v in np.unique(g)), int(e.size), int(e[0]), int(e[-1]))


# ---------------------------------------------------------------------------
# trigonometric polynomials and averages


@dataclass(frozen=True)
class TrigPolynomial:
    """``f(z) = sum_k c_k exp(2 pi i <k, z>)`` on ``T^d``."""

    terms: tuple[tuple[tuple[int, ...], complex], ...]

    @classmethod
    def character(cls, *k: int, coef: complex = 1.0) -> "TrigPolynomial":
        return cls(((tuple(int(v) for v in k), complex(coef)),))

    @classmethod
    def constant(cls, c: complex = 1.0, d: int = 1) -> "TrigPolynomial":
        return cls((((0,) * d, complex(c)),))

    @property
    def dimension(self) -> int:
        return len(self.terms[0][0])

    @property
    def constant_term(self) -> complex:
        return sum((c for k, c in self.terms if not any(k)), 0j)

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64).reshape(-1, self.dimension)
        out = np.zeros(z.shape[0], dtype=np.complex128)
        for k, c in self.terms:
            out += c * np.exp(2j * np.pi * (z @ np.asarray(k, dtype=np.float64)))
        return out

    def to_json(self) -> dict:
        return {"terms": [{"k": list(k), "re": c.real, "im": c.imag} for k, c in self.terms]}


def _character_phase(x: np.ndarray, k: Sequence[int]) -> np.ndarray:
    """``<k, x> mod 1`` in 64-bit fixed point, exact modulo 2**64."""
    acc = np.zeros(x.shape[0], dtype=np.uint64)
    with np.errstate(over="ignore"):
        for i, ki in enumerate(k):
            acc += x[:, i] * np.uint64(int(ki) % ONE)
    return acc


def _to_turns(x: np.ndarray) -> np.ndarray:
    return x.astype(np.float64) / float(ONE)


def rotation_average(f: TrigPolynomial, rot: TorusRotation, nu: FiniteMeasure, z=None) -> complex:
    """``sum_n nu(n) f(z + n alpha)``."""
    x = rot.orbit_fixed(nu.support, z)
    w = nu.float_weights()
    total = 0j
    for k, c in f.terms:
        ph = _to_turns(_character_phase(x, k))
        total += c * np.sum(w * np.exp(2j * np.pi * ph))
    return complex(total)


@dataclass(frozen=True, eq=False)
class EmpiricalDensity:
    """Pushed-forward mass per grid cell: ``numerators / denominator``."""

    resolution: int
    numerators: np.ndarray
    denominator: int

    @property
    def dimension(self) -> int:
        return self.numerators.ndim

    @property
    def total(self) -> Fraction:
        return Fraction(int(self.numerators.sum()), self.denominator)

    def masses(self) -> np.ndarray:
        return self.numerators.astype(np.float64) / self.denominator

    def psi(self) -> np.ndarray:
        """Density w.r.t. Haar measure: mass / cell volume."""
        return self.masses() * float(self.resolution**self.dimension)

    def integral_psi(self) -> Fraction:
        """``∫ psi dm``, computed as ``sum(psi_cell * cell_volume)`` exactly."""
        vol = Fraction(1, self.resolution**self.dimension)
        psi_sum = Fraction(int(self.numerators.sum()) * self.resolution**self.dimension, self.denominator)
        return psi_sum * vol

    def to_json(self) -> dict:
        return {"resolution": self.resolution, "dimension": self.dimension,
                "total": rational(self.total), "denominator": self.denominator,
                "numerators": self.numerators.tolist()}


def _bin_index(x: np.ndarray, g: int) -> np.ndarray:
    if g & (g - 1) == 0:
        return (x >> np.uint64(64 - (g.bit_length() - 1))).astype(np.int64) if g > 1 else np.zeros(x.shape, np.int64)
    return (((x >> np.uint64(32)) * np.uint64(g)) >> np.uint64(32)).astype(np.int64)


def pushforward_density(eta: FiniteMeasure, rot: TorusRotation, grid_resolution: int) -> EmpiricalDensity:
    """Histogram of ``n alpha mod 1`` weighted by ``eta``."""
    g = int(grid_resolution)
    if g < 1:
        raise ValueError("grid resolution must be positive")
    if g >= 2**32:
        raise ValueError("grid resolution must be below 2**32")
    d = rot.dimension
    if g**d > 2**24:
        raise ValueError("grid too large")
    x = rot.orbit_fixed(eta.support)
    idx = tuple(_bin_index(x[:, i], g) for i in range(d))
    bins = np.zeros((g,) * d, dtype=np.int64)
    np.add.at(bins, idx, eta.numerators)
    return EmpiricalDensity(g, bins, eta.denominator)


@dataclass
class ConvolutionReport:
    """Direct restricted average against ``f * psi`` on the grid."""

    discrepancy: float
    integral_psi: Fraction
    eta_total: Fraction
    psi_max: float
    resolution: int
    phi: np.ndarray = field(repr=False)
    conv: np.ndarray = field(repr=False)

    @property
    def mass_conserved(self) -> bool:
        return self.integral_psi == self.eta_total

    def to_json(self) -> dict:
        return {"discrepancy": {"value": self.discrepancy, "precision_bits": 53},
                "integral_psi": rational(self.integral_psi), "eta_total": rational(self.eta_total),
                "mass_conserved": self.mass_conserved, "psi_max": self.psi_max,
                "resolution": self.resolution}


def restricted_average_vs_convolution(f: TrigPolynomial, rot: TorusRotation, eta: FiniteMeasure,
                                      grid: int) -> ConvolutionReport:
    """Compare ``phi(z) = sum_n eta(n) f(z - n alpha)`` with ``f * psi``.

    ``psi`` is the grid density of the pushed-forward ``eta``; the
    convolution runs on ``(Z/grid)^d`` through
    :func:`finitegroup.convolve_array`, sampling ``f`` at half-cell offsets
    so that each cell's mass sits at its centre.
    """
    d = rot.dimension
    if d > MAX_GRID_DIM:
        raise ValueError(f"grids above dimension {MAX_GRID_DIM} are rejected for memory")
    if f.dimension != d:
        raise ValueError("trigonometric polynomial and rotation dimensions differ")
    dens = pushforward_density(eta, rot, grid)
    axes = np.meshgrid(*[np.arange(grid, dtype=np.float64) / grid] * d, indexing="ij")
    z = np.stack([a.ravel() for a in axes], axis=1)

    x = rot.orbit_fixed(eta.support)
    w = eta.float_weights()
    phi = np.zeros(z.shape[0], dtype=np.complex128)
    for k, c in f.terms:
        s = np.sum(w * np.exp(-2j * np.pi * _to_turns(_character_phase(x, k))))
        phi += c * s * np.exp(2j * np.pi * (z @ np.asarray(k, dtype=np.float64)))
    phi = phi.reshape((grid,) * d)

    h = f(z - 0.5 / grid).reshape((grid,) * d)
    conv = finitegroup.convolve_array(h, dens.psi().astype(np.complex128))
    return ConvolutionReport(float(np.max(np.abs(phi - conv))), dens.integral_psi(), eta.total,
                             float(dens.psi().max()), grid, phi, conv)


# ---------------------------------------------------------------------------
# cut, shift and reassemble


@dataclass
class CutShiftResult:
    reassembled: WindowSet
    cluster: list[int]
    V: TorusRegion
    measure_U: Fraction
    measure_V: Fraction
    eps: Fraction
    contained: bool
    violations: list[int]
    flagged: list[int]

    @property
    def measure_ok(self) -> bool:
        return self.measure_V > self.measure_U - self.eps

    def to_json(self) -> dict:
        return {"cardinality": len(self.reassembled), "window": [self.reassembled.lo, self.reassembled.hi],
                "cluster": self.cluster, "V": self.V.to_json(), "measure_U": rational(self.measure_U),
                "measure_V": rational(self.measure_V), "eps": rational(self.eps),
                "measure_ok": self.measure_ok, "contained": self.contained,
                "violations": self.violations[:100], "flagged": len(self.flagged)}


def cut_shift_reassemble(rot: TorusRotation, region: TorusRegion, intervals: Sequence[tuple[int, int]],
                         shifts: Sequence[int], window: tuple[int, int], eps=Fraction(1, 10),
                         radius: float | None = None) -> CutShiftResult:
    """``⋃_j (I_j ∩ B) + r_j`` for the Bohr set ``B`` of ``region``.

    The shift images ``frac(r_j alpha)`` are clustered: the largest family
    within sup-distance ``radius`` (default ``eps / (2 d)``) of one of them
    is kept, ``V = ⋂ (U + r_j alpha)`` over that family, and the output is
    checked to contain ``bohr_set(V) ∩ ⋃ (I_j + r_j)`` on the window.
    """
    if len(intervals) != len(shifts):
        raise ValueError("need one shift per interval")
    eps = Fraction(eps)
    lo, hi = window
    out = np.zeros(hi - lo + 1, dtype=bool)
    flagged: list[int] = []
    for (a, b), r in zip(intervals, shifts):
        B, fl = bohr_set(rot, region, (a, b), return_flags=True)
        e = B.elements() + r
        e = e[(e >= lo) & (e <= hi)]
        out[e - lo] = True
        flagged.extend((fl + r).tolist())
    result = WindowSet(lo, hi, out, "cut-shift-reassemble")

    d = rot.dimension
    t = rot.orbit_fixed(np.asarray(shifts, dtype=np.int64))
    rad = int((radius if radius is not None else float(eps) / (2 * d)) * ONE)
    best: list[int] = []
    for c in range(len(shifts)):
        dist = np.max(np.stack([_circ_dist(t[:, i], int(t[c, i])) for i in range(d)], axis=1), axis=1)
        members = np.flatnonzero(dist <= np.uint64(rad)).tolist()
        if len(members) > len(best):
            best = members
    V = TorusRegion.full(d)
    for j in best:
        V = V.intersect(region.translate([int(v) for v in t[j]]))
    if best:
        target = bohr_set(rot, V, window)
        cover = np.zeros_like(out)
        for j in best:
            a, b = intervals[j][0] + shifts[j], intervals[j][1] + shifts[j]
            a, b = max(a, lo), min(b, hi)
            if a <= b:
                cover[a - lo:b - lo + 1] = True
        need = target.bits & cover & ~out
        flagged_set = set(flagged)
        _, fv = bohr_set(rot, V, window, return_flags=True)
        flagged_set.update(fv.tolist())
        violations = [int(n) for n in (np.flatnonzero(need) + lo).tolist() if n not in flagged_set]
    else:
        violations = []
    return CutShiftResult(result, best, V, region.measure, V.measure, eps, not violations, violations,
                          sorted(set(flagged)))


# ---------------------------------------------------------------------------
# arithmetic progressions in Bohr sets


@dataclass
class ExcessAPResult:
    k: int
    eps: Fraction
    measure_U: Fraction
    predicted: list[int]
    region_prediction: list[int] | None
    scan: APScan
    slack: Fraction

    @property
    def empirical(self) -> list[int]:
        return sorted(self.scan.successes)

    @property
    def best(self) -> tuple[int, Fraction] | None:
        if not self.scan.successes:
            return None
        d = max(self.scan.successes, key=lambda d: (self.scan.successes[d].value, -d))
        return d, self.scan.successes[d].value

    def to_json(self) -> dict:
        return {"k": self.k, "eps": rational(self.eps), "measure_U": rational(self.measure_U),
                "slack": rational(self.slack), "predicted_d": self.predicted,
                "region_prediction": self.region_prediction, "scan": self.scan.to_json()}


def ap_region_measure(rot: TorusRotation, region: TorusRegion, k: int, d: int) -> Fraction:
    """``m(⋂_{l=0..k} (U - l d alpha))`` on the fixed-point orbit."""
    W = region
    if k:
        x = rot.orbit_fixed(-np.arange(1, k + 1, dtype=np.int64) * d)
        for row in x:
            W = W.intersect(region.translate([int(v) for v in row]))
    return W.measure


def excess_ap_search(rot: TorusRotation, region: TorusRegion, B: WindowSet, k: int, eps,
                     d_window: tuple[int, int], M: int, slack=Fraction(0)) -> ExcessAPResult:
    """Common differences ``d`` with many ``(k+1)``-term progressions in ``B``.

    ``predicted`` holds the ``d`` with ``m(W_d) > m(U) - eps``; the
    empirical side is an exhaustive :func:`ap_density_scan` of ``B`` against
    ``m(U) - eps - slack``.  For a single interval on the circle the
    predicted set is also produced as a Bohr set of ``d`` (distance of
    ``d alpha`` to 0 below ``(m(U) - eps)``-dependent radius) as a second route.
    """
    eps = Fraction(eps)
    mU = region.measure
    ds = range(d_window[0], d_window[1] + 1)
    predicted = [d for d in ds if ap_region_measure(rot, region, k, d) > mU - eps]
    region_pred = None
    if rot.dimension == 1 and len(region.boxes) == 1 and k >= 1 and mU < 1:
        # interval of length m: m(W_d) = max(0, m - k * ||d alpha||) when k ||d alpha|| <= m
        r = eps / k
        R = TorusRegion.from_boxes([[(1 - r, r)]]) if r < Fraction(1, 2) else TorusRegion.full()
        S = bohr_set(rot, R, d_window)
        region_pred = S.elements().tolist()
    scan = ap_density_scan(B, k, ds, M, mU - eps - Fraction(slack))
    return ExcessAPResult(k, eps, mU, predicted, region_pred, scan, Fraction(slack))
