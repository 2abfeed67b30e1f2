"""Finite-window integer sets and the scale-stamped classification scans.

A :class:`WindowSet` is the restriction of an integer set to a window
``[lo, hi]``.  Everything here is exact: densities are
:class:`fractions.Fraction`, sumsets are computed either by shifting
arbitrary-precision bitsets or by an FFT whose rounding is checked.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, NamedTuple, TextIO

import numpy as np

from .serial import rational

# numpy int64 holds the elements; keep a safety margin for lo + offsets
_INT_LIMIT = 2**62
# widest window we are willing to materialise (one byte per integer)
MAX_WINDOW = 2**31


class WindowRangeError(OverflowError):
    """A window endpoint or sum leaves the supported integer range."""


def _check_window(lo: int, hi: int) -> None:
    if lo > hi:
        raise ValueError(f"empty window [{lo}, {hi}]")
    if abs(lo) >= _INT_LIMIT or abs(hi) >= _INT_LIMIT:
        raise WindowRangeError(f"window [{lo}, {hi}] exceeds +/-2**62")
    if hi - lo + 1 > MAX_WINDOW:
        raise WindowRangeError(f"window [{lo}, {hi}] wider than {MAX_WINDOW}")


@dataclass(frozen=True, eq=False)
class WindowSet:
    """An integer set seen through the window ``[lo, hi]``.

    ``bits[i]`` is membership of ``lo + i``.  Equality ignores provenance.
    """

    lo: int
    hi: int
    bits: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        lo, hi = int(self.lo), int(self.hi)
        _check_window(lo, hi)
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (hi - lo + 1,):
            raise ValueError(f"membership has shape {bits.shape}, window needs {hi - lo + 1}")
        if bits.flags.writeable:
            bits = bits.copy()
            bits.flags.writeable = False
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "bits", bits)

    # construction -----------------------------------------------------

    @classmethod
    def from_elements(cls, elements: Iterable[int], lo: int, hi: int, provenance: str = "") -> "WindowSet":
        """Members of ``elements`` falling in ``[lo, hi]``; the rest are dropped."""
        _check_window(lo, hi)
        arr = np.fromiter((int(e) for e in elements), dtype=np.int64) if not isinstance(
            elements, np.ndarray) else elements.astype(np.int64, copy=False)
        arr = arr[(arr >= lo) & (arr <= hi)]
        bits = np.zeros(hi - lo + 1, dtype=bool)
        bits[arr - lo] = True
        return cls(lo, hi, bits, provenance)

    @classmethod
    def from_predicate(cls, pred: Callable[[np.ndarray], np.ndarray], lo: int, hi: int,
                       provenance: str = "") -> "WindowSet":
        """``pred`` receives the int64 array ``lo..hi`` and returns a boolean mask."""
        _check_window(lo, hi)
        n = np.arange(lo, hi + 1, dtype=np.int64)
        return cls(lo, hi, np.asarray(pred(n), dtype=bool), provenance)

    @classmethod
    def full(cls, lo: int, hi: int, provenance: str = "all integers") -> "WindowSet":
        _check_window(lo, hi)
        return cls(lo, hi, np.ones(hi - lo + 1, dtype=bool), provenance)

    @classmethod
    def empty(cls, lo: int, hi: int, provenance: str = "empty set") -> "WindowSet":
        _check_window(lo, hi)
        return cls(lo, hi, np.zeros(hi - lo + 1, dtype=bool), provenance)

    @classmethod
    def from_int(cls, value: int, lo: int, hi: int, provenance: str = "") -> "WindowSet":
        """Inverse of :meth:`to_int`: bit ``i`` of ``value`` is ``lo + i``."""
        _check_window(lo, hi)
        n = hi - lo + 1
        value &= (1 << n) - 1
        raw = np.frombuffer(value.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[:n].astype(bool)
        return cls(lo, hi, bits, provenance)

    # views --------------------------------------------------------------

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1

    def elements(self) -> np.ndarray:
        return np.flatnonzero(self.bits).astype(np.int64) + self.lo

    def to_int(self) -> int:
        packed = np.packbits(self.bits, bitorder="little")
        return int.from_bytes(packed.tobytes(), "little")

    def __len__(self) -> int:
        return int(np.count_nonzero(self.bits))

    def __iter__(self) -> Iterator[int]:
        return (int(x) for x in self.elements())

    def __contains__(self, n: object) -> bool:
        if not isinstance(n, (int, np.integer)):
            return False
        return self.lo <= n <= self.hi and bool(self.bits[int(n) - self.lo])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WindowSet):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.lo, self.hi, np.packbits(self.bits).tobytes()))

    def __repr__(self) -> str:
        return f"WindowSet([{self.lo}, {self.hi}], card={len(self)}, {self.provenance!r})"

    # set algebra on windows ---------------------------------------------

    def restrict(self, lo: int, hi: int) -> "WindowSet":
        """Same set viewed on ``[lo, hi]``; integers outside ``self``'s window are non-members."""
        _check_window(lo, hi)
        out = np.zeros(hi - lo + 1, dtype=bool)
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo:b - lo + 1] = self.bits[a - self.lo:b - self.lo + 1]
        return WindowSet(lo, hi, out, self.provenance)

    def complement(self) -> "WindowSet":
        return WindowSet(self.lo, self.hi, ~self.bits, f"complement of {self.provenance}")

    def _aligned(self, other: "WindowSet") -> np.ndarray:
        if (other.lo, other.hi) == (self.lo, self.hi):
            return other.bits
        return other.restrict(self.lo, self.hi).bits

    def __or__(self, other: "WindowSet") -> "WindowSet":
        return WindowSet(self.lo, self.hi, self.bits | self._aligned(other), self.provenance)

    def __and__(self, other: "WindowSet") -> "WindowSet":
        return WindowSet(self.lo, self.hi, self.bits & self._aligned(other), self.provenance)

    def __sub__(self, other: "WindowSet") -> "WindowSet":
        return WindowSet(self.lo, self.hi, self.bits & ~self._aligned(other), self.provenance)

    def issubset(self, other: "WindowSet") -> bool:
        return not np.any(self.bits & ~self._aligned(other))

    def translate(self, t: int) -> "WindowSet":
        """``S + t`` with the window moved along."""
        return WindowSet(self.lo + t, self.hi + t, self.bits, f"({self.provenance}) + {t}")

    def to_json(self) -> dict:
        starts, lengths = runs(self)
        return {
            "window": [self.lo, self.hi],
            "cardinality": len(self),
            "provenance": self.provenance,
            "runs": [[int(s), int(n)] for s, n in zip(starts, lengths)],
        }


# ---------------------------------------------------------------------------
# sumsets


def _sumset_shift(A: WindowSet, B: WindowSet, lo: int, hi: int) -> np.ndarray:
    # iterate over the sparser summand, OR-ing shifted copies of the denser one
    if len(A) > len(B):
        A, B = B, A
    width = hi - lo + 1
    mask = (1 << width) - 1
    b_int = B.to_int()
    acc = 0
    for a in A.elements().tolist():
        s = a + B.lo - lo
        if s >= width or s + B.length <= 0:
            continue
        acc |= (b_int << s) if s >= 0 else (b_int >> -s)
    return WindowSet.from_int(acc & mask, lo, hi).bits


def _sumset_fft(A: WindowSet, B: WindowSet, lo: int, hi: int) -> np.ndarray:
    from scipy.signal import fftconvolve

    counts = fftconvolve(A.bits.astype(np.float64), B.bits.astype(np.float64))
    rounded = np.rint(counts)
    if counts.size and np.max(np.abs(counts - rounded)) >= 0.25:
        raise ArithmeticError("FFT sumset rounding guard failed; use method='shift'")
    hit = rounded > 0
    base = A.lo + B.lo
    out = np.zeros(hi - lo + 1, dtype=bool)
    a, b = max(lo, base), min(hi, base + hit.size - 1)
    if a <= b:
        out[a - lo:b - lo + 1] = hit[a - base:b - base + 1]
    return out


def sumset(A: WindowSet, B: WindowSet, out_window: tuple[int, int] | None = None,
           method: str = "auto") -> WindowSet:
    """``{a + b}`` restricted to ``out_window``.

    Sums falling outside the output window are dropped; pass
    ``out_window=None`` for the full ``[A.lo + B.lo, A.hi + B.hi]``.
    ``method`` is ``"shift"`` (bitset shifting), ``"fft"`` (checked
    floating convolution) or ``"auto"``.  Both are exact.
    """
    if out_window is None:
        out_window = (A.lo + B.lo, A.hi + B.hi)
    lo, hi = int(out_window[0]), int(out_window[1])
    if abs(A.lo + B.lo) >= _INT_LIMIT or abs(A.hi + B.hi) >= _INT_LIMIT:
        raise WindowRangeError("sum of windows leaves the supported integer range")
    _check_window(lo, hi)
    prov = f"({A.provenance}) + ({B.provenance})"
    if len(A) == 0 or len(B) == 0:
        return WindowSet.empty(lo, hi, prov)
    if method == "auto":
        fft_len = A.length + B.length
        shift_cost = min(len(A), len(B)) * (hi - lo + 1 + max(A.length, B.length)) / 64
        method = "shift" if shift_cost < 8 * fft_len * math.log2(fft_len + 2) else "fft"
    if method == "shift":
        bits = _sumset_shift(A, B, lo, hi)
    elif method == "fft":
        bits = _sumset_fft(A, B, lo, hi)
    else:
        raise ValueError(f"unknown sumset method {method!r}")
    return WindowSet(lo, hi, bits, prov)


# ---------------------------------------------------------------------------
# densities


@dataclass(frozen=True)
class DensityEstimate:
    """``value = count / (N - M + 1)`` for the witness window ``[M, N]``."""

    value: Fraction
    window_length: int
    witness_window: tuple[int, int]
    count: int

    def __post_init__(self):
        a, b = self.witness_window
        if Fraction(self.count, b - a + 1) != self.value:
            raise ValueError("density value disagrees with its witness")

    def to_json(self) -> dict:
        return {
            "value": rational(self.value),
            "window_length": self.window_length,
            "witness_window": list(self.witness_window),
            "count": self.count,
        }


def _sliding_counts(bits: np.ndarray, M: int) -> np.ndarray:
    c = np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))
    return c[M:] - c[:-M]


def banach_density_estimate(S: WindowSet, M: int) -> DensityEstimate:
    """Largest relative count of ``S`` over all length-``M`` subwindows.

    Approximates the upper Banach density at scale ``M``; the witness is the
    leftmost subwindow attaining the maximum.
    """
    if M <= 0:
        raise ValueError("subwindow length must be positive")
    if M > S.length:
        raise ValueError(f"subwindow length {M} exceeds window length {S.length}")
    counts = _sliding_counts(S.bits, M)
    i = int(np.argmax(counts))
    best = int(counts[i])
    return DensityEstimate(Fraction(best, M), M, (S.lo + i, S.lo + i + M - 1), best)


def upper_density_estimate(S: WindowSet, N: int, n_min: int = 1) -> DensityEstimate:
    """Max of ``|S ∩ [1, n]| / n`` over ``n_min <= n <= N``.

    With the default ``n_min=1`` this is the plain prefix maximum; raising
    ``n_min`` restricts to a tail, which is closer to a limsup.
    """
    if not (S.lo <= 1 and N <= S.hi):
        raise ValueError(f"[1, {N}] is not inside the window [{S.lo}, {S.hi}]")
    if not 1 <= n_min <= N:
        raise ValueError("need 1 <= n_min <= N")
    prefix = np.cumsum(S.bits[1 - S.lo:N - S.lo + 1], dtype=np.int64)
    n = np.arange(1, N + 1, dtype=np.int64)
    prefix, n = prefix[n_min - 1:], n[n_min - 1:]
    ratio = prefix / n
    top = ratio.max()
    # floats only shortlist; the winner is decided exactly
    cand = np.flatnonzero(ratio >= top - 1e-9)
    best_i = max(cand.tolist(), key=lambda i: (Fraction(int(prefix[i]), int(n[i])), -i))
    cnt, length = int(prefix[best_i]), int(n[best_i])
    return DensityEstimate(Fraction(cnt, length), length, (1, length), cnt)


# ---------------------------------------------------------------------------
# runs, gaps, syndeticity


def runs(S: WindowSet) -> tuple[np.ndarray, np.ndarray]:
    """Starts (as integers) and lengths of the maximal blocks of members."""
    b = np.concatenate(([False], S.bits, [False])).astype(np.int8)
    d = np.diff(b)
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    return starts.astype(np.int64) + S.lo, (ends - starts).astype(np.int64)


def longest_run(S: WindowSet) -> int:
    _, lengths = runs(S)
    return int(lengths.max()) if lengths.size else 0


def longest_run_interval(S: WindowSet) -> tuple[int, int] | None:
    starts, lengths = runs(S)
    if not lengths.size:
        return None
    i = int(np.argmax(lengths))
    return int(starts[i]), int(starts[i] + lengths[i] - 1)


class Syndeticity(NamedTuple):
    syndetic: bool
    worst_gap: int
    hole: tuple[int, int] | None


def syndetic_at_scale(S: WindowSet, L: int) -> Syndeticity:
    """Does every length-``(L+1)`` subwindow meet ``S``?

    ``worst_gap`` is one more than the longest run of non-members (so the
    difference of consecutive members for interior holes); the answer is
    ``worst_gap <= L + 1``.  ``hole`` locates the longest run of non-members.
    """
    if L < 0:
        raise ValueError("L must be non-negative")
    hole = longest_run_interval(S.complement())
    longest_hole = 0 if hole is None else hole[1] - hole[0] + 1
    worst = longest_hole + 1
    return Syndeticity(worst <= L + 1, worst, hole)


def dilate(S: WindowSet, L: int) -> WindowSet:
    """``S + {0, ..., L}`` on ``S``'s own window."""
    out = S.bits.copy()
    for l in range(1, min(L, S.length - 1) + 1):
        out[l:] |= S.bits[:-l]
    return WindowSet(S.lo, S.hi, out, f"({S.provenance}) + [0, {L}]")


@dataclass(frozen=True)
class PwsScanReport:
    """Outcome of :func:`piecewise_syndetic_scan` at a stated scale.

    On ``pws_at_scale`` the witness is ``F = {0..shift}`` together with an
    interval of length ``W`` covered by ``S + F``.  Otherwise
    ``longest_runs[L]`` records the best run of ``S + {0..L}`` for every
    ``L <= L_max``.
    """

    shift_bound: int
    target_interval_length: int
    scanned_window: tuple[int, int]
    verdict: str
    shift: int | None
    interval: tuple[int, int] | None
    longest_runs: tuple[int, ...]

    @property
    def F(self) -> tuple[int, ...] | None:
        return None if self.shift is None else tuple(range(self.shift + 1))

    def replay(self, S: WindowSet) -> bool:
        """Independently confirm the recorded verdict against ``S``."""
        if self.verdict == "pws_at_scale":
            a, b = self.interval
            if b - a + 1 != self.target_interval_length:
                return False
            members = set(S.elements().tolist())
            return all(any(n - f in members for f in self.F) for n in range(a, b + 1))
        return all(longest_run(dilate(S, L)) < self.target_interval_length
                   for L in range(self.shift_bound + 1))

    def to_json(self) -> dict:
        return {
            "shift_bound": self.shift_bound,
            "target_interval_length": self.target_interval_length,
            "scanned_window": list(self.scanned_window),
            "verdict": self.verdict,
            "witness": (
                {"F": [0, self.shift], "interval": list(self.interval)}
                if self.verdict == "pws_at_scale"
                else {"exhaustive_longest_runs": list(self.longest_runs)}
            ),
        }


def piecewise_syndetic_scan(S: WindowSet, L_max: int, W: int) -> PwsScanReport:
    """Scale-stamped piecewise-syndeticity test.

    Tests exactly the families ``F_L = {0, ..., L}`` for ``L = 0..L_max``;
    any ``F`` inside ``{0..L}`` gives ``S + F`` contained in ``S + F_L``, so
    nothing is lost.  ``S`` is declared pws at this scale iff some
    ``S + F_L`` contains ``W`` consecutive integers of the window.
    """
    if L_max < 0:
        raise ValueError("L_max must be non-negative")
    if not 0 < W <= S.length:
        raise ValueError(f"need 0 < W <= window length ({S.length})")
    cur = S.bits.copy()
    best: list[int] = []
    for L in range(L_max + 1):
        if 0 < L < S.length:
            cur[L:] |= S.bits[:-L]
        D = WindowSet(S.lo, S.hi, cur)
        starts, lengths = runs(D)
        best.append(int(lengths.max()) if lengths.size else 0)
        hit = np.flatnonzero(lengths >= W)
        if hit.size:
            a = int(starts[hit[0]])
            return PwsScanReport(L_max, W, (S.lo, S.hi), "pws_at_scale", L, (a, a + W - 1), tuple(best))
    return PwsScanReport(L_max, W, (S.lo, S.hi), "not_pws_at_scale", None, None, tuple(best))


# ---------------------------------------------------------------------------
# arithmetic progressions


def ap_intersection(S: WindowSet, k: int, d: int) -> WindowSet:
    """``⋂_{l=0..k} (S - l d)`` on ``[lo, hi - k d]``."""
    if k < 0 or d < 0:
        raise ValueError("k and d must be non-negative")
    n = S.length - k * d
    if n <= 0:
        raise ValueError(f"k*d = {k * d} leaves no room in a window of length {S.length}")
    out = S.bits[:n].copy()
    for l in range(1, k + 1):
        out &= S.bits[l * d:l * d + n]
    return WindowSet(S.lo, S.lo + n - 1, out, f"AP({k},{d}) of {S.provenance}")


def ap_intersection_density(S: WindowSet, k: int, d: int, M: int) -> DensityEstimate:
    """Banach density estimate of the set of ``c`` with ``c, c+d, ..., c+kd`` in ``S``."""
    return banach_density_estimate(ap_intersection(S, k, d), M)


@dataclass
class APScan:
    """Exhaustive scan of common differences against a density threshold."""

    k: int
    M: int
    threshold: Fraction
    d_range: tuple[int, int]
    successes: dict[int, DensityEstimate] = field(default_factory=dict)
    pruned: int = 0

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "M": self.M,
            "threshold": rational(self.threshold),
            "d_range": list(self.d_range),
            "successful_d": sorted(self.successes),
            "densities": {str(d): e.to_json() for d, e in sorted(self.successes.items())},
            "pruned_by_upper_bound": self.pruned,
        }


def ap_density_scan(S: WindowSet, k: int, d_values: Iterable[int], M: int,
                    threshold: Fraction) -> APScan:
    """Every ``d`` whose :func:`ap_intersection_density` strictly exceeds ``threshold``.

    A word-level popcount bound discards hopeless ``d`` first; it is a true
    upper bound, so the success set equals the one from evaluating every
    ``d`` exactly.
    """
    threshold = Fraction(threshold)
    d_values = list(d_values)
    x = S.to_int()
    scan = APScan(k, M, threshold, (min(d_values), max(d_values)) if d_values else (0, -1))
    words_per_window = -(-M // 64) + 1
    for d in d_values:
        n = S.length - k * d
        if n < M:
            continue
        y = x
        for l in range(1, k + 1):
            y &= x >> (l * d)
        y &= (1 << n) - 1
        nbytes = -(-n // 64) * 8
        words = np.frombuffer(y.to_bytes(nbytes, "little"), dtype=np.uint64)
        pc = np.bitwise_count(words).astype(np.int64)
        w = min(words_per_window, pc.size)
        c = np.concatenate(([0], np.cumsum(pc)))
        ub = int((c[w:] - c[:-w]).max())
        if Fraction(min(ub, M), M) <= threshold:
            scan.pruned += 1
            continue
        est = banach_density_estimate(WindowSet.from_int(y, S.lo, S.lo + n - 1), M)
        if est.value > threshold:
            scan.successes[d] = est
    return scan


# ---------------------------------------------------------------------------
# set files


def write_setfile(S: WindowSet, fh: TextIO | None = None, fmt: str = "auto") -> str | None:
    """Write ``S`` as a set file; ``fmt`` is ``"list"``, ``"runs"`` or ``"auto"``."""
    starts, lengths = runs(S)
    if fmt == "auto":
        fmt = "runs" if len(starts) < len(S) else "list"
    buf = io.StringIO() if fh is None else fh
    buf.write(f"#window {S.lo} {S.hi}\n")
    if S.provenance:
        buf.write(f"#provenance {S.provenance}\n")
    if fmt == "runs":
        for s, n in zip(starts.tolist(), lengths.tolist()):
            buf.write(f"run {s} {n}\n")
    elif fmt == "list":
        for e in S.elements().tolist():
            buf.write(f"{e}\n")
    else:
        raise ValueError(f"unknown set file format {fmt!r}")
    return buf.getvalue() if fh is None else None


def read_setfile(fh: TextIO | str) -> WindowSet:
    text = fh if isinstance(fh, str) else fh.read()
    lo = hi = None
    provenance = ""
    singles: list[int] = []
    spans: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#window"):
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected '#window lo hi'")
            lo, hi = int(parts[1]), int(parts[2])
        elif line.startswith("#provenance"):
            provenance = line[len("#provenance"):].strip()
        elif line.startswith("#"):
            continue
        elif line.startswith("run"):
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 'run start len'")
            spans.append((int(parts[1]), int(parts[2])))
        else:
            singles.append(int(line))
    if lo is None:
        raise ValueError("set file lacks a '#window lo hi' header")
    _check_window(lo, hi)
    bits = np.zeros(hi - lo + 1, dtype=bool)
    for s, n in spans:
        if n < 0 or s < lo or s + n - 1 > hi:
            raise ValueError(f"run {s} {n} leaves the window [{lo}, {hi}]")
        bits[s - lo:s - lo + n] = True
    for e in singles:
        if not lo <= e <= hi:
            raise ValueError(f"element {e} outside the window [{lo}, {hi}]")
        bits[e - lo] = True
    return WindowSet(lo, hi, bits, provenance)
