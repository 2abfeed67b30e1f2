"""Named, replayable experiments built from the other modules.

Every experiment is a plain function of JSON-friendly arguments.  An
:class:`ExperimentSpec` names the function and its arguments, and
:func:`run_experiment` turns it into an :class:`ExperimentReport` whose
``measured`` and ``verdicts`` sections are deterministic, so a stored
report can be replayed and compared field by field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import mpmath
import numpy as np

from . import finitegroup as fg
from .averaging import d_nu
from .integersets import example_set
from .kronecker import (TorusRegion, TorusRotation, ap_region_measure, bohr_set, cut_shift_reassemble,
                        excess_ap_search, parse_region, parse_rotation)
from .reals import DEFAULT_PRECISION_BITS, parse_real
from .serial import SCHEMA_VERSION, rational, to_jsonable
from .specs import family_set, parse_bset, parse_family
from .windowsets import (WindowSet, ap_density_scan, banach_density_estimate, longest_run,
                         longest_run_interval, piecewise_syndetic_scan, sumset)

HEURISTIC_NOTE = ("heuristic: candidate rotations come from a finite list or from spectral peaks; "
                  "the true rotation can be missed, so a low m(U) is not evidence of absence")


@dataclass
class ExperimentSpec:
    name: str
    kind: str
    params: dict
    seed: int = 0
    precision_bits: int = DEFAULT_PRECISION_BITS
    thresholds: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "kind": self.kind, "params": to_jsonable(self.params), "seed": self.seed,
                "precision_bits": self.precision_bits, "thresholds": to_jsonable(self.thresholds)}

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentSpec":
        return cls(obj["name"], obj["kind"], dict(obj["params"]), int(obj.get("seed", 0)),
                   int(obj.get("precision_bits", DEFAULT_PRECISION_BITS)), dict(obj.get("thresholds", {})))


@dataclass
class ExperimentReport:
    kind: str
    spec: dict
    measured: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    name: str = ""

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self) -> dict:
        return {"schema": SCHEMA_VERSION, "kind": "experiment_report", "experiment": self.kind,
                "name": self.name, "spec": to_jsonable(self.spec),
                "measured": to_jsonable(self.measured), "verdicts": dict(self.verdicts),
                "passed": self.passed, "witnesses": to_jsonable(self.witnesses), "notes": list(self.notes)}


def _window(w) -> tuple[int, int]:
    return (int(w[0]), int(w[1]))


def _extended_sumset(A: WindowSet, B_spec: str, window: tuple[int, int], seed: int, precision: int
                     ) -> tuple[WindowSet, WindowSet]:
    """``A + B`` on ``window``, with ``B`` generated far enough out that no sum is lost at the edges."""
    lo, hi = window
    a_min, a_max = int(A.elements().min()), int(A.elements().max())
    B = parse_bset(B_spec, (lo - a_max, hi - a_min), seed, precision)
    return sumset(A, B, window), B


# ---------------------------------------------------------------------------
# thickness


def verify_thickness(A_family: str, B_spec: str, window: Sequence[int], max_interval_L: int, j: int,
                     seed: int = 0, precision_bits: int = DEFAULT_PRECISION_BITS) -> ExperimentReport:
    """Does ``A + B`` contain a run of every length ``L <= max_interval_L``?

    ``A`` is the support of the family's ``j``-th measure.  ``B`` is built
    on ``[lo - max A, hi - min A]`` so that every integer of ``window`` is
    decided exactly: the whole window is the interior.
    """
    window = _window(window)
    fam = parse_family(A_family)
    A = family_set(fam, j)
    S, B = _extended_sumset(A, B_spec, window, seed, precision_bits)
    best = longest_run(S)
    spec = {"A_family": A_family, "B_spec": B_spec, "window": list(window), "max_interval_L": max_interval_L,
            "j": j, "seed": seed, "precision_bits": precision_bits}
    rep = ExperimentReport("thickness", spec)
    rep.measured = {"A_size": len(A), "A_max": int(A.hi), "B_window": [B.lo, B.hi], "B_size": len(B),
                    "sumset_size": len(S), "longest_run": best, "interior": list(window)}
    rep.verdicts = {"runs_up_to_L": best >= max_interval_L}
    rep.witnesses = {"longest_run_interval": longest_run_interval(S)}
    return rep


# ---------------------------------------------------------------------------
# piecewise Bohr structure


def _harvest_frequencies(S: WindowSet, count: int) -> list[Fraction]:
    x = S.bits.astype(np.float64)
    F = np.abs(np.fft.rfft(x - x.mean()))
    F[0] = 0.0
    top = np.argsort(-F, kind="stable")[:count]
    return [Fraction(int(k), S.length) for k in top.tolist()]


def _best_arc(good: np.ndarray) -> tuple[int, int]:
    """Longest circular run of True bins, as ``(start, length)``."""
    g = good.size
    if good.all():
        return 0, g
    doubled = np.concatenate([good, good])
    best, start, cur = (0, 0), 0, 0
    for i, v in enumerate(doubled.tolist()):
        if v:
            if cur == 0:
                start = i
            cur += 1
            if cur > best[1] and cur <= g:
                best = (start % g, cur)
        else:
            cur = 0
    return best


def verify_piecewise_bohr_content(A_family: str, B_spec: str, window: Sequence[int], j: int,
                                  rotation_candidates: Sequence[str] | None = None, eps=Fraction(1, 20),
                                  grid: int = 256, tolerance=Fraction(1, 50), harvest: int = 5, M: int = 10**4,
                                  seed: int = 0, precision_bits: int = DEFAULT_PRECISION_BITS
                                  ) -> ExperimentReport:
    """Search for a region ``U`` with ``Bohr(alpha, U) ∩ (thick) ⊆ A + B``.

    For each candidate ``alpha`` the orbit of the window is binned on a
    ``grid``-cell circle; a cell is good when at most ``tolerance`` of its
    integers miss ``A + B``.  ``U`` is the longest arc of good cells.  The
    thick part is the complement of the violations, reported by its
    longest run.
    """
    window = _window(window)
    eps, tolerance = Fraction(eps), Fraction(tolerance)
    fam = parse_family(A_family)
    A = family_set(fam, j)
    S, B = _extended_sumset(A, B_spec, window, seed, precision_bits)
    dnu = d_nu(A, fam, j).value
    dstar = banach_density_estimate(B.restrict(*window), min(M, S.length)).value
    target = max(dnu, dstar) - eps
    cands = list(rotation_candidates) if rotation_candidates else [str(f) for f in _harvest_frequencies(S, harvest)]
    n = np.arange(window[0], window[1] + 1, dtype=np.int64)
    results = []
    for c in cands:
        rot = TorusRotation((parse_real(c),), precision_bits)
        if len(S) == S.length:
            U = TorusRegion.full()
        else:
            x = rot.orbit_fixed(n)[:, 0]
            b = (x >> np.uint64(32)).astype(np.int64) * grid >> 32
            tot = np.bincount(b, minlength=grid)
            hit = np.bincount(b, weights=S.bits, minlength=grid)
            good = (tot > 0) & (tot - hit <= tot * float(tolerance))
            s, ln = _best_arc(good)
            if ln == 0:
                U = TorusRegion.empty()
            elif ln == grid:
                U = TorusRegion.full()
            else:
                U = TorusRegion.from_boxes([[(Fraction(s, grid), Fraction((s + ln) % grid, grid))]])
        T = bohr_set(rot, U, window) if U.boxes else WindowSet.empty(*window)
        viol = T.bits & ~S.bits
        clean = WindowSet(window[0], window[1], ~viol)
        results.append({"alpha": c, "U": U.to_json(), "measure_U": U.measure,
                        "violations": int(viol.sum()), "thick_run": longest_run(clean)})
    best = max(results, key=lambda r: (r["measure_U"], -r["violations"])) if results else None
    spec = {"A_family": A_family, "B_spec": B_spec, "window": list(window), "j": j,
            "rotation_candidates": list(rotation_candidates) if rotation_candidates else None,
            "eps": eps, "grid": grid, "tolerance": tolerance, "harvest": harvest, "M": M, "seed": seed,
            "precision_bits": precision_bits}
    rep = ExperimentReport("piecewise_bohr", spec)
    rep.measured = {"d_nu_A": dnu, "d_star_B": dstar, "target": target, "sumset_size": len(S),
                    "best": best, "candidates": results}
    rep.verdicts = {"meets_target": best is not None and best["measure_U"] >= target}
    rep.notes = [HEURISTIC_NOTE]
    return rep


# ---------------------------------------------------------------------------
# progressions


def verify_ap_density(A_family: str, B_spec: str, k: int, eps, d_window: Sequence[int], window: Sequence[int],
                      j: int = 1, M: int = 10**4, target=None, region_tolerance=Fraction(1, 100),
                      seed: int = 0, precision_bits: int = DEFAULT_PRECISION_BITS) -> ExperimentReport:
    """Common differences ``d`` with ``d*(⋂_l (A+B) - l d) > target - eps``.

    ``target`` defaults to ``m(U)`` when ``B`` is a Bohr set and to the
    Banach density estimate of ``B`` otherwise.  For Bohr ``B`` every
    successful ``d`` is also checked against the region condition
    ``m(W_d) > m(U) - eps - region_tolerance``.
    """
    window, d_window = _window(window), _window(d_window)
    eps = Fraction(eps)
    fam = parse_family(A_family)
    A = family_set(fam, j)
    S, B = _extended_sumset(A, B_spec, window, seed, precision_bits)
    rot = region = None
    if B_spec.startswith("bohr:"):
        rot_s, _, reg_s = B_spec[5:].rpartition("@")
        rot = parse_rotation(rot_s, precision_bits)
        region = parse_region(reg_s, rot.dimension)
    if target is None:
        target = region.measure if region is not None else banach_density_estimate(B, min(M, B.length)).value
    target = Fraction(target)
    threshold = target - eps
    ds = range(d_window[0], d_window[1] + 1)
    spec = {"A_family": A_family, "B_spec": B_spec, "k": k, "eps": eps, "d_window": list(d_window),
            "window": list(window), "j": j, "M": M, "target": target, "region_tolerance": region_tolerance,
            "seed": seed, "precision_bits": precision_bits}
    rep = ExperimentReport("ap_density", spec)
    if rot is not None and rot.dimension == 1:
        res = excess_ap_search(rot, region, S, k, eps, d_window, M, slack=target - region.measure)
        scan = res.scan
        predicted = set(res.predicted)
        off = [d for d in sorted(scan.successes)
               if ap_region_measure(rot, region, k, d) <= region.measure - eps - Fraction(region_tolerance)]
        rep.measured["predicted_count"] = len(predicted)
        rep.measured["predicted_min"] = min(predicted) if predicted else None
        rep.measured["region_prediction_matches"] = (res.region_prediction is None
                                                     or sorted(predicted) == res.region_prediction)
        rep.measured["outside_region"] = off
        rep.verdicts["region_consistent"] = not off
    else:
        scan = ap_density_scan(S, k, ds, M, threshold)
    succ = sorted(scan.successes)
    best = max(succ, key=lambda d: (scan.successes[d].value, -d)) if succ else None
    rep.measured.update({"threshold": threshold, "successful_count": len(succ),
                         "smallest_d": succ[0] if succ else None,
                         "best_d": best, "best_density": scan.successes[best].value if succ else None,
                         "pruned": scan.pruned})
    rep.verdicts["some_d_succeeds"] = bool(succ)
    rep.witnesses = {"successful_d": succ,
                     "smallest_d_witness": scan.successes[succ[0]].to_json() if succ else None}
    return rep


# ---------------------------------------------------------------------------
# blockers


def verify_blocker(kind: str, group_spec: str, eps, window: Sequence[int], L_max: int, W: int, M: int = 10**4,
                   slack=Fraction(1, 50), k: int = 2, families: Sequence[str] = (), family_j: int = 10**4,
                   coset_basis=None, seed: int = 0, precision_bits: int = DEFAULT_PRECISION_BITS
                   ) -> ExperimentReport:
    """Build ``B`` from the finite-group certificate and test ``A + B`` at scale."""
    window = _window(window)
    eps, slack = Fraction(eps), Fraction(slack)
    G = fg.parse_group(group_spec)
    spec = {"kind": kind, "group_spec": group_spec, "eps": eps, "window": list(window), "L_max": L_max, "W": W,
            "M": M, "slack": slack, "k": k, "families": list(families), "family_j": family_j,
            "coset_basis": coset_basis, "seed": seed, "precision_bits": precision_bits}
    rep = ExperimentReport("blocker", spec)
    try:
        B, cert = fg.build_blocker(kind, G, eps, 0, window, coset_basis, k=k)
    except fg.BlockerError as exc:
        rep.measured = {"failure": exc.to_json()}
        rep.verdicts = {"certificate_built": False}
        return rep
    replay_ok = cert.replay()
    dens = banach_density_estimate(B, M)
    A = example_set(kind, window, k=k)
    S = sumset(A, B, window)
    scan = piecewise_syndetic_scan(S, L_max, W)
    rep.measured = {"measure_K": cert.measure_K, "budget_used": cert.budget_used, "E_size": cert.E.size,
                    "E_stable": cert.E.stable, "cosets": len(cert.cosets), "banach_density_B": dens.value,
                    "pws_verdict": scan.verdict, "longest_runs": list(scan.longest_runs)}
    rep.verdicts = {"certificate_replay": replay_ok,
                    "omits_cosets": cert.omitted_cosets_ok(),
                    "density": dens.value >= 1 - eps - slack,
                    "not_pws_at_scale": scan.verdict == "not_pws_at_scale"}
    for f in families:
        est = d_nu(B, parse_family(f), family_j)
        rep.measured[f"d_nu[{f}]"] = est.value
        rep.verdicts[f"d_nu[{f}]"] = est.value > 1 - eps - slack
    rep.witnesses = {"certificate": cert.to_json(), "density_witness": dens.to_json(), "scan": scan.to_json()}
    return rep


# ---------------------------------------------------------------------------
# cut, shift, reassemble


def convergent_denominators(alpha, limit: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> list[int]:
    """Continued-fraction denominators ``q`` of ``frac(alpha)`` up to ``limit``."""
    a = parse_real(alpha)
    x = a.exact % 1 if a.is_rational else Fraction(a.fixed(precision_bits) % (1 << precision_bits),
                                                     1 << precision_bits)
    qs, q0, q1 = [], 0, 1
    while x and q1 <= limit:
        x = 1 / x
        c = math.floor(x)
        x -= c
        q0, q1 = q1, c * q1 + q0
        if q1 <= limit:
            qs.append(q1)
    return qs


def make_plan(rot: TorusRotation, interval_plan: dict, shift_plan) -> tuple[list[tuple[int, int]], list[int]]:
    count, length = int(interval_plan["count"]), int(interval_plan["length"])
    start, spacing = int(interval_plan.get("start", 0)), int(interval_plan.get("spacing", length))
    intervals = [(start + i * spacing, start + i * spacing + length - 1) for i in range(count)]
    if isinstance(shift_plan, (list, tuple)):
        shifts = [int(v) for v in shift_plan]
    elif shift_plan == "zero":
        shifts = [0] * count
    elif shift_plan == "convergent":
        qs = convergent_denominators(rot.alpha[0], 10**7, rot.precision)
        shifts = [qs[min(i + 2, len(qs) - 1)] for i in range(count)]
    elif shift_plan == "adversarial":
        shifts = list(range(1, count + 1))
    else:
        raise ValueError(f"unknown shift plan {shift_plan!r}")
    if len(shifts) != count:
        raise ValueError("shift plan length must match the interval count")
    return intervals, shifts


def _direct_member(alpha_mp, region: TorusRegion, n: int) -> int:
    """1 if ``frac(n alpha)`` is in the region, 0 if not, -1 if too close to call."""
    x = mpmath.frac(n * alpha_mp)
    for box in region.boxes:
        a, b = box[0]
        if abs(x - mpmath.mpf(a.numerator) / a.denominator) < 1e-15 or \
                abs(x - mpmath.mpf(b.numerator) / b.denominator) < 1e-15:
            return -1
    return int(any(mpmath.mpf(a.numerator) / a.denominator <= x < mpmath.mpf(b.numerator) / b.denominator
                   for (a, b), in region.boxes))


def verify_cut_shift(rotation: str, region: str, interval_plan: dict, shift_plan, window: Sequence[int] | None = None,
                     eps=Fraction(1, 10), radius: float | None = None, check_limit: int = 20000,
                     seed: int = 0, precision_bits: int = DEFAULT_PRECISION_BITS) -> ExperimentReport:
    """Run the construction and re-check it pointwise at high precision (1-d rotations)."""
    eps = Fraction(eps)
    rot = parse_rotation(rotation, precision_bits)
    U = parse_region(region, rot.dimension)
    intervals, shifts = make_plan(rot, interval_plan, shift_plan)
    if window is None:
        window = (min(a + r for (a, _), r in zip(intervals, shifts)), max(b + r for (_, b), r in zip(intervals, shifts)))
    window = _window(window)
    res = cut_shift_reassemble(rot, U, intervals, shifts, window, eps, radius)
    spec = {"rotation": rotation, "region": region, "interval_plan": interval_plan,
            "shift_plan": shift_plan, "window": list(window), "eps": eps, "radius": radius,
            "check_limit": check_limit, "seed": seed, "precision_bits": precision_bits}
    rep = ExperimentReport("cut_shift", spec)
    direct_ok, checked, undecided = True, 0, 0
    if rot.dimension == 1:
        with mpmath.workprec(precision_bits + 64):
            alpha = rot.alpha[0].mp(precision_bits + 64)
            out = res.reassembled.elements()
            rng = np.random.default_rng(seed)
            sample = out if out.size <= check_limit else np.sort(rng.choice(out, check_limit, replace=False))
            for nn in sample.tolist():
                hits = [_direct_member(alpha, U, nn - r) for (a, b), r in zip(intervals, shifts) if a <= nn - r <= b]
                checked += 1
                if 1 in hits:
                    continue
                if -1 in hits:
                    undecided += 1
                else:
                    direct_ok = False
                    break
            # containment of Bohr(V) on the clustered intervals, pointwise
            if res.cluster and res.V.boxes:
                T = bohr_set(rot, res.V, window).elements()
                outset = set(out.tolist())
                for nn in T.tolist():
                    if not any(intervals[c][0] <= nn - shifts[c] <= intervals[c][1] for c in res.cluster):
                        continue
                    if nn in outset:
                        continue
                    mv = _direct_member(alpha, res.V, nn)
                    if mv == 1:
                        direct_ok = False
                        break
    rep.measured = {"output_size": len(res.reassembled), "cluster_size": len(res.cluster),
                    "measure_U": res.measure_U, "measure_V": res.measure_V, "violations": len(res.violations),
                    "direct_checked": checked, "direct_undecided": undecided}
    rep.verdicts = {"contained": res.contained, "direct_check": direct_ok, "measure_V_large": res.measure_ok}
    rep.witnesses = {"result": res.to_json()}
    return rep


# ---------------------------------------------------------------------------
# dispatch, presets and replay


EXPERIMENTS: dict[str, Callable[..., ExperimentReport]] = {
    "thickness": verify_thickness,
    "piecewise_bohr": verify_piecewise_bohr_content,
    "ap_density": verify_ap_density,
    "blocker": verify_blocker,
    "cut_shift": verify_cut_shift,
}

_SQRT2_BOHR_03 = "bohr:torus:d=1,alpha=sqrt2@box:0,0.3"
_SQRT2_BOHR_04 = "bohr:torus:d=1,alpha=sqrt2@box:0,0.4"

PRESETS: dict[str, ExperimentSpec] = {
    "thickness_power15": ExperimentSpec("thickness_power15", "thickness", {
        "A_family": "power:1.5", "B_spec": _SQRT2_BOHR_03, "window": [0, 10**6], "max_interval_L": 50, "j": 10**4},
        thresholds={"max_interval_L": {"value": 50, "source": "declared"}}),
    "thickness_squares": ExperimentSpec("thickness_squares", "thickness", {
        "A_family": "explicit:squares", "B_spec": _SQRT2_BOHR_03, "window": [0, 10**6], "max_interval_L": 50,
        "j": 1000}, thresholds={"max_interval_L": {"value": 50, "source": "declared"}}),
    "blocker_squares": ExperimentSpec("blocker_squares", "blocker", {
        "kind": "squares", "group_spec": "product:4,9,5,7,11,13", "eps": "1/5", "window": [0, 10**6],
        "L_max": 24, "W": 200, "M": 10**4, "slack": "1/50"},
        thresholds={"density": {"value": "39/50", "source": "coset mass budget minus slack"}}),
    "blocker_primes": ExperimentSpec("blocker_primes", "blocker", {
        "kind": "primes", "group_spec": "product:4,9,5,7,11,13", "eps": "1/5", "window": [0, 10**6],
        "L_max": 24, "W": 200, "M": 10**4, "slack": "1/50"},
        thresholds={"density": {"value": "39/50", "source": "coset mass budget minus slack"}}),
    "ap_density_sqrt2": ExperimentSpec("ap_density_sqrt2", "ap_density", {
        "A_family": "list:0", "B_spec": _SQRT2_BOHR_04, "k": 3, "eps": "1/10", "d_window": [1, 10**4],
        "window": [0, 10**6], "M": 10**4},
        thresholds={"threshold": {"value": "3/10", "source": "m(U) - eps"}}),
    "piecewise_bohr_power15": ExperimentSpec("piecewise_bohr_power15", "piecewise_bohr", {
        "A_family": "power:1.5", "B_spec": _SQRT2_BOHR_04, "window": [0, 10**5], "j": 2000,
        "rotation_candidates": ["sqrt2"]}),
    "cut_shift_convergent": ExperimentSpec("cut_shift_convergent", "cut_shift", {
        "rotation": "torus:d=1,alpha=sqrt2", "region": "box:0,0.4",
        "interval_plan": {"count": 8, "length": 500, "spacing": 1000}, "shift_plan": "convergent",
        "eps": "1/10"}),
    "cut_shift_adversarial": ExperimentSpec("cut_shift_adversarial", "cut_shift", {
        "rotation": "torus:d=1,alpha=sqrt2", "region": "box:0,0.4",
        "interval_plan": {"count": 8, "length": 500, "spacing": 1000}, "shift_plan": "adversarial",
        "eps": "1/10"}),
}


def _coerce(params: dict) -> dict:
    out = {}
    for key, v in params.items():
        if key in ("eps", "slack", "tolerance", "region_tolerance", "target") and isinstance(v, (str, int)):
            v = Fraction(v)
        elif isinstance(v, dict) and set(v) == {"num", "den"}:
            v = Fraction(v["num"], v["den"])
        out[key] = v
    return out


def run_experiment(spec: ExperimentSpec | dict) -> ExperimentReport:
    if isinstance(spec, dict):
        spec = ExperimentSpec.from_json(spec)
    if spec.kind not in EXPERIMENTS:
        raise ValueError(f"unknown experiment kind {spec.kind!r}; expected one of {', '.join(EXPERIMENTS)}")
    params = _coerce(spec.params)
    params.setdefault("seed", spec.seed)
    params.setdefault("precision_bits", spec.precision_bits)
    rep = EXPERIMENTS[spec.kind](**params)
    rep.name = spec.name
    rep.spec = spec.to_json()
    return rep


@dataclass
class ReplayResult:
    ok: bool
    differences: list[str]

    def to_json(self) -> dict:
        return {"schema": SCHEMA_VERSION, "kind": "replay", "ok": self.ok, "differences": self.differences}


def _diff(a: Any, b: Any, path: str, out: list[str]) -> None:
    if isinstance(a, dict) and isinstance(b, dict):
        for key in sorted(set(a) | set(b)):
            _diff(a.get(key), b.get(key), f"{path}.{key}", out)
    elif isinstance(a, list) and isinstance(b, list) and len(a) == len(b):
        for i, (x, y) in enumerate(zip(a, b)):
            _diff(x, y, f"{path}[{i}]", out)
    elif a != b:
        out.append(f"{path}: stored {json.dumps(a)[:80]} vs replayed {json.dumps(b)[:80]}")


def replay(obj: dict) -> ReplayResult:
    """Re-verify a stored experiment report (by re-running its spec) or a blocker certificate."""
    if obj.get("kind") == "blocker_certificate":
        try:
            cert = fg.BlockerCertificate.from_json(obj)
        except ValueError as exc:
            return ReplayResult(False, [str(exc)])
        ok = cert.replay()
        return ReplayResult(ok, [] if ok else ["certificate replay failed"])
    if obj.get("kind") != "experiment_report":
        raise ValueError("replay expects an experiment report or a blocker certificate")
    fresh = run_experiment(ExperimentSpec.from_json(obj["spec"])).to_json()
    diffs: list[str] = []
    for section in ("measured", "verdicts"):
        _diff(obj.get(section), fresh.get(section), section, diffs)
    return ReplayResult(not diffs, diffs)
