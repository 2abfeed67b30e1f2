"""Freeze oracle values into tests/goldens/.

Every number written here comes from the slow references in
tests/oracles.py, never from the package itself, except for entries in
``pinned_runs.json`` whose oracle is an exhaustive scan by the package
and which are re-verified independently by replay.

    python tools/make_goldens.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import mpmath
import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402

GOLD = ROOT / "tests" / "goldens"
J_LIST = (1000, 10000, 100000)


def weyl_goldens() -> dict:
    out = {"grid": 1024, "power_1.5": {}, "squares": {}}
    for j in J_LIST:
        vals = [oracles.floor_power_3_2(n) for n in range(1, j + 1)]
        m, k = oracles.weyl_max_direct(vals, 1024)
        out["power_1.5"][str(j)] = {"max_abs": m, "k_argmax": k}
        sq = [n * n for n in range(1, j + 1)]
        m, k = oracles.weyl_max_direct(sq, 1024)
        out["squares"][str(j)] = {"max_abs": m, "k_argmax": k}
        print("weyl", j, out["power_1.5"][str(j)], out["squares"][str(j)])
    return out


def orbit_goldens() -> dict:
    phi = oracles.named("golden")
    s2 = oracles.named("sqrt2")
    out = {"golden_half_0_9": oracles.bohr_direct(phi, 0, 0.5, 0, 9)}
    with mpmath.workdps(60):
        e = oracles.bohr_direct(s2 - 1, 0, 0.1, 0, 10**5)
    gaps = np.diff(e)
    out["sqrt2m1_tenth_gaps"] = {"max_gap": int(gaps.max()), "distinct": sorted(set(gaps.tolist())),
                                 "entries": len(e)}
    pts = [oracles.floor_power_3_2(n) for n in range(1, 10**5 + 1)]
    z = oracles.rotation_average_direct(1, s2, pts)
    out["rotavg_power15_char1_sqrt2"] = {"re": z.real, "im": z.imag}
    g = oracles.geometric_average(s2, 10**4)
    out["geometric_sqrt2_1e4"] = {"re": g.real, "im": g.imag}
    print("orbit", {k: v for k, v in out.items() if k != "golden_half_0_9"})
    return out


PINNED = ("blocker_squares", "blocker_primes", "piecewise_bohr_power15", "cut_shift_convergent",
          "cut_shift_adversarial")


def pinned_reports() -> None:
    # these runs are their own oracle; the stored reports are checked by replay
    from sumsetlab.serial import dumps
    from sumsetlab.verify import PRESETS, run_experiment

    out = GOLD / "reports"
    out.mkdir(exist_ok=True)
    for name in PINNED:
        rep = run_experiment(PRESETS[name])
        (out / f"{name}.json").write_text(dumps(rep.to_json()) + "\n")
        print("pinned", name, rep.verdicts)


def main() -> None:
    GOLD.mkdir(parents=True, exist_ok=True)
    for name, fn in (("weyl_profile.json", weyl_goldens), ("orbits.json", orbit_goldens)):
        (GOLD / name).write_text(json.dumps(fn(), indent=2, sort_keys=True) + "\n")
    pinned_reports()


if __name__ == "__main__":
    main()
