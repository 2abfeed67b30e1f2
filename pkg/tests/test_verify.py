import json
from fractions import Fraction
from pathlib import Path

import pytest

from sumsetlab import finitegroup as fg
from sumsetlab.verify import (PRESETS, ExperimentSpec, convergent_denominators, make_plan, replay,
                              run_experiment, verify_ap_density, verify_blocker, verify_cut_shift,
                              verify_thickness)
from sumsetlab.kronecker import TorusRotation

REPORTS = Path(__file__).parent / "goldens" / "reports"
EVENS = "bohr:torus:d=1,alpha=1/2@box:0,0.5"


def frac(obj) -> Fraction:
    return Fraction(obj["num"], obj["den"])


@pytest.mark.parametrize("path", sorted(REPORTS.glob("*.json")), ids=lambda p: p.stem)
def test_pinned_reports_replay(path):
    stored = json.loads(path.read_text())
    assert stored["schema"] == "sumsetlab/1"
    res = replay(stored)
    assert res.ok, res.differences


def test_replay_detects_tampering():
    stored = json.loads((REPORTS / "cut_shift_convergent.json").read_text())
    stored["measured"]["output_size"] += 1
    res = replay(stored)
    assert not res.ok
    assert any("output_size" in d for d in res.differences)


def test_certificate_roundtrip_and_replay():
    stored = json.loads((REPORTS / "blocker_squares.json").read_text())
    cert = stored["witnesses"]["certificate"]
    assert cert["kind"] == "blocker_certificate"
    assert replay(cert).ok
    bad = json.loads(json.dumps(cert))
    bad["measure_K"] = {"num": 1, "den": 1}
    assert not replay(bad).ok


def test_large_projection_stored_by_source():
    stored = json.loads((REPORTS / "blocker_primes.json").read_text())
    E = stored["witnesses"]["certificate"]["E"]
    assert "elements" not in E and E["source"]["kind"] == "primes"
    assert replay(stored["witnesses"]["certificate"]).ok


def test_thickness_trivial():
    rep = verify_thickness("list:0", "all", (0, 500), 100, 1)
    assert rep.verdicts == {"runs_up_to_L": True}
    assert rep.measured["longest_run"] == 501


def test_thickness_edges_are_exact():
    # B = evens, A = {0, 1}: every integer of the window is a sum, including the ends
    rep = verify_thickness("list:0,1", EVENS, (0, 99), 100, 2)
    assert rep.measured["longest_run"] == 100


def test_thickness_negative():
    rep = verify_thickness("list:0", EVENS, (0, 99), 2, 1)
    assert rep.measured["longest_run"] == 1
    assert rep.verdicts["runs_up_to_L"] is False


def test_ap_density_k0_is_density():
    rep = verify_ap_density("list:0", "all", 0, Fraction(1, 10), (1, 3), (0, 2000), M=100)
    assert rep.measured["best_density"] == 1
    assert rep.measured["successful_count"] == 3


def test_ap_density_evens():
    rep = verify_ap_density("list:0", EVENS, 2, Fraction(1, 10), (1, 6), (0, 4000), M=1000)
    # only even differences keep a progression inside the evens
    assert rep.witnesses["successful_d"] == [2, 4, 6]
    assert rep.measured["best_density"] == Fraction(1, 2)


def test_blocker_failure_is_reported():
    rep = verify_blocker("squares", "cyclic:4", Fraction(1, 1000), (0, 1000), 4, 50, M=100)
    assert rep.verdicts == {"certificate_built": False}
    assert rep.measured["failure"]["status"] == "failure"
    with pytest.raises(fg.BlockerError):
        fg.build_blocker("squares", fg.parse_group("cyclic:4"), Fraction(1, 1000))


def test_convergent_denominators():
    assert convergent_denominators("sqrt2", 1000) == [2, 5, 12, 29, 70, 169, 408, 985]
    assert convergent_denominators("1/3", 100) == [3]


def test_make_plan_shapes():
    rot = TorusRotation.of("sqrt2")
    iv, sh = make_plan(rot, {"count": 3, "length": 10}, "zero")
    assert iv == [(0, 9), (10, 19), (20, 29)] and sh == [0, 0, 0]
    _, sh = make_plan(rot, {"count": 3, "length": 10}, "adversarial")
    assert sh == [1, 2, 3]
    with pytest.raises(ValueError):
        make_plan(rot, {"count": 3, "length": 10}, [1])


def test_cut_shift_zero_shift_is_the_bohr_set():
    rep = verify_cut_shift("torus:d=1,alpha=sqrt2", "box:0,0.4", {"count": 4, "length": 100}, "zero")
    assert rep.verdicts == {"contained": True, "direct_check": True, "measure_V_large": True}
    assert rep.measured["measure_V"] == Fraction(2, 5)
    assert rep.measured["cluster_size"] == 4


def test_cut_shift_convergent_vs_adversarial():
    conv = json.loads((REPORTS / "cut_shift_convergent.json").read_text())["measured"]
    adv = json.loads((REPORTS / "cut_shift_adversarial.json").read_text())["measured"]
    assert conv["cluster_size"] == 8
    assert frac(conv["measure_V"]) > Fraction(3, 10)
    # spread-out shift images leave only a small cluster to work with
    assert adv["cluster_size"] < 8


def test_experiment_spec_roundtrip():
    spec = PRESETS["blocker_squares"]
    again = ExperimentSpec.from_json(json.loads(json.dumps(spec.to_json())))
    assert again == spec


def test_unknown_experiment_kind():
    with pytest.raises(ValueError, match="unknown experiment kind"):
        run_experiment({"name": "x", "kind": "nope", "params": {}})


def test_replay_rejects_other_objects():
    with pytest.raises(ValueError):
        replay({"kind": "something"})


def test_contrast_squares_run_shorter_than_power15():
    # same B, same window; squares up to 10^6 against floor(n^1.5) up to n = 10^4
    sq = run_experiment(PRESETS["thickness_squares"])
    pw = run_experiment(PRESETS["thickness_power15"])
    print("longest runs: squares", sq.measured["longest_run"], "power_1.5", pw.measured["longest_run"])
    assert sq.measured["longest_run"] < pw.measured["longest_run"]
