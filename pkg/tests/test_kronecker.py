from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from sumsetlab.averaging import FiniteMeasure, SequenceFamily, measure_at, restrict
from sumsetlab.kronecker import (TorusRegion, TorusRotation, TrigPolynomial, ap_region_measure, bohr_set,
                                 cut_shift_reassemble, entry_gap_bound, excess_ap_search, parse_region,
                                 parse_rotation, pushforward_density, restricted_average_vs_convolution,
                                 rotation_average)
from sumsetlab.windowsets import WindowSet

SQRT2 = TorusRotation.of("sqrt2")


def test_orbit_precision_far_out():
    with mpmath.workdps(80):
        s2 = mpmath.sqrt(2)
        for n in (1, 10**6, 10**8, -12345, 3 * 10**9):
            x = SQRT2.orbit_fixed(np.array([n]))[0, 0]
            err = abs(mpmath.frac(n * s2) - mpmath.mpf(int(x)) / 2**64)
            assert err <= SQRT2.error_bound(abs(n))


def test_parse_specs():
    r = parse_rotation("torus:d=2,alpha=sqrt2,sqrt3")
    assert r.dimension == 2
    assert parse_region("box:0,0.4").measure == Fraction(2, 5)
    assert parse_region("box:0,0.5;0.25,0.75").measure == Fraction(1, 4)
    assert parse_region("box:0.9,0.1").measure == Fraction(1, 5)
    assert parse_region("box:0,0.3|box:0.2,0.5").measure == Fraction(1, 2)
    assert parse_region("full").is_full()
    for bad in ("torus:alpha=sqrt2", "torus:d=2,alpha=sqrt2"):
        with pytest.raises(ValueError, match="rotation grammar"):
            parse_rotation(bad)
    with pytest.raises(ValueError, match="region grammar"):
        parse_region("ball:0,1")


def test_bohr_examples(goldens):
    r = TorusRotation.of(Fraction(1, 4))
    # orbit 0, 1/4, 1/2, 3/4: both 0 and 1/4 lie in [0, 0.3)
    assert bohr_set(r, TorusRegion.interval(0, Fraction(3, 10)), (0, 7)).elements().tolist() == [0, 1, 4, 5]
    assert bohr_set(SQRT2, TorusRegion.full(), (0, 50)) == WindowSet.full(0, 50)
    g = TorusRotation.of("golden")
    got = bohr_set(g, TorusRegion.interval(0, Fraction(1, 2)), (0, 9)).elements().tolist()
    assert got == goldens["orbits"]["golden_half_0_9"]


def test_bohr_against_mpmath():
    with mpmath.workdps(50):
        want = oracles.bohr_direct(oracles.named("sqrt2"), 0.25, 0.6, -3000, 3000)
    got = bohr_set(SQRT2, TorusRegion.interval("1/4", "3/5"), (-3000, 3000))
    assert got.elements().tolist() == want


@given(st.fractions(0, 1), st.fractions(0, 1), st.fractions(0, 1), st.fractions(0, 1))
def test_bohr_union(a, b, c, d):
    U = TorusRegion.from_boxes([[(a, b)]])
    V = TorusRegion.from_boxes([[(c, d)]])
    W = U.union(V)
    w = (0, 2000)
    S, fl = bohr_set(SQRT2, W, w, return_flags=True)
    SU, f1 = bohr_set(SQRT2, U, w, return_flags=True)
    SV, f2 = bohr_set(SQRT2, V, w, return_flags=True)
    keep = np.ones(2001, bool)
    keep[np.concatenate([fl, f1, f2]).astype(int)] = False
    assert np.array_equal(S.bits & keep, (SU.bits | SV.bits) & keep)
    assert W.measure <= U.measure + V.measure


def test_region_canonical_measure():
    R = TorusRegion.from_boxes([[(0, "1/2"), (0, "1/2")], [("1/4", "3/4"), ("1/4", "3/4")]])
    assert R.measure == Fraction(1, 4) + Fraction(1, 4) - Fraction(1, 16)
    assert R.translate([Fraction(1, 3), Fraction(1, 5)]).measure == R.measure


def test_entry_gaps():
    assert entry_gap_bound(SQRT2, TorusRegion.full(), (0, 100)).max_gap == 1
    half = TorusRotation.of(Fraction(1, 2))
    assert entry_gap_bound(half, TorusRegion.interval(0, Fraction(2, 5)), (0, 100)).max_gap == 2
    # alpha is used mod 1, so sqrt2 and sqrt2 - 1 give the same entry times
    U = TorusRegion.interval(0, Fraction(1, 10))
    r = TorusRotation((SQRT2.alpha[0],))
    assert bohr_set(r, U, (0, 1000)) == bohr_set(TorusRotation.of("sqrt2"), U, (0, 1000))


def test_entry_gaps_golden(goldens):
    g = goldens["orbits"]["sqrt2m1_tenth_gaps"]
    e = entry_gap_bound(SQRT2, TorusRegion.interval(0, Fraction(1, 10)), (0, 10**5))
    assert e.max_gap == g["max_gap"] and list(e.distinct_gaps) == g["distinct"] and e.entries == g["entries"]


@given(st.fractions(0, 1), st.fractions("1/50", "1/2"), st.sampled_from(["sqrt2", "sqrt3", "golden", "pi"]))
def test_three_gap_theorem(a, length, name):
    U = TorusRegion.from_boxes([[(a, (a + length) % 1)]])
    e = entry_gap_bound(TorusRotation.of(name), U, (0, 5000))
    assert len(e.distinct_gaps) <= 3


def test_rotation_average():
    one = TrigPolynomial.constant(1.0)
    nu = measure_at(SequenceFamily.interval(), 100)
    assert rotation_average(one, SQRT2, nu) == pytest.approx(1)
    chi = TrigPolynomial.character(1)
    for N in (10, 1000, 10**4):
        nu = measure_at(SequenceFamily.interval(), N)
        want = oracles.geometric_average(oracles.named("sqrt2"), N)
        assert abs(rotation_average(chi, SQRT2, nu) - want) < 1e-9


def test_rotation_average_power_floor(goldens):
    g = goldens["orbits"]["rotavg_power15_char1_sqrt2"]
    nu = measure_at(SequenceFamily.power_floor(1.5), 10**5)
    val = rotation_average(TrigPolynomial.character(1), SQRT2, nu)
    assert val == pytest.approx(complex(g["re"], g["im"]), abs=1e-9)
    assert abs(val) < 0.05


def test_pushforward():
    d = pushforward_density(FiniteMeasure.uniform([0]), SQRT2, 16)
    assert d.numerators[0] == 1 and d.numerators.sum() == 1
    nu = measure_at(SequenceFamily.interval(), 10**5)
    d = pushforward_density(nu, SQRT2, 256)
    assert np.all(np.abs(d.masses() - 1 / 256) < 0.05) and d.total == 1
    eta = restrict(measure_at(SequenceFamily.interval(), 1000), lambda n: n % 3 == 0)
    d = pushforward_density(eta, SQRT2, 10)
    assert d.total == Fraction(333, 1000) == d.integral_psi()


def test_convolution_identity():
    f = TrigPolynomial((((0,), 0.5), ((1,), 1.0), ((-2,), 0.25j)))
    nu = measure_at(SequenceFamily.interval(), 10**5)
    rep = restricted_average_vs_convolution(f, SQRT2, nu, 128)
    assert rep.mass_conserved and rep.discrepancy < 0.05
    assert np.allclose(rep.phi, 0.5, atol=0.01)
    half = restrict(nu, lambda n: n % 2 == 0)
    rep = restricted_average_vs_convolution(TrigPolynomial.character(1), SQRT2, half, 256)
    assert rep.integral_psi == Fraction(1, 2) and rep.discrepancy < 0.05


def test_convolution_trend():
    f = TrigPolynomial.character(1)
    disc = []
    for j in (10**3, 10**4, 10**5):
        eta = restrict(measure_at(SequenceFamily.interval(), j), lambda n: n % 5 <= 1)
        disc.append(restricted_average_vs_convolution(f, SQRT2, eta, 256).discrepancy)
    # the grid bias (~1e-6 at 256 bins) is the floor below which the trend stops
    assert disc[2] <= disc[0] + 1e-6


def test_convolution_dimension_limit():
    r = TorusRotation.of("sqrt2", "sqrt3", "sqrt5", "pi")
    with pytest.raises(ValueError):
        restricted_average_vs_convolution(TrigPolynomial.character(1, 0, 0, 0), r,
                                          FiniteMeasure.uniform([1]), 4)


def test_cut_shift_trivial():
    U = TorusRegion.interval(0, Fraction(2, 5))
    res = cut_shift_reassemble(SQRT2, U, [(0, 99), (100, 199)], [0, 0], (0, 199))
    assert res.reassembled == bohr_set(SQRT2, U, (0, 199))
    assert res.V.measure == U.measure and res.contained


def test_cut_shift_single_translate():
    U = TorusRegion.interval(0, Fraction(2, 5))
    res = cut_shift_reassemble(SQRT2, U, [(0, 99)], [1000], (1000, 1099))
    assert res.reassembled == bohr_set(SQRT2, U, (0, 99)).translate(1000)
    assert res.measure_V == U.measure and res.contained


def test_excess_ap_trivial_cases():
    U = TorusRegion.interval(0, Fraction(2, 5))
    B = bohr_set(SQRT2, U, (0, 20000))
    res = excess_ap_search(SQRT2, U, B, 0, Fraction(1, 10), (1, 20), 2000)
    assert res.predicted == list(range(1, 21)) and sorted(res.scan.successes) == list(range(1, 21))
    full = TorusRegion.full()
    res = excess_ap_search(SQRT2, full, WindowSet.full(0, 5000), 3, Fraction(1, 10), (1, 20), 1000)
    assert all(e.value == 1 for e in res.scan.successes.values()) and len(res.scan.successes) == 20
    assert ap_region_measure(SQRT2, full, 3, 7) == 1
