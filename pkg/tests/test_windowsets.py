import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from sumsetlab.windowsets import (WindowRangeError, WindowSet, ap_intersection, ap_intersection_density,
                                  banach_density_estimate, dilate, longest_run, piecewise_syndetic_scan,
                                  read_setfile, runs, sumset, syndetic_at_scale, upper_density_estimate,
                                  write_setfile)

evens = WindowSet.from_predicate(lambda n: n % 2 == 0, 0, 999)


def ws(elems, lo, hi):
    return WindowSet.from_elements(elems, lo, hi)


def test_equality_ignores_provenance():
    a = WindowSet.from_elements([1, 2], 0, 5, "one")
    b = WindowSet.from_elements([2, 1], 0, 5, "two")
    assert a == b and hash(a) == hash(b)
    assert a != WindowSet.from_elements([1, 2], 0, 6)


def test_elements_stay_in_window():
    S = ws(range(-50, 50), -10, 10)
    assert S.elements().min() >= -10 and S.elements().max() <= 10
    assert len(S) == 21 == int(S.bits.sum())


def test_window_overflow_is_a_range_error():
    with pytest.raises(WindowRangeError):
        WindowSet.empty(0, 2**40)
    with pytest.raises(WindowRangeError):
        WindowSet.empty(2**63, 2**63 + 2)


@pytest.mark.parametrize("method", ["shift", "fft", "auto"])
def test_sumset_examples(method):
    assert sumset(ws([0, 2], 0, 2), ws([0, 1], 0, 1), (0, 3), method).elements().tolist() == [0, 1, 2, 3]
    B = ws([3, 5, 8, 13], 0, 20)
    assert sumset(ws([0], 0, 0), B, (0, 20), method) == B
    got = sumset(ws([1, 4, 9, 16], 0, 16), ws([0, 1], 0, 1), (0, 20), method)
    assert got.elements().tolist() == [1, 2, 4, 5, 9, 10, 16, 17]


def test_sumset_drops_sums_outside_window():
    assert sumset(ws([0, 10], 0, 10), ws([0, 1], 0, 1), (0, 5)).elements().tolist() == [0, 1]


small_sets = st.lists(st.integers(-20, 20), max_size=12)


@settings(max_examples=1000)
@given(small_sets, small_sets, st.integers(-45, 0), st.integers(0, 45))
def test_sumset_matches_triple_loop(A, B, lo, hi):
    got = sumset(ws(A, -20, 20), ws(B, -20, 20), (lo, hi))
    assert set(got.elements().tolist()) == oracles.sumset_triple_loop(sorted(set(A)), sorted(set(B)), lo, hi)


@given(small_sets, small_sets, small_sets)
def test_sumset_commutative_and_associative(A, B, C):
    SA, SB, SC = ws(A, -20, 20), ws(B, -20, 20), ws(C, -20, 20)
    assert sumset(SA, SB, (-40, 40)) == sumset(SB, SA, (-40, 40))
    left = sumset(sumset(SA, SB, (-40, 40)), SC, (-60, 60))
    right = sumset(SA, sumset(SB, SC, (-40, 40)), (-60, 60))
    assert left == right


@given(small_sets, small_sets, small_sets)
def test_sumset_monotone(A, extra, B):
    SA, SA2, SB = ws(A, -20, 20), ws(A + extra, -20, 20), ws(B, -20, 20)
    assert sumset(SA, SB, (-30, 30)).issubset(sumset(SA2, SB, (-30, 30)))


def test_fft_and_shift_agree_on_large_random_sets():
    rng = np.random.default_rng(1)
    A = WindowSet(0, 5000, rng.random(5001) < 0.3)
    B = WindowSet(-200, 3000, rng.random(3201) < 0.01)
    assert sumset(A, B, (-500, 9000), "fft") == sumset(A, B, (-500, 9000), "shift")


def test_banach_examples():
    assert banach_density_estimate(evens, 100).value == Fraction(1, 2)
    assert banach_density_estimate(WindowSet.full(0, 99), 10).value == 1
    sq = ws(np.arange(101) ** 2, 0, 10**4)
    c = np.concatenate(([0], np.cumsum(sq.bits)))
    assert banach_density_estimate(sq, 100).value == Fraction(int((c[100:] - c[:-100]).max()), 100)
    est = banach_density_estimate(sq, 100)
    a, b = est.witness_window
    assert len(sq.restrict(a, b)) == est.count and b - a + 1 == 100
    with pytest.raises(ValueError):
        banach_density_estimate(evens, 0)


@given(st.lists(st.booleans(), min_size=40, max_size=200), st.integers(1, 10), st.integers(1, 4))
def test_banach_antitone_in_multiples(bits, M, c):
    S = WindowSet(0, len(bits) - 1, np.array(bits))
    if c * M <= S.length:
        assert banach_density_estimate(S, c * M).value <= banach_density_estimate(S, M).value


def test_upper_density_examples():
    ev = WindowSet.from_predicate(lambda n: n % 2 == 0, 0, 1000)
    assert upper_density_estimate(ev, 1000).value == Fraction(1, 2)
    assert upper_density_estimate(WindowSet.empty(0, 100), 100).value == 0
    pf = ws([oracles.floor_power_3_2(n) for n in range(1, 10**4 + 1)], 0, 10**6)
    est = upper_density_estimate(pf, 10**4)
    counts = np.cumsum(pf.bits[1:10**4 + 1])
    best = max(Fraction(int(counts[N - 1]), N) for N in range(1, 10**4 + 1))
    assert est.value == best


def test_runs_and_syndeticity():
    assert longest_run(ws([3, 4, 5, 9], 0, 10)) == 3
    assert longest_run(WindowSet.empty(0, 10)) == 0
    assert longest_run(evens) == 1
    assert syndetic_at_scale(evens, 1).syndetic
    assert not syndetic_at_scale(evens, 0).syndetic
    sq = ws(np.arange(101) ** 2, 0, 10**4)
    res = syndetic_at_scale(sq, 100)
    assert not res.syndetic
    assert res.worst_gap == 10**4 - 99**2  # the last gap, 199
    starts, lengths = runs(ws([1, 2, 5], 0, 9))
    assert starts.tolist() == [1, 5] and lengths.tolist() == [2, 1]


@given(st.lists(st.booleans(), min_size=5, max_size=80), st.integers(0, 10), st.integers(0, 10))
def test_syndetic_monotone_in_scale(bits, L, extra):
    S = WindowSet(0, len(bits) - 1, np.array(bits))
    if syndetic_at_scale(S, L).syndetic:
        assert syndetic_at_scale(S, L + extra).syndetic


def test_pws_examples():
    rep = piecewise_syndetic_scan(evens, 1, 100)
    assert rep.verdict == "pws_at_scale" and rep.F == (0, 1) and rep.replay(evens)
    sevens = WindowSet.from_predicate(lambda n: n % 7 == 0, 0, 999)
    rep = piecewise_syndetic_scan(sevens, 6, 50)
    assert rep.verdict == "pws_at_scale" and rep.F == tuple(range(7))
    sq = ws(np.arange(1001) ** 2, 0, 10**6)
    rep = piecewise_syndetic_scan(sq, 10, 100)
    assert rep.verdict == "not_pws_at_scale" and rep.replay(sq)


@given(st.lists(st.booleans(), min_size=10, max_size=120), st.integers(0, 6), st.integers(1, 10))
def test_pws_verdict_matches_longest_run(bits, L, W):
    S = WindowSet(0, len(bits) - 1, np.array(bits))
    if W > S.length:
        return
    rep = piecewise_syndetic_scan(S, L, W)
    reachable = max(longest_run(dilate(S, l)) for l in range(L + 1)) >= W
    assert (rep.verdict == "pws_at_scale") == reachable
    assert rep.replay(S)


def test_ap_intersection():
    full = WindowSet.full(0, 999)
    assert ap_intersection_density(full, 3, 7, 100).value == 1
    ev = WindowSet.from_predicate(lambda n: n % 2 == 0, 0, 999)
    assert ap_intersection_density(ev, 1, 2, 100).value == Fraction(1, 2)
    rng = np.random.default_rng(3)
    S = WindowSet(0, 2999, rng.random(3000) < 0.6)
    for k, d in [(1, 1), (2, 5), (3, 17)]:
        assert ap_intersection_density(S, k, d, 200).value == oracles.ap_density_brute(S.bits, k, d, 200)
    assert ap_intersection(S, 2, 5).hi == 2999 - 10


@pytest.mark.parametrize("fmt", ["list", "runs", "auto"])
def test_setfile_round_trip(fmt):
    S = WindowSet.from_elements([0, 1, 2, 3, 10, 12, 13], -5, 20, "demo set")
    text = write_setfile(S, fmt=fmt)
    back = read_setfile(io.StringIO(text))
    assert back == S and back.provenance == "demo set"
