from fractions import Fraction

import mpmath
import numpy as np
import pytest

import oracles
from sumsetlab.integersets import enumerate_set, example_set, first_terms, validate_sparse_digits
from sumsetlab.reals import genpoly_floor_values, parse_genpoly, parse_real, power_floor_values


def test_parse_real():
    assert parse_real("3/2").exact == Fraction(3, 2)
    assert parse_real(1.3).exact == Fraction(13, 10)
    assert not parse_real("sqrt2").is_rational
    assert float(parse_real("-pi")) == pytest.approx(-np.pi)
    assert float(parse_real("golden-frac")) == pytest.approx(0.6180339887498949)
    with pytest.raises(ValueError):
        parse_real("sqrt7")


def test_fixed_point_of_named_constants():
    with mpmath.workdps(80):
        want = int(mpmath.floor(mpmath.sqrt(2) * mpmath.mpf(2) ** 200))
    assert parse_real("sqrt2").fixed(200) == want


def test_power_floor_rational_matches_isqrt():
    n = np.arange(1, 5001)
    vals, flags = power_floor_values(parse_real("1.5"), n)
    assert vals.tolist() == [oracles.floor_power_3_2(int(v)) for v in n]
    assert not flags.any()


def test_power_floor_irrational_against_mpmath():
    n = np.arange(1, 300)
    vals, flags = power_floor_values(parse_real("sqrt2"), n)
    with mpmath.workdps(60):
        want = [int(mpmath.floor(mpmath.mpf(int(v)) ** mpmath.sqrt(2))) for v in n]
    assert vals.tolist() == want


def test_genpoly_example_and_flags():
    p = parse_genpoly("sqrt2*n^4-pi*n^2")
    vals, flags = genpoly_floor_values(p, np.array([1, 2]))
    assert vals.tolist() == [-2, 10] and not flags.any()
    # an exact integer value sits on a floor boundary and must be flagged
    vals, flags = genpoly_floor_values(parse_genpoly("1/2*n^2+sqrt2*n-sqrt2*n"), np.array([2]))
    assert vals.tolist() in ([2], [1]) and flags.all()


def test_example_sets():
    assert example_set("squares", (0, 20)).elements().tolist() == [0, 1, 4, 9, 16]
    assert example_set("sums_two_squares", (2, 10)).elements().tolist() == [2, 5, 8, 10]
    assert example_set("squarefull", (1, 50)).elements().tolist() == [1, 4, 8, 9, 16, 25, 27, 32, 36, 49]
    assert enumerate_set("squarefull", 3000).tolist() == oracles.squarefull_by_factoring(3000)
    assert enumerate_set("prime_powers", 30).tolist() == [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29]
    assert enumerate_set("k_th_powers", 100, k=3).tolist() == [0, 1, 8, 27, 64]
    assert enumerate_set("sparse_digit", 100, digits=[1, 3, 9, 27]).tolist()[:6] == [0, 1, 3, 4, 9, 10]
    assert first_terms("squares", 3).tolist() == [1, 4, 9]


def test_sparse_digit_validation():
    with pytest.raises(ValueError):
        validate_sparse_digits([1, 2])
    with pytest.raises(ValueError):
        validate_sparse_digits([2, 7])
    assert validate_sparse_digits([2, 6, 30]) == [2, 6, 30]
