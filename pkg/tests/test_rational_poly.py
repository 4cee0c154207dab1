from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sprshift import poly
from sprshift.rational import RationalInterval, as_fraction, fraction_str, log_interval, simplest_between

positive = st.fractions(min_value=Fraction(1, 10**6), max_value=10**6).filter(lambda x: x > 0)


def test_as_fraction_rejects_floats():
    with pytest.raises(TypeError):
        as_fraction(0.5)
    assert as_fraction("3/6") == Fraction(1, 2)
    assert fraction_str(Fraction(4)) == "4/1"


@settings(max_examples=200, deadline=None)
@given(positive)
def test_log_interval_encloses_log(x):
    iv = log_interval(x, bits=50)
    # float log has ~1e-16 relative error; the enclosure must be consistent with it
    assert float(iv.lo) <= math.log(x) + 1e-12
    assert float(iv.hi) >= math.log(x) - 1e-12
    assert iv.width <= Fraction(1, 2**48)


def test_log_interval_of_two_contains_ln2_to_high_precision():
    iv = log_interval(2, bits=200)
    ln2 = Fraction("0.693147180559945309417232121458176568075500134360255254120680009493393621969694715605863326996418687")
    assert iv.lo <= ln2 <= iv.hi
    assert iv.width < Fraction(1, 2**199)


def test_log_is_monotone_and_additive_enclosure():
    a, b = log_interval(Fraction(3)), log_interval(Fraction(5))
    ab = log_interval(Fraction(15))
    assert (a + b).overlaps(ab)
    assert a.strictly_below(b)


@given(positive, positive)
def test_interval_arithmetic_contains_pointwise_results(x, y):
    ix, iy = RationalInterval(x, x + 1), RationalInterval(y, y + 2)
    assert x * y in ix * iy
    assert (x + 1) / y in ix / iy
    assert x - (y + 2) in ix - iy


@given(st.fractions(min_value=0, max_value=50), st.fractions(min_value=Fraction(1, 1000), max_value=5))
def test_simplest_between_is_simplest(lo, w):
    hi = lo + w
    s = simplest_between(lo, hi)
    assert lo <= s <= hi
    for d in range(1, s.denominator):
        n = math.ceil(lo * d)
        assert Fraction(n, d) > hi


def test_series_and_roots():
    assert poly.series((0, 1), (1, -1), 6) == (0, 1, 1, 1, 1, 1, 1)
    iv = poly.smallest_positive_root((1, -1, -1), Fraction(1, 2**20))
    phi_inv = (math.sqrt(5) - 1) / 2
    assert float(iv.lo) <= phi_inv <= float(iv.hi)
    assert poly.smallest_positive_root((1, 1), Fraction(1, 8)) is None


def test_largest_root_and_minimal_polynomial():
    c = poly.mul((-1, -1, 1), (-3, 1))  # roots phi, psi, 3
    iv = poly.refine_largest_root(c, RationalInterval(0, 10), Fraction(1, 2**30))
    assert iv.lo <= 3 <= iv.hi
    assert poly.minimal_polynomial(c, iv) == (-3, 1)
    assert poly.rational_root((-3, 1)) == 3


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=5), st.lists(st.integers(-5, 5), min_size=1, max_size=5))
def test_mul_matches_evaluation(a, b):
    x = Fraction(3, 7)
    assert poly.evaluate(poly.mul(a, b), x) == poly.evaluate(a, x) * poly.evaluate(b, x)
