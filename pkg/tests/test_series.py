import random
from fractions import Fraction

import pytest

from wickjet.coefficients import ComplexRational
from wickjet.errors import DegreeWindowError, DimensionMismatch, TruncationMismatch
from wickjet.series import (
    HbarSeries,
    WickSeries,
    iter_multi_indices,
    mi_factorial,
    total_degree,
)

from support import random_series


def test_total_degree_rule():
    assert total_degree(0, (1,), (1,)) == 2
    assert total_degree(2, (0,), (0,)) == 2
    # an inverse power of h compensated by generators: degree 2*(-1) + 3
    assert total_degree(-2, (3,), (0,)) == 1
    assert total_degree(1, (0, 1), (2, 0)) == 4  # odd k2 = sqrt(h) bookkeeping


def test_constructor_canonicalizes():
    s = WickSeries(1, 4, {
        (0, (1,), (1,)): 1,
        (0, (2,), (0,)): 0,          # dropped: zero coefficient
        (2, (2,), (1,)): Fraction(5),  # dropped: degree 5 > trunc 4
    })
    assert len(s) == 1
    assert s.coefficient(0, (1,), (1,)) == 1
    assert s.coefficient(2, (2,), (1,)) == 0


def test_constructor_rejects_window_violation():
    with pytest.raises(DegreeWindowError):
        WickSeries(1, 4, {(-2, (0,), (0,)): 1}, lower_bound=0)
    # fine with an extended window
    s = WickSeries(1, 4, {(-2, (0,), (0,)): 1}, lower_bound=-2)
    assert s.min_degree() == -2
    assert not s.is_plain()


def test_constructor_rejects_bad_indices():
    with pytest.raises(DimensionMismatch):
        WickSeries(2, 4, {(0, (1,), (0, 0)): 1})
    with pytest.raises(ValueError):
        WickSeries(1, 4, {(0, (-1,), (0,)): 1})


def test_zero_is_empty_and_equality_structural():
    z = WickSeries.zero(1, 5)
    assert not z
    assert z == WickSeries(1, 5, {(0, (1,), (0,)): 0})
    # lower_bound is a window marker, not part of the value
    assert z == WickSeries.zero(1, 5, lower_bound=-3)
    assert z != WickSeries.zero(1, 6)


def test_addition_merges_and_cancels():
    a = WickSeries(1, 4, {(0, (1,), (1,)): 1, (2, (0,), (0,)): Fraction(1, 2)})
    b = WickSeries(1, 4, {(0, (1,), (1,)): -1, (0, (2,), (0,)): 3})
    s = a + b
    assert s.coefficient(0, (1,), (1,)) == 0
    assert s.coefficient(2, (0,), (0,)) == Fraction(1, 2)
    assert s.coefficient(0, (2,), (0,)) == 3
    assert a - a == WickSeries.zero(1, 4)


def test_scalar_mixins():
    a = WickSeries.monomial(1, 4, 2, 0, (1,), (0,))
    assert (a + 1).coefficient(0, (0,), (0,)) == 1
    assert (1 + a) == (a + 1)
    assert (3 * a).coefficient(0, (1,), (0,)) == 6
    assert (a / 2).coefficient(0, (1,), (0,)) == 1
    assert (a * Fraction(1, 2)) == a / 2


def test_pointwise_product_truncates_by_degree():
    a = WickSeries(1, 4, {(0, (2,), (0,)): 1, (0, (0,), (1,)): 1})
    b = WickSeries(1, 4, {(0, (0,), (2,)): 1, (2, (1,), (0,)): 1})
    p = a * b
    assert p.coefficient(0, (2,), (2,)) == 1      # degree 4: kept
    assert p.coefficient(2, (3,), (0,)) == 0      # degree 5: cut
    assert p.coefficient(0, (0,), (3,)) == 1
    assert p.coefficient(2, (1,), (1,)) == 1


def test_mixed_truncation_and_dimension_rejected():
    a = WickSeries.unit(1, 4)
    with pytest.raises(TruncationMismatch):
        a * WickSeries.unit(1, 5)
    with pytest.raises(DimensionMismatch):
        a * WickSeries.unit(2, 4)
    with pytest.raises(TruncationMismatch):
        a + WickSeries.unit(1, 5)


def test_conjugate_example_and_involution():
    f = WickSeries.monomial(1, 5, ComplexRational(2, 3), 0, (2,), (1,))
    c = f.conjugate()
    assert c.coefficient(0, (1,), (2,)) == ComplexRational(2, -3)
    assert c.conjugate() == f
    rng = random.Random(7)
    for _ in range(20):
        s = random_series(rng, 2, 6)
        assert s.conjugate().conjugate() == s


def test_hbar_shift():
    f = WickSeries.monomial(1, 6, 1, 0, (2,), (1,))
    up = f.hbar_shift(2)
    assert up.coefficient(2, (2,), (1,)) == 1
    down = f.hbar_shift(-4)
    assert down.coefficient(-4, (2,), (1,)) == 1
    assert down.lower_bound == -4 + min(0, 3)
    # shifting up can push terms beyond trunc: they are dropped
    g = WickSeries.monomial(1, 4, 1, 0, (2,), (2,))
    assert not g.hbar_shift(2)


def test_degree_slice_and_min_degree():
    f = WickSeries(1, 6, {(0, (1,), (1,)): 1, (2, (1,), (1,)): 2, (0, (3,), (0,)): 5})
    assert f.min_degree() == 2
    sl = f.degree_slice(3)
    assert sl.coefficient(0, (3,), (0,)) == 5
    assert len(sl) == 1
    assert WickSeries.zero(1, 3).min_degree() is None


def test_predicates():
    hol = WickSeries(2, 5, {(2, (1, 0), (0, 0)): 1, (0, (0, 2), (0, 0)): 1})
    assert hol.is_holomorphic()
    assert not hol.is_antiholomorphic()
    assert hol.is_plain()
    ext = WickSeries(1, 5, {(-2, (3,), (0,)): 1}, lower_bound=-1)
    assert not ext.is_plain()
    odd = WickSeries(1, 5, {(1, (1,), (0,)): 1})
    assert not odd.has_integer_h_powers()


def test_records_round_trip():
    rng = random.Random(13)
    for _ in range(10):
        s = random_series(rng, 2, 6, n_terms=5)
        back = WickSeries.from_records(2, 6, s.to_records(), lower_bound=s.lower_bound)
        assert back == s


def test_str_formatting():
    s = WickSeries(1, 4, {(0, (1,), (1,)): 1, (2, (0,), (0,)): -1})
    assert str(s) == "y yb - h"
    t = WickSeries(2, 7, {(4, (1, 0), (0, 2)): Fraction(3, 2)})
    assert str(t) == "3/2 h^2 y1 yb2^2"
    assert str(WickSeries.zero(1, 2)) == "0"
    odd = WickSeries(1, 4, {(3, (1,), (0,)): 1})
    assert str(odd) == "h^(3/2) y"


def test_hbar_series_arithmetic():
    a = HbarSeries(6, {0: 1, 2: -1})
    b = HbarSeries(6, {2: 1, 4: Fraction(1, 2)})
    assert (a + b).coefficient(2) == 0
    assert (a * b).coefficient(2) == 1
    assert (a * b).coefficient(4) == Fraction(1, 2) - 1
    assert (a * b).coefficient(6) == -Fraction(1, 2)
    assert (a * b).coefficient(8) == 0  # beyond trunc
    assert a.shift(2).coefficient(4) == -1
    assert a.coefficient_at_power(1) == -1
    assert a.coefficient_at_power(Fraction(1, 2)) == 0
    assert HbarSeries.one(4) == 1
    with pytest.raises(TruncationMismatch):
        a + HbarSeries(4)


def test_hbar_series_records_and_str():
    a = HbarSeries(6, {0: Fraction(1, 3), 3: -2})
    back = HbarSeries.from_records(6, a.to_records())
    assert back == a
    assert str(a) == "1/3 - 2 h^(3/2)"


def test_constant_part_extraction():
    f = WickSeries(1, 6, {(0, (0,), (0,)): 2, (4, (0,), (0,)): -1, (2, (1,), (1,)): 9})
    c = f.constant_part()
    assert c == HbarSeries(6, {0: 2, 4: -1})


def test_iter_multi_indices_and_factorial():
    found = list(iter_multi_indices(2, 2))
    assert len(found) == 6
    assert (1, 1) in found and (0, 2) in found
    assert mi_factorial((3, 2)) == 12
    assert mi_factorial((0,)) == 1
