"""
有限域、截断级数与 Frobenius 下标的单元测试
"""
import unittest

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.algebra import (
    FqField,
    FrobOrbitIndex,
    TruncatedLaurentSeries,
    coeff_frobenius,
    series_inverse,
    substitute_u_p,
)
from src.core.errors import InvalidField, ZeroToPrecision


def series(field, coeffs, precision, low=0):
    return TruncatedLaurentSeries.from_coefficients(field, coeffs, precision, low)


class TestFqField(unittest.TestCase):
    """有限域的构造与坐标"""

    def test_rejects_non_prime(self):
        with self.assertRaises(InvalidField):
            FqField(6)

    def test_rejects_zero_degree(self):
        with self.assertRaises(InvalidField):
            FqField(5, 0)

    def test_rejects_reducible_modulus(self):
        # (t + 1)^2
        with self.assertRaises(InvalidField):
            FqField(3, 2, [1, 2, 1])

    def test_coords_roundtrip(self):
        F = FqField(3, 2, [1, 0, 1])
        for value in range(F.order):
            x = F.GF(value)
            self.assertEqual(F.from_coords(F.coords(x)), x)

    def test_contains_degree(self):
        F = FqField(2, 4)
        self.assertTrue(F.contains_degree(2))
        self.assertFalse(F.contains_degree(3))


class TestCoeffFrobenius(unittest.TestCase):
    """x ↦ x^{p^j}"""

    def setUp(self):
        self.F = FqField(3, 2, [1, 0, 1])
        self.t = self.F.from_coords([0, 1])

    def test_generator_goes_to_negative(self):
        self.assertEqual(coeff_frobenius(self.t, 1, self.F), -self.t)

    def test_full_cycle_is_identity(self):
        for value in range(self.F.order):
            x = self.F.GF(value)
            self.assertEqual(coeff_frobenius(x, self.F.m, self.F), x)

    def test_negative_power(self):
        self.assertEqual(coeff_frobenius(self.t, -1, self.F), coeff_frobenius(self.t, 1, self.F))

    def test_zero(self):
        self.assertEqual(coeff_frobenius(self.F.zero, 3, self.F), self.F.zero)


class TestSeriesInverse(unittest.TestCase):
    """截断级数求逆"""

    def test_geometric_series(self):
        F = FqField(5)
        inv = series_inverse(series(F, [1, 1], 3))
        self.assertEqual(inv.precision, 3)
        self.assertEqual([int(c) for c in inv.dense(0, 3)], [1, 4, 1])

    def test_multiply_back_over_f7(self):
        F = FqField(7)
        s = series(F, [2, 1, 1], 3)
        inv = series_inverse(s)
        self.assertEqual([int(c) for c in inv.dense(0, 3)], [4, 5, 6])
        self.assertTrue((s * inv).agrees_with(TruncatedLaurentSeries.one(F, 3)))

    def test_uniformizer(self):
        F = FqField(5)
        inv = series_inverse(series(F, [1], 6, low=1))
        self.assertEqual(inv.valuation, -1)
        self.assertEqual(int(inv.leading_coefficient()), 1)

    def test_one(self):
        F = FqField(3)
        self.assertEqual(series_inverse(TruncatedLaurentSeries.one(F, 4)), TruncatedLaurentSeries.one(F, 4))

    def test_zero_raises(self):
        F = FqField(5)
        with self.assertRaises(ZeroToPrecision):
            series_inverse(TruncatedLaurentSeries.zero(F, 4))

    def test_precision_never_grows(self):
        F = FqField(5)
        inv = series_inverse(series(F, [0, 0, 1, 1], 8), target_precision=10)
        self.assertEqual(inv.precision, 4)


class TestMixedFields(unittest.TestCase):
    """不同系数域的级数不能直接运算"""

    def setUp(self):
        self.a = series(FqField(3), [1, 1], 5)
        self.b = series(FqField(5), [1, 2], 5)

    def test_add(self):
        with self.assertRaises(InvalidField):
            self.a + self.b

    def test_mul(self):
        with self.assertRaises(InvalidField):
            self.a * self.b

    def test_same_field_still_works(self):
        c = series(FqField(3), [2], 5)
        self.assertEqual(int((self.a * c).coefficient(1)), 2)


class TestSubstituteUp(unittest.TestCase):

    def test_exponents_scale(self):
        F = FqField(5)
        out = substitute_u_p(series(F, [0, 1, 3], 4))
        self.assertEqual(out.precision, 20)
        self.assertEqual(out.valuation, 5)
        self.assertEqual(int(out.coefficient(10)), 3)
        self.assertEqual(int(out.coefficient(6)), 0)

    def test_one(self):
        F = FqField(3)
        self.assertTrue(substitute_u_p(TruncatedLaurentSeries.one(F, 2)).agrees_with(
            TruncatedLaurentSeries.one(F, 6)))


class TestFrobOrbitIndex:
    """嵌入下标的循环与限制"""

    def test_succ_wraps(self):
        assert FrobOrbitIndex(3, 2).succ().index == 0
        assert FrobOrbitIndex(3, 0).pred().index == 2

    def test_restrict_and_extensions(self):
        theta = FrobOrbitIndex(6, 5)
        assert theta.restrict(2).index == 1
        assert [e.index for e in FrobOrbitIndex(2, 1).extensions(6)] == [1, 3, 5]

    def test_restrict_requires_divisor(self):
        with pytest.raises(InvalidField):
            FrobOrbitIndex(6, 1).restrict(4)


@settings(max_examples=50, deadline=None)
@given(
    coeffs=st.lists(st.integers(0, 4), min_size=1, max_size=6),
    precision=st.integers(2, 8),
)
def test_inverse_multiplies_to_one(coeffs, precision):
    F = FqField(5)
    coeffs = [1 + coeffs[0] % 4] + coeffs[1:]
    s = series(F, coeffs, precision)
    prod = s * series_inverse(s)
    assert prod.agrees_with(TruncatedLaurentSeries.one(F, prod.precision))


@settings(max_examples=30, deadline=None)
@given(a=st.lists(st.integers(0, 2), max_size=4), b=st.lists(st.integers(0, 2), max_size=4))
def test_substitution_is_multiplicative(a, b):
    F = FqField(3)
    x, y = series(F, a, 5), series(F, b, 5)
    left = substitute_u_p(x * y)
    right = substitute_u_p(x) * substitute_u_p(y)
    assert (left - right).is_zero()
