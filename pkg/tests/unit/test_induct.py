"""
非分歧诱导、限制与秩一模的单元测试
"""
import unittest

import numpy as np
import pytest

from src.core.algebra import FqField
from src.core.bkmod import BKModule, is_strongly_divisible, twist_unramified, weights
from src.core.errors import IncompatibleDegrees, NotRankOne, ZeroScalar
from src.core.induct import (
    RankOneData,
    UnramifiedExtension,
    character_of_rank_one,
    induce,
    rank_one_module,
    rank_one_normal_form,
    restrict,
    unramified_twist_character,
)
from src.core.lattices import SeriesMatrix
from src.utils.corpus import field_for, random_module


class TestUnramifiedExtension(unittest.TestCase):

    def test_requires_divisor(self):
        with self.assertRaises(IncompatibleDegrees):
            UnramifiedExtension(2, 3)

    def test_degree(self):
        self.assertEqual(UnramifiedExtension(2, 6).degree, 3)


class TestRestrictInduce(unittest.TestCase):
    """f^* 与 f_*"""

    def setUp(self):
        self.F = FqField(3, 2)

    def test_restrict_identity_extension(self):
        M, _ = random_module(np.random.default_rng(3), self.F, 2, 2, 3)
        R = restrict(UnramifiedExtension(2, 2), M)
        self.assertTrue(all(A.equals(B) for A, B in zip(M.frob, R.frob)))

    def test_restrict_copies_components(self):
        A = SeriesMatrix.from_polynomials(self.F, [[[0, 1], [1]], [[], [0, 0, 1]]], 10)
        M = BKModule.from_matrices(self.F, [A])
        R = restrict(UnramifiedExtension(1, 2), M)
        self.assertEqual(R.f, 2)
        self.assertEqual(weights(R).as_lists(), [list(weights(M)[0])] * 2)

    def test_induce_rank_one(self):
        N = rank_one_module(self.F, RankOneData(self.F, 1, (1, 3)))
        M = induce(UnramifiedExtension(1, 2), N)
        self.assertEqual((M.f, M.rank), (1, 2))
        self.assertEqual(weights(M).as_lists(), [[1, 3]])

    def test_induce_keeps_weights(self):
        F = FqField(2, 4)
        M, known = random_module(np.random.default_rng(5), F, 4, 1, 2)
        out = induce(UnramifiedExtension(2, 4), M)
        expected = [sorted(known[s] + known[s + 2]) for s in range(2)]
        self.assertEqual(weights(out).as_lists(), expected)

    def test_induce_wrong_f(self):
        N = rank_one_module(self.F, RankOneData(self.F, 1, (1,)))
        with self.assertRaises(IncompatibleDegrees):
            induce(UnramifiedExtension(1, 2), N)


class TestRankOne(unittest.TestCase):
    """秩一正规形与特征"""

    def test_normal_form_of_monomials(self):
        F = FqField(5, 2)
        data = RankOneData(F, 1, (2, 0))
        self.assertEqual(rank_one_normal_form(rank_one_module(F, data)), data)

    def test_normal_form_with_scalar(self):
        F = FqField(5)
        M = BKModule.from_polynomials(F, [[[[0, 0, 3]]]])
        nf = rank_one_normal_form(M)
        self.assertEqual((nf.x, nf.exponents), (3, (2,)))

    def test_normal_form_rejects_rank_two(self):
        with self.assertRaises(NotRankOne):
            rank_one_normal_form(BKModule.identity(FqField(5), 1, 2))

    def test_zero_scalar(self):
        with self.assertRaises(ZeroScalar):
            RankOneData(FqField(5), 0, (1,))

    def test_twist_removes_scalar(self):
        F = FqField(5)
        M = rank_one_module(F, RankOneData(F, 3, (2,)))
        nf = rank_one_normal_form(twist_unramified(M, 3))
        self.assertEqual((nf.x, nf.exponents), (1, (2,)))

    def test_trivial_character(self):
        chi = character_of_rank_one(RankOneData(FqField(5, 3), 1, (0, 0, 0)))
        self.assertEqual(chi.exponent, 0)

    def test_level_one_character(self):
        chi = character_of_rank_one(RankOneData(FqField(5), 1, (1,)))
        self.assertEqual((chi.level, chi.exponent), (1, 1))

    def test_basepoint_shift(self):
        F = FqField(3, 2)
        a, b = 2, 1
        chi = character_of_rank_one(RankOneData(F, 1, (a, b)))
        self.assertEqual(chi.exponent, (a + 3 * b) % 8)
        shifted = character_of_rank_one(RankOneData(F, 1, (b, a)))
        self.assertEqual(chi.rebased(1).exponent, shifted.exponent)

    def test_twist_character(self):
        F = FqField(5)
        chi = character_of_rank_one(RankOneData(F, 2, (1,)))
        twisted = unramified_twist_character(chi, 2, F)
        self.assertEqual((twisted.exponent, twisted.unramified), (1, 1))


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("r", [0, 1, 2, 3, 5, 6])
def test_rank_one_sd_iff_exponent_in_range(p, r):
    F = FqField(p)
    M = rank_one_module(F, RankOneData(F, 1, (r,)))
    assert weights(M).as_lists() == [[r]]
    assert is_strongly_divisible(M).sd == (0 <= r <= p)
