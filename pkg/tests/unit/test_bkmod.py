"""
Breuil–Kisin 模：权重、强可除性与正合列的单元测试
"""
import unittest

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.algebra import FqField
from src.core.bkmod import (
    BKModule,
    SubmoduleSpec,
    check_exact_sd,
    direct_sum,
    filtration_of_M,
    find_stable_lines,
    is_strongly_divisible,
    sub_quotient,
    twist_unramified,
    weights,
    weights_via_filtration,
)
from src.core.errors import DimensionMismatch, IncompatibleDegrees, NotStable, ZeroScalar
from src.core.lattices import Lattice, SeriesMatrix
from src.utils.corpus import field_for, random_base_change, random_exact_sequence, random_module
from src.utils.params_config import default_precision


def rank_one(field, exponent, f=1, precision=None):
    return BKModule.from_polynomials(field, [[[[0] * exponent + [1]]]] * f, precision)


def example_module(precision=None):
    """五维例子在 p = 5、n = 2、x = 3 时提取出的模"""
    rows = [
        [[], [], [], [], [0, 0, 0, 1]],
        [[0, 0, 1], [], [], [], []],
        [[], [1], [], [], []],
        [[0, 4], [], [0, 1], [], []],
        [[], [1], [], [0, 0, 0, 0, 0, 1], []],
    ]
    return BKModule.from_polynomials(FqField(5), [rows], precision)


class TestWeights(unittest.TestCase):
    """两种权重计算"""

    def test_identity(self):
        M = BKModule.identity(FqField(5, 2), 2, 3)
        self.assertEqual(weights(M).as_lists(), [[0, 0, 0], [0, 0, 0]])
        self.assertEqual(weights_via_filtration(M), weights(M))

    def test_rank_one_per_component(self):
        F = FqField(3, 2)
        M = BKModule.from_polynomials(F, [[[[0, 1]]], [[[0, 0, 0, 2]]]])
        self.assertEqual(weights(M).as_lists(), [[1], [3]])
        self.assertEqual(weights_via_filtration(M).as_lists(), [[1], [3]])

    def test_example_module(self):
        M = example_module()
        self.assertEqual(weights(M).as_lists(), [[0, 1, 2, 3, 5]])
        self.assertEqual(weights_via_filtration(M), weights(M))
        self.assertEqual(weights(M).sums(), (11,))

    def test_field_must_contain_f(self):
        with self.assertRaises(IncompatibleDegrees):
            BKModule.identity(FqField(5, 2), 3, 1)

    def test_shape_mismatch(self):
        F = FqField(5)
        A = SeriesMatrix.identity(F, 2, 8)
        with self.assertRaises(DimensionMismatch):
            BKModule(F, 1, 3, (A,), 8)


class TestStrongDivisibility(unittest.TestCase):

    def setUp(self):
        self.F = FqField(5)

    def test_rank_one_at_bound(self):
        verdict = is_strongly_divisible(rank_one(self.F, 5))
        self.assertTrue(verdict.sd)
        self.assertTrue(verdict.certificate_found)
        self.assertEqual(verdict.certificate[0].degrees, (5,))

    def test_rank_one_past_bound(self):
        verdict = is_strongly_divisible(rank_one(self.F, 6))
        self.assertFalse(verdict.sd)
        self.assertTrue(verdict.filtered_iso)
        self.assertFalse(verdict.weights_in_range)
        self.assertEqual(verdict.reason, "weight out of range")
        self.assertIsNone(verdict.certificate)

    def test_past_bound_is_logged(self):
        with self.assertLogs("src.core.bkmod", level="INFO") as logs:
            is_strongly_divisible(rank_one(self.F, 6))
        self.assertTrue(any("超出 [0, 5]" in line for line in logs.output))

    def test_identity(self):
        self.assertTrue(is_strongly_divisible(BKModule.identity(self.F, 1, 3)).sd)

    def test_example_module(self):
        self.assertTrue(is_strongly_divisible(example_module()).sd)

    def test_non_split_extension(self):
        M = BKModule.from_polynomials(self.F, [[[[0, 1], [1]], [[], [0, 1]]]])
        verdict = is_strongly_divisible(M)
        self.assertEqual(weights(M).as_lists(), [[0, 2]])
        self.assertFalse(verdict.sd)
        self.assertFalse(verdict.filtered_iso)

    def test_filtration_degree_zero_is_full(self):
        M = example_module()
        (L,) = filtration_of_M(M, 0)
        self.assertTrue(L.same_as(Lattice.standard(self.F, 5, M.precision)))


class TestSubQuotient(unittest.TestCase):
    """子模、商与严格性"""

    def setUp(self):
        self.F = FqField(5)
        self.first = lambda n, prec: SeriesMatrix.identity(self.F, n, prec).select(cols=[0])

    def test_block_extraction(self):
        N = BKModule.from_polynomials(self.F, [[[[0, 1], [1]], [[], [0, 1]]]])
        sq = sub_quotient(N, SubmoduleSpec((self.first(2, N.precision),)))
        self.assertEqual(weights(sq.sub).as_lists(), [[1]])
        self.assertEqual(weights(sq.quotient).as_lists(), [[1]])
        report = check_exact_sd(sq.sub, sq.extension, sq.quotient)
        self.assertTrue(report.sub_sd)
        self.assertTrue(report.quot_sd)
        self.assertFalse(report.n_sd)
        self.assertFalse(report.strict)
        self.assertFalse(report.weights_additive)

    def test_split_sum_is_strict(self):
        N = direct_sum(rank_one(self.F, 1), rank_one(self.F, 4))
        sq = sub_quotient(N, SubmoduleSpec((self.first(2, N.precision),)))
        report = check_exact_sd(sq.sub, sq.extension, sq.quotient)
        self.assertTrue(report.n_sd)
        self.assertTrue(report.strict)
        self.assertTrue(report.weights_additive)

    def test_whole_module(self):
        N = BKModule.identity(self.F, 1, 2)
        spec = SubmoduleSpec((SeriesMatrix.identity(self.F, 2, N.precision),))
        sq = sub_quotient(N, spec)
        self.assertEqual(sq.quotient.rank, 0)

    def test_unstable_line(self):
        # φ(e_1) = u e_0 + ...，第二个坐标生成的直线不稳定
        N = BKModule.from_polynomials(self.F, [[[[0, 1], [1]], [[], [0, 1]]]])
        second = SeriesMatrix.identity(self.F, 2, N.precision).select(cols=[1])
        with self.assertRaises(NotStable):
            sub_quotient(N, SubmoduleSpec((second,)))


class TestTwistAndLines(unittest.TestCase):

    def test_trivial_twist(self):
        M = example_module()
        T = twist_unramified(M, 1)
        self.assertTrue(all(A.equals(B) for A, B in zip(M.frob, T.frob)))

    def test_zero_twist(self):
        with self.assertRaises(ZeroScalar):
            twist_unramified(example_module(), 0)

    def test_stable_lines_of_diagonal(self):
        F = FqField(3)
        M = BKModule.from_matrices(F, [SeriesMatrix.monomial_diagonal(F, [1, 2], 10)])
        self.assertEqual(len(find_stable_lines(M)), 2)


@pytest.mark.parametrize("p,f,n", [(2, 2, 2), (3, 1, 3), (5, 3, 2), (3, 3, 4)])
def test_dual_weights_on_random_modules(p, f, n):
    rng = np.random.default_rng(1000 * p + 10 * f + n)
    for _ in range(3):
        M, known = random_module(rng, field_for(p, f), f, n, p + 1)
        assert weights(M) == known
        assert weights_via_filtration(M) == known


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_base_change_invariance(seed):
    rng = np.random.default_rng(seed)
    M, _ = random_module(rng, field_for(3, 2), 2, 2, 3)
    verdict = is_strongly_divisible(M).sd
    M2 = random_base_change(rng, M)
    assert weights(M2) == weights(M)
    assert is_strongly_divisible(M2).sd == verdict


@pytest.mark.parametrize("seed", range(6))
def test_exact_sequences(seed):
    rng = np.random.default_rng(seed)
    seq = random_exact_sequence(rng, field_for(3), 1, 1, 1, 3)
    sq = sub_quotient(seq.extension, seq.spec)
    assert weights(sq.sub) == weights(seq.sub)
    assert weights(sq.quotient) == weights(seq.quotient)
    report = check_exact_sd(sq.sub, sq.extension, sq.quotient)
    if report.n_sd:
        assert report.sub_sd and report.quot_sd and report.weights_additive
    if report.sub_sd and report.quot_sd:
        assert report.n_sd == report.strict


@pytest.mark.parametrize("p,f,n", [(2, 2, 3), (3, 1, 4), (5, 3, 2)])
def test_doubled_precision_keeps_verdicts(p, f, n):
    base = default_precision(n, p)
    for seed in range(3):
        M1, _ = random_module(np.random.default_rng(seed), field_for(p, f), f, n, p + 1, precision=base)
        M2, _ = random_module(np.random.default_rng(seed), field_for(p, f), f, n, p + 1, precision=2 * base)
        assert M2.precision == 2 * M1.precision
        assert weights(M1) == weights(M2)
        assert weights_via_filtration(M2) == weights(M1)
        v1, v2 = is_strongly_divisible(M1), is_strongly_divisible(M2)
        assert (v1.sd, v1.filtered_iso, v1.weights_in_range) == (v2.sd, v2.filtered_iso, v2.weights_in_range)
