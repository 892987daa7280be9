"""
驯顺特征与 Inert(ρ̄) 的单元测试
"""
import unittest

import pytest
from hypothesis import given, settings, strategies as st

from src.core.errors import BoxTooLarge, IncompatibleDegrees, SizeMismatch
from src.core.inert import (
    InertDescription,
    TameCharacter,
    WeightTuple,
    character_conjugates,
    description_from_character,
    inert_enumerate,
    inert_member,
    is_induction_irreducible,
    shift_description,
)


def weight_sets(found):
    return sorted(t.values for t in found)


class TestConjugates(unittest.TestCase):

    def test_trivial(self):
        self.assertEqual(character_conjugates(TameCharacter(5, 2, 0), 1), [0])
        self.assertFalse(is_induction_irreducible(TameCharacter(5, 2, 0), 1))

    def test_distinct_conjugates(self):
        chi = TameCharacter(5, 2, 1)
        self.assertEqual(sorted(character_conjugates(chi, 1)), [1, 5])
        self.assertTrue(is_induction_irreducible(chi, 1))

    def test_same_level(self):
        self.assertTrue(is_induction_irreducible(TameCharacter(3, 3, 0), 3))

    def test_level_must_be_multiple(self):
        with self.assertRaises(IncompatibleDegrees):
            character_conjugates(TameCharacter(3, 3, 1), 2)


class TestEnumerate(unittest.TestCase):
    """盒子内的枚举"""

    def test_trivial_character(self):
        desc = description_from_character(TameCharacter(5, 1, 0), 1)
        self.assertEqual(weight_sets(inert_enumerate(desc, (0, 5))), [((0,),), ((4,),)])

    def test_inverse_cyclotomic(self):
        desc = description_from_character(TameCharacter(5, 1, 1), 1)
        self.assertEqual(weight_sets(inert_enumerate(desc, (0, 5))), [((1,),), ((5,),)])

    def test_empty_description(self):
        desc = InertDescription(5, 1, ())
        self.assertEqual(weight_sets(inert_enumerate(desc, (0, 5))), [((),)])

    def test_level_two(self):
        desc = description_from_character(TameCharacter(3, 2, 1), 1)
        found = weight_sets(inert_enumerate(desc, (0, 3)))
        # a + 3b ≡ 1 (mod 8)
        expected = sorted({
            (tuple(sorted((a, b))),) for a in range(4) for b in range(4) if (a + 3 * b) % 8 == 1
        })
        self.assertEqual(found, expected)

    def test_budget(self):
        desc = description_from_character(TameCharacter(5, 4, 7), 1)
        with self.assertRaises(BoxTooLarge):
            inert_enumerate(desc, (0, 50), budget=100)


class TestMember(unittest.TestCase):
    """两个分圆特征之和"""

    def setUp(self):
        chi = TameCharacter(5, 1, 3)
        self.desc = InertDescription(5, 1, (chi, chi))

    def test_excluded_weights(self):
        self.assertFalse(inert_member(self.desc, WeightTuple(((-6, 0),))).member)

    def test_included_weights(self):
        res = inert_member(self.desc, WeightTuple(((-1, -1),)))
        self.assertTrue(res.member)
        self.assertEqual(res.witness, ((-1,), (-1,)))

    def test_box_excludes(self):
        self.assertFalse(inert_member(self.desc, WeightTuple(((-1, -1),)), box=(0, 5)).member)

    def test_shape(self):
        with self.assertRaises(SizeMismatch):
            inert_member(self.desc, WeightTuple(((3,),)))


def test_enumerate_then_member():
    chi = TameCharacter(3, 2, 5)
    desc = InertDescription(3, 1, (chi, TameCharacter(3, 1, 1)))
    found = inert_enumerate(desc, (0, 3))
    assert found
    for lam in found:
        assert inert_member(desc, lam).member


@pytest.mark.parametrize("c", [-3, 1, 4])
def test_twist_shifts_membership(c):
    desc = description_from_character(TameCharacter(5, 2, 7), 1)
    for lam in inert_enumerate(desc, (0, 5)):
        assert inert_member(shift_description(desc, c), lam.shifted(c)).member


@settings(max_examples=40, deadline=None)
@given(exps=st.lists(st.integers(0, 5), min_size=1, max_size=3))
def test_character_of_weights_is_member(exps):
    p = 5
    e = sum(r * p ** i for i, r in enumerate(exps))
    desc = description_from_character(TameCharacter(p, len(exps), e), 1)
    assert inert_member(desc, WeightTuple((tuple(exps),))).member
