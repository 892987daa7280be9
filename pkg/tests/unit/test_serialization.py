"""
JSON 输入格式的单元测试
"""
import os
import unittest

import pytest
from pydantic import ValidationError

from src.core.bkmod import weights
from src.core.errors import DimensionMismatch
from src.core.inert import TameCharacter
from src.utils.serialization import (
    JobSpec,
    MAX_SAFE_INTEGER,
    dump_description,
    dump_induced,
    dump_json,
    dump_module,
    load_json,
    parse_description,
    parse_induced,
    parse_module,
    parse_rank_one,
    parse_weights,
    validation_message,
)

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))), "fixtures")


def fixture(name):
    return load_json(os.path.join(FIXTURES, name))


class TestParseModule(unittest.TestCase):

    def test_identity(self):
        M = parse_module(fixture("identity.json"))
        self.assertEqual((M.f, M.rank), (2, 2))
        self.assertEqual(M.precision, 2 * 5 + 5 + 2)
        self.assertEqual(weights(M).as_lists(), [[0, 0], [0, 0]])

    def test_example_module(self):
        M = parse_module(fixture("worked_example_module.json"))
        self.assertEqual(weights(M).as_lists(), [[0, 1, 2, 3, 5]])

    def test_round_trip(self):
        M = parse_module(fixture("worked_example_module.json"))
        again = parse_module(dump_module(M))
        self.assertEqual(again.precision, M.precision)
        self.assertTrue(all(A.equals(B) for A, B in zip(M.frob, again.frob)))

    def test_extra_field(self):
        data = fixture("identity.json")
        data["extra"] = 1
        with self.assertRaises(ValidationError):
            parse_module(data)

    def test_frob_count(self):
        data = fixture("identity.json")
        data["f"] = 1
        with self.assertRaises(DimensionMismatch):
            parse_module(data)

    def test_non_square(self):
        data = fixture("identity.json")
        data["frob"][0][0].append([1])
        with self.assertRaises(ValidationError) as ctx:
            parse_module(data)
        self.assertIn("frob", validation_message(ctx.exception))


class TestParseOthers(unittest.TestCase):

    def test_description(self):
        desc = parse_description(fixture("cyclotomic_square.json"))
        self.assertEqual(desc.summands, (TameCharacter(5, 1, 3), TameCharacter(5, 1, 3)))

    def test_decimal_exponent(self):
        data = {"p": 3, "f_k": 1, "summands": [{"f": 1, "exponent": "1"}]}
        self.assertEqual(parse_description(data).summands[0].exponent, 1)

    def test_large_integers_as_strings(self):
        big = MAX_SAFE_INTEGER * 4 + 1
        desc = parse_description({"p": 2, "f_k": 1, "summands": [{"f": 60, "exponent": str(big)}]})
        out = dump_description(desc)
        self.assertIsInstance(out["summands"][0]["exponent"], str)
        self.assertEqual(parse_description(out).summands, desc.summands)

    def test_weights(self):
        self.assertEqual(parse_weights([[1, 2], [3]]).values, ((1, 2), (3,)))

    def test_rank_one(self):
        data, precision = parse_rank_one(fixture("rank_one_data.json"))
        self.assertEqual((data.x, data.exponents), (2, (1, 3)))
        self.assertIsNone(precision)

    def test_induced(self):
        M = parse_induced(fixture("worked_example_submodule.json"))
        self.assertEqual(weights(M.as_bk_module()).as_lists(), [[0, 1, 2, 3, 5]])
        again = parse_induced(dump_induced(M))
        self.assertTrue(all(a.same_as(b) for a, b in zip(M.lattices, again.lattices)))

    def test_dump_json_keeps_unicode(self):
        self.assertIn("权重", dump_json({"权重": [0, 1]}))


@pytest.mark.parametrize("options", [
    {"box": [5, 0]},
    {"trials": -1},
    {"precision": 0},
])
def test_bad_job_options(options):
    with pytest.raises(ValidationError):
        JobSpec.model_validate({"command": "selftest", "options": options})


def test_unknown_command():
    with pytest.raises(ValidationError):
        JobSpec.model_validate({"command": "compile"})
