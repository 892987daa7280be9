"""
大规模验收：例子族、对偶权重、基变换、正合列、秩一特征与诱导子模
"""
import itertools
import json
import os

import numpy as np
import pytest

from src.cli import main
from src.core.bkmod import check_exact_sd, is_strongly_divisible, sub_quotient, weights, weights_via_filtration
from src.core.induct import RankOneData, character_of_rank_one, rank_one_module
from src.core.inert import InertDescription, TameCharacter, WeightTuple, description_from_character, inert_member
from src.core.sdinduced import (
    adapted_weights,
    choose_lambda,
    compare_sd_routes,
    example_submodule,
    inertial_data,
)
from src.utils.corpus import (
    field_for,
    random_base_change,
    random_exact_sequence,
    random_irreducible_ambient,
    random_module,
    random_sd_submodule,
)
from src.utils.serialization import load_json, parse_module

pytestmark = pytest.mark.slow

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))), "fixtures")

EXAMPLE_GRID = [(p, n, x) for p in (3, 5, 7) for n in range(1, p + 1) for x in range(p + 1)]


def test_example_family_via_cli(capsys):
    assert main(["verify-example", "--all", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ok"] is True
    assert len(out["instances"]) == len(EXAMPLE_GRID) == 98
    assert all(row["explicit"] and row["abstract"] for row in out["instances"])


def test_example_family_at_doubled_precision():
    for p, n, x in EXAMPLE_GRID:
        base = example_submodule(p, n, x)
        M = example_submodule(p, n, x, 2 * base.ambient.precision)
        cmp = compare_sd_routes(M)
        assert cmp.explicit and cmp.abstract, (p, n, x)
        assert list(weights(M.as_bk_module())[0]) == sorted([x, 0, n - 1, n, p]), (p, n, x)


def test_dual_weights_on_many_modules():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        p = int(rng.choice([2, 3, 5]))
        f = int(rng.integers(1, 4))
        n = int(rng.integers(1, 5))
        M, known = random_module(rng, field_for(p, f), f, n, p + 1)
        assert weights(M) == known
        assert weights_via_filtration(M) == known
        assert known.sums() == tuple(A.det_valuation() for A in M.frob)


@pytest.mark.parametrize("name", [
    "identity.json", "rank_one_r_p.json", "rank_one_r_p1.json", "worked_example_module.json",
])
def test_base_change_on_fixtures(name):
    M = parse_module(load_json(os.path.join(FIXTURES, name)))
    expected_weights, expected_sd = weights(M), is_strongly_divisible(M).sd
    rng = np.random.default_rng(len(name))
    for _ in range(100):
        M2 = random_base_change(rng, M)
        assert weights(M2) == expected_weights
        assert is_strongly_divisible(M2).sd == expected_sd


def test_exact_sequences_at_scale():
    rng = np.random.default_rng(7)
    n_sd, ends_sd = 0, 0
    for _ in range(3000):
        if n_sd >= 300 and ends_sd >= 100:
            break
        p = int(rng.choice([3, 5]))
        f = int(rng.integers(1, 3))
        seq = random_exact_sequence(rng, field_for(p, f), f, 1, int(rng.integers(1, 3)), p)
        sq = sub_quotient(seq.extension, seq.spec)
        report = check_exact_sd(sq.sub, sq.extension, sq.quotient)
        if report.n_sd:
            n_sd += 1
            assert report.sub_sd and report.quot_sd and report.weights_additive
        if report.sub_sd and report.quot_sd:
            ends_sd += 1
            assert report.n_sd == report.strict
    assert n_sd >= 300
    assert ends_sd >= 100


@pytest.mark.parametrize("p", [3, 5])
def test_rank_one_exhaustive(p):
    for f in range(1, 5):
        field = field_for(p, f)
        for exps in itertools.product(range(p + 1), repeat=f):
            data = RankOneData(field, 1, exps)
            M = rank_one_module(field, data)
            w = weights(M)
            assert w.as_lists() == [[r] for r in exps]
            desc = description_from_character(character_of_rank_one(data), f)
            assert inert_member(desc, WeightTuple(w.values)).member, (p, exps)


def test_cyclotomic_square_claim():
    chi = TameCharacter(5, 1, 3)
    desc = InertDescription(5, 1, (chi, chi))
    assert not inert_member(desc, WeightTuple(((-6, 0),))).member
    assert inert_member(desc, WeightTuple(((-1, -1),))).member


def test_induced_submodules_at_scale():
    rng = np.random.default_rng(11)
    shapes = [(p, f_k, f_l) for p in (3, 5) for f_l in (2, 3, 4) for f_k in range(1, f_l) if f_l % f_k == 0]
    for i in range(200):
        p, f_k, f_l = shapes[i % len(shapes)]
        ambient = random_irreducible_ambient(rng, p, f_k, f_l)
        M = random_sd_submodule(rng, ambient)
        cmp = compare_sd_routes(M)
        assert cmp.explicit and cmp.abstract, M
        choice = choose_lambda(M)
        assert adapted_weights(M, choice.x_set) == weights(M.as_bk_module())
        data = inertial_data(M)
        assert data.consistent
        assert inert_member(data.description, WeightTuple(data.weights.values)).member
