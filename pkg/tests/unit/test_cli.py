"""
命令行入口测试
"""
import json
import os

import pytest

from src.cli import main

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))), "fixtures")


def fx(name):
    return os.path.join(FIXTURES, name)


def run_json(capsys, argv):
    code = main(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


def test_weights_identity(capsys):
    code, out = run_json(capsys, ["weights", fx("identity.json")])
    assert code == 0
    assert out["weights"] == [[0, 0], [0, 0]]
    assert out["agree"] is True


def test_sd_check_at_bound(capsys):
    code, out = run_json(capsys, ["sd-check", fx("rank_one_r_p.json")])
    assert code == 0
    assert out["sd"] is True
    assert out["certificate"][0]["degrees"] == [5]


def test_sd_check_past_bound(capsys):
    code, out = run_json(capsys, ["sd-check", fx("rank_one_r_p1.json")])
    assert code == 0
    assert out["sd"] is False
    assert out["reason"] == "weight out of range"
    assert out["certificate"] is None


def test_sd_check_text_output(capsys):
    assert main(["sd-check", fx("worked_example_module.json")]) == 0
    assert "✅" in capsys.readouterr().out


def test_malformed_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"field\": ", encoding="utf-8")
    assert main(["weights", str(bad)]) == 2


def test_schema_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"field": {"p": 5}, "f": 1, "rank": 1}), encoding="utf-8")
    assert main(["weights", str(bad)]) == 2


def test_missing_file(tmp_path):
    assert main(["weights", str(tmp_path / "none.json")]) == 2


def test_inert_member_excluded(capsys):
    code, out = run_json(capsys, ["inert", fx("cyclotomic_square.json"), "member", "--weights", "[[-6, 0]]"])
    assert code == 0
    assert out["member"] is False
    assert out["witness"] is None


def test_inert_member_included(capsys):
    code, out = run_json(capsys, ["inert", fx("cyclotomic_square.json"), "member", "--weights", "[[-1, -1]]"])
    assert code == 0
    assert out["member"] is True


def test_inert_member_needs_weights():
    assert main(["inert", fx("cyclotomic_square.json"), "member"]) == 2


def test_inert_enumerate_trivial(capsys):
    code, out = run_json(capsys, ["inert", fx("trivial_character.json"), "enumerate", "--box", "0", "5"])
    assert code == 0
    assert out["box"] == [0, 5]
    assert out["elements"] == [[[0]], [[4]]]


def test_inverted_box():
    assert main(["inert", fx("trivial_character.json"), "enumerate", "--box", "5", "0"]) == 2


def test_rank_one(capsys):
    code, out = run_json(capsys, ["rank-one", fx("rank_one_data.json")])
    assert code == 0
    assert out["weights"] == [[1], [3]]
    assert out["character"]["exponent"] == 1 + 5 * 3
    assert out["sd"] is True


def test_restrict_then_weights(capsys, tmp_path):
    src = tmp_path / "line.json"
    src.write_text(json.dumps({"field": {"p": 5, "m": 2}, "f": 1, "rank": 1, "frob": [[[[0, 0, 0, 0, 0, 1]]]]}),
                   encoding="utf-8")
    code, out = run_json(capsys, ["restrict", str(src), "--to", "2"])
    assert code == 0
    assert out["f"] == 2
    path = tmp_path / "restricted.json"
    path.write_text(json.dumps(out), encoding="utf-8")
    code, out = run_json(capsys, ["weights", str(path)])
    assert out["weights"] == [[5], [5]]


def test_verify_example_default(capsys):
    code, out = run_json(capsys, ["verify-example"])
    assert code == 0
    assert out["ok"] is True
    assert out["instances"][0]["weights"] == [0, 1, 2, 3, 5]


def test_verify_example_input(capsys):
    code, out = run_json(capsys, ["verify-example", "--input", fx("worked_example_submodule.json")])
    assert code == 0
    assert out["explicit"] and out["abstract"]
    assert out["weights"] == [[0, 1, 2, 3, 5]]
    assert out["in_inert"] is True


@pytest.mark.parametrize("trials", ["0", "1"])
def test_selftest(capsys, trials):
    code, out = run_json(capsys, ["selftest", "--seed", "7", "--trials", trials])
    assert code == 0
    assert out["ok"] is True
    assert out["trials"] == int(trials)
