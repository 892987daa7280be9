"""
环境变量配置测试
"""
import pytest

from src.utils import config
from src.utils.params_config import default_box, default_precision, get_exit_code


def test_defaults_are_valid():
    config.validate_config()


@pytest.mark.parametrize("name,value", [
    ("BK_SEED", "-1"),
    ("BK_TRIALS", "abc"),
    ("BK_BOX_BUDGET", "0"),
    ("BK_DEFAULT_PRECISION", "x"),
    ("BK_LOG_LEVEL", "LOUD"),
])
def test_invalid_values(monkeypatch, name, value):
    monkeypatch.setattr(config, name, value)
    with pytest.raises(ValueError) as excinfo:
        config.validate_config()
    assert name in str(excinfo.value)


def test_precision_override(monkeypatch):
    monkeypatch.setattr(config, "BK_DEFAULT_PRECISION", None)
    assert default_precision(2, 5) == 17
    monkeypatch.setattr(config, "BK_DEFAULT_PRECISION", "40")
    assert default_precision(2, 5) == 40


def test_box_and_exit_codes():
    assert default_box(7) == (0, 7)
    assert [get_exit_code(n) for n in ("ok", "violation", "input_error", "precision_error")] == [0, 1, 2, 3]
