"""
配置加载模块
"""
import os
from dotenv import load_dotenv

# 加载 .env 文件
load_dotenv()

# 计算精度配置（为空时按 N₀ = n·p + p + 2 计算）
BK_DEFAULT_PRECISION = os.getenv("BK_DEFAULT_PRECISION")

# Inert 枚举预算
BK_BOX_BUDGET = os.getenv("BK_BOX_BUDGET", "100000000")

# 自检配置
BK_SEED = os.getenv("BK_SEED", "0")
BK_TRIALS = os.getenv("BK_TRIALS", "200")

# 日志级别
BK_LOG_LEVEL = os.getenv("BK_LOG_LEVEL", "INFO")


def _as_int(value, default=None):
    if value is None or value == "":
        return default
    return int(value)


def get_default_precision():
    """返回环境变量覆盖的默认精度，未设置时返回 None"""
    return _as_int(BK_DEFAULT_PRECISION)


def get_box_budget() -> int:
    """返回 Inert 枚举的候选向量预算"""
    return _as_int(BK_BOX_BUDGET, 10 ** 8)


def get_seed() -> int:
    """返回自检默认随机种子"""
    return _as_int(BK_SEED, 0)


def get_trials() -> int:
    """返回自检默认试验次数"""
    return _as_int(BK_TRIALS, 200)


def validate_config():
    """验证配置是否合法"""
    checks = {
        "BK_DEFAULT_PRECISION": (BK_DEFAULT_PRECISION, True),
        "BK_BOX_BUDGET": (BK_BOX_BUDGET, False),
        "BK_SEED": (BK_SEED, False),
        "BK_TRIALS": (BK_TRIALS, False),
    }

    invalid_vars = []
    for name, (value, optional) in checks.items():
        if value is None or value == "":
            if not optional:
                invalid_vars.append(name)
            continue
        try:
            number = int(value)
        except ValueError:
            invalid_vars.append(name)
            continue
        if number < 0 or (name == "BK_BOX_BUDGET" and number == 0):
            invalid_vars.append(name)

    if BK_LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        invalid_vars.append("BK_LOG_LEVEL")

    if invalid_vars:
        raise ValueError(f"环境变量取值非法: {', '.join(invalid_vars)}")
