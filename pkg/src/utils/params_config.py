"""
集中管理所有的算法参数配置
"""
from typing import Tuple

from .config import get_default_precision, get_box_budget

# ==============================================================================
# 有限域与级数参数
# ==============================================================================
ALGEBRA_CONFIG = {
    # 默认模多项式表覆盖的范围（Conway 多项式）
    "TABLE_MAX_P": 13,
    "TABLE_MAX_M": 6,

    # 默认精度 N₀ = n·p + p + PRECISION_BUFFER
    "PRECISION_BUFFER": 2,
}

# ==============================================================================
# 格与滤过参数
# ==============================================================================
LATTICE_CONFIG = {
    # 有限窗口在导子之上额外保留的次数
    "WINDOW_MARGIN": 2,

    # BK 用法中 is_strict 的默认次数范围 [-1, p+2]
    "STRICT_RANGE_LOW": -1,
    "STRICT_RANGE_HIGH_OFFSET": 2,
}

# ==============================================================================
# Inert 枚举参数
# ==============================================================================
INERT_CONFIG = {
    # 候选向量预算
    "DEFAULT_BOX_BUDGET": 10 ** 8,

    # 默认盒子为 [0, p]
    "DEFAULT_BOX_LOW": 0,
}

# ==============================================================================
# 自检参数
# ==============================================================================
SELFTEST_CONFIG = {
    "PRIMES": (2, 3, 5),
    "MAX_RANK": 4,
    "MAX_F": 3,
    "INDUCED_PRIMES": (3, 5),
    "INDUCED_MAX_F": 4,
    "BASE_CHANGES_PER_TRIAL": 2,
    # 有界穷举的规模上限
    "ENUMERATE_MAX_FIELD_SIZE": 9,
    "ENUMERATE_MAX_F": 4,
    # 稳定直线搜索的候选上限
    "STABLE_LINE_BUDGET": 10 ** 4,
}

# ==============================================================================
# 命令行退出码
# ==============================================================================
CLI_CONFIG = {
    "EXIT_CODES": {
        "ok": 0,
        "violation": 1,
        "input_error": 2,
        "precision_error": 3,
    },
    "COMMANDS": (
        "weights", "sd-check", "snf", "induce", "restrict",
        "rank-one", "inert", "verify-example", "selftest",
    ),
}


def default_precision(rank: int, p: int) -> int:
    """获取秩为 rank 的模的默认工作精度"""
    override = get_default_precision()
    if override is not None:
        return override
    return rank * p + p + ALGEBRA_CONFIG["PRECISION_BUFFER"]


def default_box(p: int) -> Tuple[int, int]:
    """获取默认枚举盒子 [0, p]"""
    return (INERT_CONFIG["DEFAULT_BOX_LOW"], p)


def default_budget() -> int:
    """获取枚举预算，环境变量优先"""
    budget = get_box_budget()
    return budget if budget else INERT_CONFIG["DEFAULT_BOX_BUDGET"]


def get_exit_code(name: str) -> int:
    """获取命令行退出码"""
    return CLI_CONFIG["EXIT_CODES"][name]
