"""
自检：在随机实例上核对各模块之间的不变量
"""
import logging
from dataclasses import dataclass, field as dc_field
from typing import Callable, Dict, List, Optional

import numpy as np

from .bkmod import (
    check_exact_sd,
    is_strongly_divisible,
    sub_quotient,
    weights,
    weights_via_filtration,
)
from .errors import BKError
from .induct import character_of_rank_one, rank_one_module
from .inert import WeightTuple, description_from_character, inert_member
from .sdinduced import (
    choose_lambda,
    compare_sd_routes,
    inertial_data,
    minimal_delta,
)
from ..utils.corpus import (
    field_for,
    random_base_change,
    random_exact_sequence,
    random_induced_submodule,
    random_irreducible_ambient,
    random_module,
    random_rank_one,
    random_sd_submodule,
)
from ..utils.params_config import SELFTEST_CONFIG

logger = logging.getLogger(__name__)


@dataclass
class CheckCount:
    passed: int = 0
    failed: int = 0
    skipped: int = 0


@dataclass
class SelfTestReport:
    seed: int
    trials: int
    checks: Dict[str, CheckCount] = dc_field(default_factory=dict)
    failures: List[str] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, name: str, outcome: Optional[bool], detail: str = ""):
        count = self.checks.setdefault(name, CheckCount())
        if outcome is None:
            count.skipped += 1
        elif outcome:
            count.passed += 1
        else:
            count.failed += 1
            self.failures.append(f"{name}: {detail}")

    def to_dict(self) -> Dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "ok": self.ok,
            "checks": {
                name: {"passed": c.passed, "failed": c.failed, "skipped": c.skipped}
                for name, c in sorted(self.checks.items())
            },
            "failures": list(self.failures),
        }

    def lines(self) -> List[str]:
        out = [f"自检 seed={self.seed} trials={self.trials}"]
        for name, c in sorted(self.checks.items()):
            mark = "✅" if c.failed == 0 else "❌"
            out.append(f"{mark} {name}: 通过 {c.passed}，失败 {c.failed}，跳过 {c.skipped}")
        for line in self.failures:
            out.append(f"   - {line}")
        return out


# ==============================================================================
# 单项检查
# ==============================================================================
def _check_weights(rng: np.random.Generator, report: SelfTestReport):
    p = int(rng.choice(SELFTEST_CONFIG["PRIMES"]))
    f = int(rng.integers(1, SELFTEST_CONFIG["MAX_F"] + 1))
    n = int(rng.integers(1, SELFTEST_CONFIG["MAX_RANK"] + 1))
    M, known = random_module(rng, field_for(p, f), f, n, p + 1)
    direct, graded = weights(M), weights_via_filtration(M)
    report.record("weights_dual", direct == graded == known,
                  f"p={p} f={f} n={n}: {direct.as_lists()} / {graded.as_lists()} / {known.as_lists()}")
    dets = tuple(A.det_valuation() for A in M.frob)
    report.record("weights_det", graded.sums() == dets, f"{graded.sums()} != {dets}")

    verdict = is_strongly_divisible(M).sd
    for _ in range(SELFTEST_CONFIG["BASE_CHANGES_PER_TRIAL"]):
        M2 = random_base_change(rng, M)
        same = weights(M2) == direct and is_strongly_divisible(M2).sd == verdict
        report.record("base_change", same, f"p={p} f={f} n={n}")


def _check_exact(rng: np.random.Generator, report: SelfTestReport):
    p = int(rng.choice(SELFTEST_CONFIG["PRIMES"]))
    f = int(rng.integers(1, SELFTEST_CONFIG["MAX_F"] + 1))
    r_sub = int(rng.integers(1, 3))
    r_quot = int(rng.integers(1, 3))
    seq = random_exact_sequence(rng, field_for(p, f), f, r_sub, r_quot, p)
    sq = sub_quotient(seq.extension, seq.spec)
    rep = check_exact_sd(sq.sub, sq.extension, sq.quotient)
    if rep.n_sd:
        report.record("subquotient_sd", rep.sub_sd and rep.quot_sd and rep.weights_additive,
                      f"p={p} f={f}: {rep}")
    else:
        report.record("subquotient_sd", None)
    if rep.sub_sd and rep.quot_sd:
        report.record("strict_iff_sd", rep.n_sd == rep.strict, f"p={p} f={f}: {rep}")
    else:
        report.record("strict_iff_sd", None)


def _check_rank_one(rng: np.random.Generator, report: SelfTestReport):
    p = int(rng.choice(SELFTEST_CONFIG["INDUCED_PRIMES"]))
    f = int(rng.integers(1, SELFTEST_CONFIG["INDUCED_MAX_F"] + 1))
    data = random_rank_one(rng, field_for(p, f), f)
    M = rank_one_module(data.field, data)
    w = weights(M)
    desc = description_from_character(character_of_rank_one(data), f)
    member = inert_member(desc, WeightTuple(w.values)).member
    report.record("rank_one_inert", member, f"p={p} r={data.exponents}")


def _check_induced(rng: np.random.Generator, report: SelfTestReport):
    p = int(rng.choice(SELFTEST_CONFIG["INDUCED_PRIMES"]))
    f_l = int(rng.integers(2, SELFTEST_CONFIG["INDUCED_MAX_F"] + 1))
    divisors = [d for d in range(1, f_l) if f_l % d == 0]
    f_k = int(rng.choice(divisors))
    ambient = random_irreducible_ambient(rng, p, f_k, f_l)
    cmp = compare_sd_routes(random_induced_submodule(rng, ambient))
    report.record("explicit_vs_abstract", cmp.agree, f"{ambient}: {cmp}")

    M = random_sd_submodule(rng, ambient)
    built = compare_sd_routes(M)
    if not (built.explicit and built.abstract):
        report.record("sd_generator", False, f"{M}: {built}")
        return
    report.record("sd_generator", True)
    choice = choose_lambda(M)
    data = inertial_data(M)
    member = inert_member(data.description, WeightTuple(data.weights.values)).member
    report.record("inertial_pipeline", data.consistent and member, f"{M}: λ={choice.basepoint}")
    if p > 2:
        deltas = [minimal_delta(M, theta) for theta in range(f_l)]
        report.record("delta_bound", max(deltas) <= 1, f"{M}: δ={deltas}")


CHECKS: Dict[str, Callable[[np.random.Generator, SelfTestReport], None]] = {
    "weights": _check_weights,
    "exact": _check_exact,
    "rank_one": _check_rank_one,
    "induced": _check_induced,
}


def run_selftest(seed: int, trials: int) -> SelfTestReport:
    """按固定顺序跑 trials 轮全部检查；同一 seed 的报告逐字节相同"""
    rng = np.random.default_rng(seed)
    report = SelfTestReport(seed, trials)
    for t in range(trials):
        for name, check in CHECKS.items():
            try:
                check(rng, report)
            except BKError as e:
                report.record(f"{name}_error", False, f"第 {t} 轮 {type(e).__name__}: {str(e)}")
        if (t + 1) % 50 == 0:
            logger.info(f"自检已完成 {t + 1}/{trials} 轮")
    logger.info(f"自检结束：{len(report.failures)} 项失败")
    return report
