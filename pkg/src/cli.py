"""
命令行入口：读取 JSON 输入，调用各模块并输出结果
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Tuple

from pydantic import ValidationError

from .core.bkmod import is_strongly_divisible, weights, weights_via_filtration
from .core.errors import BKError, InsufficientPrecision, ZeroToPrecision
from .core.induct import (
    UnramifiedExtension,
    character_of_rank_one,
    induce,
    rank_one_module,
    restrict,
)
from .core.inert import WeightTuple, inert_enumerate, inert_member
from .core.lattices import smith_exponents
from .core.sdinduced import compare_sd_routes, example_submodule, inertial_data
from .core.selftest import run_selftest
from .utils.config import BK_LOG_LEVEL, get_seed, get_trials, validate_config
from .utils.params_config import CLI_CONFIG, default_box, get_exit_code
from .utils.serialization import (
    JobOptions,
    JobSpec,
    dump_json,
    dump_matrix,
    dump_module,
    load_json,
    parse_description,
    parse_induced,
    parse_matrix,
    parse_module,
    parse_rank_one,
    parse_weights,
    validation_message,
)

logger = logging.getLogger(__name__)


class PropertyViolation(Exception):
    """结果与预期不符（退出码 1）"""


# ==============================================================================
# 参数解析
# ==============================================================================
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None, help="覆盖默认工作精度 N₀")
    common.add_argument("--box", type=int, nargs=2, default=None, metavar=("LO", "HI"),
                        help="Inert 枚举的闭区间盒子，默认 [0, p]")
    common.add_argument("--seed", type=int, default=None, help="随机种子")
    common.add_argument("--trials", type=int, default=None, help="自检轮数")
    common.add_argument("--json", action="store_true", help="以 JSON 输出")

    ap = argparse.ArgumentParser(prog="bkcheck", description="p-挠 Breuil–Kisin 模与惯性权重计算")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weights", parents=[common], help="计算各嵌入的权重多重集")
    p.add_argument("module", help="模的 JSON 文件")

    p = sub.add_parser("sd-check", parents=[common], help="判定强可除性并给出适配基证书")
    p.add_argument("module", help="模的 JSON 文件")

    p = sub.add_parser("snf", parents=[common], help="矩阵的初等因子指数")
    p.add_argument("matrix", help="矩阵的 JSON 文件")

    p = sub.add_parser("induce", parents=[common], help="沿非分歧扩张诱导 f_*N")
    p.add_argument("module", help="l 上模的 JSON 文件")
    p.add_argument("--to", type=int, required=True, dest="target", help="k 的次数 f_k")

    p = sub.add_parser("restrict", parents=[common], help="沿非分歧扩张限制 f^*M")
    p.add_argument("module", help="k 上模的 JSON 文件")
    p.add_argument("--to", type=int, required=True, dest="target", help="l 的次数 f_l")

    p = sub.add_parser("rank-one", parents=[common], help="秩一模、权重及其特征")
    p.add_argument("data", help="秩一数据的 JSON 文件")

    p = sub.add_parser("inert", parents=[common], help="Inert(ρ̄) 的枚举或成员判定")
    p.add_argument("description", help="惯性描述的 JSON 文件")
    p.add_argument("mode", choices=["enumerate", "member"])
    p.add_argument("--weights", default=None, help="成员判定的权重，例如 '[[-6, 0]]'")

    p = sub.add_parser("verify-example", parents=[common], help="核对五维例子的强可除性与权重")
    p.add_argument("--p", type=int, default=5)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--x", type=int, default=3)
    p.add_argument("--all", action="store_true", help="遍历 p ∈ {3, 5, 7} 的全部 (n, x)")
    p.add_argument("--input", default=None, help="改为核对给定的诱导子模 JSON 文件")

    sub.add_parser("selftest", parents=[common], help="随机实例上的不变量自检")
    return ap


def _job(args: argparse.Namespace) -> JobSpec:
    options = JobOptions(
        precision=args.precision,
        box=tuple(args.box) if args.box else None,
        seed=args.seed,
        trials=args.trials,
        json_output=args.json,
    )
    return JobSpec(command=args.command, options=options)


def _load_module(path: str, precision: Optional[int]):
    data = load_json(path)
    if precision is not None:
        data["precision"] = precision
    return parse_module(data)


# ==============================================================================
# 子命令
# ==============================================================================
def cmd_weights(args) -> Tuple[Dict[str, Any], List[str]]:
    M = _load_module(args.module, args.precision)
    direct, graded = weights(M), weights_via_filtration(M)
    result = {"weights": direct.as_lists(), "weights_via_filtration": graded.as_lists(),
              "agree": direct == graded}
    lines = [f"τ_{j}: {list(ws)}" for j, ws in enumerate(direct.values)]
    if direct != graded:
        raise PropertyViolation(f"两种权重计算不一致: {direct.as_lists()} / {graded.as_lists()}")
    lines.append("✅ Smith 指数与滤过分次维数一致")
    return result, lines


def cmd_sd_check(args) -> Tuple[Dict[str, Any], List[str]]:
    M = _load_module(args.module, args.precision)
    v = is_strongly_divisible(M)
    certificate = None
    if v.certificate is not None:
        certificate = [
            {"component": c.component, "degrees": list(c.degrees),
             "sources": dump_matrix(c.sources), "targets": dump_matrix(c.targets)}
            for c in v.certificate
        ]
    result = {
        "sd": v.sd, "filtered_iso": v.filtered_iso, "weights_in_range": v.weights_in_range,
        "certificate_found": v.certificate_found, "reason": v.reason,
        "weights": weights(M).as_lists(), "certificate": certificate,
    }
    mark = "✅ 强可除" if v.sd else f"❌ 不是强可除的: {v.reason}"
    lines = [mark, f"权重: {result['weights']}"]
    if v.certificate is not None:
        for c in v.certificate:
            lines.append(f"分量 {c.component} 的适配基次数: {list(c.degrees)}")
    return result, lines


def cmd_snf(args) -> Tuple[Dict[str, Any], List[str]]:
    data = load_json(args.matrix)
    if args.precision is not None:
        data["precision"] = args.precision
    A = parse_matrix(data)
    smith = smith_exponents(A)
    result = {"exponents": list(smith.exponents), "U": dump_matrix(smith.U), "V": dump_matrix(smith.V)}
    return result, [f"初等因子指数: {list(smith.exponents)}"]


def cmd_induce(args) -> Tuple[Dict[str, Any], List[str]]:
    N = _load_module(args.module, args.precision)
    out = induce(UnramifiedExtension(args.target, N.f), N)
    result = dump_module(out)
    return result, [f"f_*N: f = {out.f}，秩 {out.rank}", f"权重: {weights(out).as_lists()}"]


def cmd_restrict(args) -> Tuple[Dict[str, Any], List[str]]:
    M = _load_module(args.module, args.precision)
    out = restrict(UnramifiedExtension(M.f, args.target), M)
    result = dump_module(out)
    return result, [f"f^*M: f = {out.f}，秩 {out.rank}", f"权重: {weights(out).as_lists()}"]


def cmd_rank_one(args) -> Tuple[Dict[str, Any], List[str]]:
    data, precision = parse_rank_one(load_json(args.data))
    M = rank_one_module(data.field, data, args.precision or precision)
    chi = character_of_rank_one(data)
    sd = is_strongly_divisible(M).sd
    result = {
        "module": dump_module(M),
        "weights": weights(M).as_lists(),
        "character": {"level": chi.level, "exponent": chi.exponent, "unramified": chi.unramified},
        "sd": sd,
    }
    lines = [
        f"权重: {result['weights']}",
        f"特征: ψ_{chi.unramified} · ω^(-{chi.exponent})，层级 {chi.level}",
        "✅ 强可除" if sd else "❌ 不是强可除的",
    ]
    return result, lines


def cmd_inert(args) -> Tuple[Dict[str, Any], List[str]]:
    desc = parse_description(load_json(args.description))
    box = tuple(args.box) if args.box else None
    if args.mode == "enumerate":
        box = box or default_box(desc.p)
        found = sorted(t.values for t in inert_enumerate(desc, box))
        result = {"box": list(box), "elements": [[list(vs) for vs in t] for t in found]}
        lines = [f"盒子 {list(box)} 内共 {len(found)} 个元素"] + [str([list(vs) for vs in t]) for t in found]
        return result, lines
    if args.weights is None:
        raise BKError("member 模式需要 --weights")
    lam = parse_weights(json.loads(args.weights))
    res = inert_member(desc, lam, box)
    witness = [list(w) for w in res.witness] if res.witness else None
    result = {"weights": [list(vs) for vs in lam.values], "member": res.member, "witness": witness}
    lines = ["✅ 属于 Inert" if res.member else "❌ 不属于 Inert"]
    if witness:
        lines.append(f"分解: {witness}")
    return result, lines


def _example_params(args) -> List[Tuple[int, int, int]]:
    if not args.all:
        return [(args.p, args.n, args.x)]
    return [(p, n, x) for p in (3, 5, 7) for n in range(1, p + 1) for x in range(p + 1)]


def _verify_induced(path: str, precision: Optional[int]) -> Tuple[Dict[str, Any], List[str]]:
    data = load_json(path)
    if precision is not None:
        data["precision"] = precision
    M = parse_induced(data)
    cmp = compare_sd_routes(M)
    result: Dict[str, Any] = {"explicit": cmp.explicit, "abstract": cmp.abstract}
    lines = [f"显式判别: {cmp.explicit}，抽象判别: {cmp.abstract}"]
    if not cmp.agree:
        raise PropertyViolation(f"两种强可除判别不一致: {cmp}")
    if not cmp.explicit:
        return result, lines + ["❌ 不是强可除的"]
    info = inertial_data(M)
    member = inert_member(info.description, WeightTuple(info.weights.values)).member
    result.update({
        "basepoint": info.choice.basepoint,
        "x_set": sorted(info.choice.x_set.members),
        "adapted_exponents": list(info.exponents),
        "weights": info.weights.as_lists(),
        "character": {"level": info.character.level, "exponent": info.character.exponent},
        "consistent": info.consistent,
        "in_inert": member,
    })
    lines += [
        f"λ = {info.choice.basepoint}，X = {sorted(info.choice.x_set.members)}",
        f"r̃ = {list(info.exponents)}，权重 {info.weights.as_lists()}",
        f"{'✅' if info.consistent else '❌'} 权重公式与直接计算一致",
        f"{'✅' if member else '❌'} 权重属于 Inert",
    ]
    if not (info.consistent and member):
        raise PropertyViolation(f"{M} 的权重公式或 Inert 成员性不成立")
    return result, lines


def cmd_verify_example(args) -> Tuple[Dict[str, Any], List[str]]:
    if args.input is not None:
        return _verify_induced(args.input, args.precision)
    rows, lines, bad = [], [], []
    for p, n, x in _example_params(args):
        M = example_submodule(p, n, x, args.precision)
        cmp = compare_sd_routes(M)
        got = list(weights(M.as_bk_module())[0])
        expected = sorted([x, 0, n - 1, n, p])
        ok = cmp.explicit and cmp.abstract and got == expected
        rows.append({"p": p, "n": n, "x": x, "explicit": cmp.explicit, "abstract": cmp.abstract,
                     "weights": got, "expected": expected, "ok": ok})
        lines.append(f"{'✅' if ok else '❌'} p={p} n={n} x={x}: 权重 {got}，预期 {expected}")
        if not ok:
            bad.append((p, n, x))
    result = {"instances": rows, "ok": not bad}
    if bad:
        raise PropertyViolation(f"例子不成立: {bad}")
    return result, lines


def cmd_selftest(args) -> Tuple[Dict[str, Any], List[str]]:
    seed = get_seed() if args.seed is None else args.seed
    trials = get_trials() if args.trials is None else args.trials
    report = run_selftest(seed, trials)
    if not report.ok:
        for line in report.lines():
            print(line)
        raise PropertyViolation(f"自检有 {len(report.failures)} 项失败")
    return report.to_dict(), report.lines()


COMMANDS = {
    "weights": cmd_weights,
    "sd-check": cmd_sd_check,
    "snf": cmd_snf,
    "induce": cmd_induce,
    "restrict": cmd_restrict,
    "rank-one": cmd_rank_one,
    "inert": cmd_inert,
    "verify-example": cmd_verify_example,
    "selftest": cmd_selftest,
}
assert set(COMMANDS) == set(CLI_CONFIG["COMMANDS"])


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, BK_LOG_LEVEL.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        encoding='utf-8'
    )
    args = build_parser().parse_args(argv)
    try:
        validate_config()
        job = _job(args)
        result, lines = COMMANDS[job.command](args)
    except ValidationError as e:
        logger.error(f"输入格式错误: {validation_message(e)}")
        return get_exit_code("input_error")
    except (InsufficientPrecision, ZeroToPrecision) as e:
        logger.error(f"精度不足: {str(e)}")
        return get_exit_code("precision_error")
    except PropertyViolation as e:
        logger.error(f"性质不成立: {str(e)}")
        return get_exit_code("violation")
    except (BKError, ValueError, OSError) as e:
        logger.error(f"输入错误: {str(e)}")
        return get_exit_code("input_error")

    if job.options.json_output:
        print(dump_json(result))
    else:
        for line in lines:
            print(line)
    return get_exit_code("ok")


if __name__ == "__main__":
    sys.exit(main())
