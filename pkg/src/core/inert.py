"""
驯顺特征的指数组合与惯性权重集 Inert(ρ̄)
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from .errors import BoxTooLarge, IncompatibleDegrees, SizeMismatch
from ..utils.params_config import default_budget

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TameCharacter:
    """驯顺惯性特征 ψ_x · ω_{θ_0}^{-e}

    Attributes:
        p: 特征
        level: f_l，即 [l : F_p]
        exponent: e，规范化到 [0, p^{level} - 2]
        unramified: 非分歧部分 x 的整数表示，默认 1
    """
    p: int
    level: int
    exponent: int
    unramified: int = 1

    def __post_init__(self):
        if self.level < 1:
            raise IncompatibleDegrees(f"特征的层级 {self.level} 必须 ≥ 1")
        object.__setattr__(self, "exponent", int(self.exponent) % self.modulus)

    @property
    def modulus(self) -> int:
        return self.p ** self.level - 1

    def shifted(self, c: int) -> "TameCharacter":
        """乘以 ω^{-c}（k 上的层级 1 基本特征限制到 l）"""
        step = c * (self.p ** self.level - 1) // (self.p - 1)
        return TameCharacter(self.p, self.level, self.exponent + step, self.unramified)

    def rebased(self, steps: int = 1) -> "TameCharacter":
        """基点 θ_0 ↦ θ_0∘φ^steps：e ↦ p^steps · e"""
        return TameCharacter(self.p, self.level, self.exponent * pow(self.p, steps, self.modulus or 1), self.unramified)


def character_conjugates(chi: TameCharacter, f_k: int) -> List[int]:
    """共轭指数 {e·p^{f_k·j} mod p^{f_l} - 1}，保持首次出现的顺序"""
    if f_k < 1 or chi.level % f_k:
        raise IncompatibleDegrees(f"f_k = {f_k} 不整除层级 {chi.level}")
    out: List[int] = []
    for j in range(chi.level // f_k):
        e = (chi.exponent * pow(chi.p, f_k * j, chi.modulus)) % chi.modulus if chi.modulus > 1 else 0
        if e not in out:
            out.append(e)
    return out


def is_induction_irreducible(chi: TameCharacter, f_k: int) -> bool:
    """Ind_L^K χ 不可约当且仅当 [l:k] 个共轭两两不同"""
    return len(character_conjugates(chi, f_k)) == chi.level // f_k


@dataclass(frozen=True)
class InertDescription:
    """ρ̄^ss ≅ ⊕_ζ Ind_{L_ζ}^K ζ 的惯性数据"""
    p: int
    f_k: int
    summands: Tuple[TameCharacter, ...]

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))
        for chi in self.summands:
            if chi.p != self.p:
                raise IncompatibleDegrees(f"特征 p = {chi.p} 与描述的 p = {self.p} 不一致")
            if chi.level % self.f_k:
                raise IncompatibleDegrees(f"f_k = {self.f_k} 不整除层级 {chi.level}")
            if not is_induction_irreducible(chi, self.f_k):
                logger.warning(f"求和项 (f={chi.level}, e={chi.exponent}) 的诱导可约，Inert 的定义要求不可约")

    @property
    def dimension(self) -> int:
        return sum(chi.level // self.f_k for chi in self.summands)


@dataclass(frozen=True)
class WeightTuple:
    """每个嵌入 τ 一个升序整数多重集 λ_τ"""
    values: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(tuple(sorted(int(v) for v in vs)) for vs in self.values))

    def __getitem__(self, tau: int) -> Tuple[int, ...]:
        return self.values[tau]

    def __len__(self) -> int:
        return len(self.values)

    def shifted(self, c: int) -> "WeightTuple":
        return WeightTuple(tuple(tuple(v + c for v in vs) for vs in self.values))


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    witness: Optional[Tuple[Tuple[int, ...], ...]]


def description_from_character(chi: TameCharacter, f_k: int) -> InertDescription:
    return InertDescription(chi.p, f_k, (chi,))


def shift_description(desc: InertDescription, c: int) -> InertDescription:
    """每个求和项乘 ω^{-c}；对应 λ ↦ λ + c"""
    return InertDescription(desc.p, desc.f_k, tuple(chi.shifted(c) for chi in desc.summands))


# ==============================================================================
# 枚举
# ==============================================================================
def _summand_solutions(chi: TameCharacter, f_k: int, values: range) -> Set[Tuple[Tuple[int, ...], ...]]:
    """单个求和项在盒子内的全部解，按 τ 分组成升序元组"""
    f, p, mod = chi.level, chi.p, chi.modulus
    h = f // 2

    def residue(vec, start):
        if mod <= 1:
            return 0
        return sum(v * pow(p, start + i, mod) for i, v in enumerate(vec)) % mod

    right: Dict[int, List[Tuple[int, ...]]] = {}
    for vec in itertools.product(values, repeat=f - h):
        right.setdefault(residue(vec, h), []).append(vec)

    out = set()
    target = chi.exponent if mod > 1 else 0
    for left in itertools.product(values, repeat=h):
        need = (target - residue(left, 0)) % mod if mod > 1 else 0
        for tail in right.get(need, []):
            r = left + tail
            out.add(tuple(tuple(sorted(r[i] for i in range(tau, f, f_k))) for tau in range(f_k)))
    return out


def inert_enumerate(desc: InertDescription, box: Tuple[int, int],
                    budget: Optional[int] = None) -> Set[WeightTuple]:
    """盒子内 Inert(ρ̄) 的全部元素

    Args:
        desc: 惯性描述
        box: 闭区间 (lo, hi)
        budget: 候选向量预算，默认读配置

    Raises:
        BoxTooLarge: 折半搜索或组装的规模超出预算
    """
    lo, hi = box
    values = range(lo, hi + 1)
    B = len(values)
    budget = default_budget() if budget is None else budget
    cost = sum(B ** (chi.level // 2) + B ** (chi.level - chi.level // 2) for chi in desc.summands)
    if cost > budget:
        raise BoxTooLarge(f"折半搜索需要 {cost} 个候选，超出预算 {budget}")

    current = {tuple(() for _ in range(desc.f_k))}
    for chi in desc.summands:
        sols = _summand_solutions(chi, desc.f_k, values)
        if len(current) * len(sols) > budget:
            raise BoxTooLarge(f"组装 {len(current)} × {len(sols)} 个组合超出预算 {budget}")
        current = {
            tuple(tuple(sorted(a[tau] + b[tau])) for tau in range(desc.f_k))
            for a in current for b in sols
        }
        logger.debug(f"求和项 (f={chi.level}, e={chi.exponent}) 有 {len(sols)} 个解，累计 {len(current)} 个")
    return {WeightTuple(t) for t in current}


# ==============================================================================
# 成员判定
# ==============================================================================
def inert_member(desc: InertDescription, weights: WeightTuple,
                 box: Optional[Tuple[int, int]] = None) -> MembershipResult:
    """λ 是否属于 Inert(ρ̄)（给定 box 时还要求全部分量落在盒子内）

    逐个求和项回溯：为其 f_ζ 个槽位从 λ_{i mod f_k} 的剩余多重集中取值，
    最后一个槽位只尝试满足同余条件的取值。

    Raises:
        SizeMismatch: λ 的形状与描述的维数不一致
    """
    n, f_k = desc.dimension, desc.f_k
    if len(weights) != f_k or any(len(weights[t]) != n for t in range(f_k)):
        raise SizeMismatch(f"权重元组需要 {f_k} 个大小为 {n} 的多重集")
    if box is not None and any(not box[0] <= v <= box[1] for vs in weights.values for v in vs):
        return MembershipResult(False, None)

    pools: List[Dict[int, int]] = []
    for t in range(f_k):
        counts: Dict[int, int] = {}
        for v in weights[t]:
            counts[v] = counts.get(v, 0) + 1
        pools.append(counts)

    summands = desc.summands
    witness: List[Tuple[int, ...]] = []

    def fill(s: int, slot: int, partial: int, chosen: List[int]) -> bool:
        if s == len(summands):
            return True
        chi = summands[s]
        f, p, mod = chi.level, chi.p, chi.modulus
        if slot == f:
            # 同余已在最后一个槽位筛过
            witness.append(tuple(chosen))
            if fill(s + 1, 0, 0, []):
                return True
            witness.pop()
            return False
        pool = pools[slot % f_k]
        weight = pow(p, slot, mod) if mod > 1 else 0
        for v in sorted(pool):
            if pool[v] == 0:
                continue
            if slot == f - 1 and mod > 1 and (partial + v * weight - chi.exponent) % mod:
                continue
            pool[v] -= 1
            chosen.append(v)
            if fill(s, slot + 1, partial + v * weight, chosen):
                return True
            chosen.pop()
            pool[v] += 1
        return False

    if fill(0, 0, 0, []):
        return MembershipResult(True, tuple(witness))
    return MembershipResult(False, None)
