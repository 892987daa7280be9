"""
诱导秩一模 f_*N 的子模：显式强可除判别、X 集合与权重公式
"""
import itertools
import logging
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import galois
import numpy as np

from .algebra import FqField, FrobOrbitIndex
from .bkmod import BKModule, WeightProfile, is_strongly_divisible, weights
from .errors import (
    AmbientReducible,
    BKError,
    BoxTooLarge,
    DimensionMismatch,
    IncompatibleDegrees,
    NoValidLambda,
    NotStable,
)
from .induct import RankOneData, UnramifiedExtension, character_of_rank_one, induce, rank_one_module
from .inert import InertDescription, TameCharacter, description_from_character, is_induction_irreducible
from .lattices import Lattice, SeriesMatrix, _independent_rows, _rank, filtration_image
from ..utils.params_config import LATTICE_CONFIG, SELFTEST_CONFIG, default_precision

logger = logging.getLogger(__name__)


# ==============================================================================
# 环境模 f_*N
# ==============================================================================
@dataclass(frozen=True)
class InducedAmbient:
    """f_*N，N 为 l 上 φ(1) = Σ_θ u^{r_θ} e_θ 的秩一模（非分歧部分取 x = 1）

    嵌入 θ = s + f_k·b 落在 k 的分量 s 的第 b 个坐标上。
    """
    ext: UnramifiedExtension
    exponents: Tuple[int, ...]
    field: FqField
    precision: Optional[int] = None

    def __post_init__(self):
        exps = tuple(int(r) for r in self.exponents)
        if len(exps) != self.ext.f_l:
            raise IncompatibleDegrees(f"需要 {self.ext.f_l} 个指数 r_θ，实际为 {len(exps)}")
        p = self.field.p
        if any(not 0 <= r <= p for r in exps):
            raise BKError(f"r_θ 必须落在 [0, {p}]，实际为 {exps}")
        self.ext.check_field(self.field)
        object.__setattr__(self, "exponents", exps)
        if self.precision is None:
            prec = default_precision(self.ext.degree, p) + LATTICE_CONFIG["WINDOW_MARGIN"]
            object.__setattr__(self, "precision", prec)

    @property
    def f_k(self) -> int:
        return self.ext.f_k

    @property
    def f_l(self) -> int:
        return self.ext.f_l

    @property
    def degree(self) -> int:
        return self.ext.degree

    def theta(self, s: int, b: int) -> int:
        return s + self.f_k * b

    def position(self, theta: int) -> Tuple[int, int]:
        """θ ↦ (分量 s, 坐标 b)"""
        theta %= self.f_l
        return theta % self.f_k, theta // self.f_k

    def rank_one(self) -> RankOneData:
        return RankOneData(self.field, 1, self.exponents)

    @cached_property
    def module(self) -> BKModule:
        return induce(self.ext, rank_one_module(self.field, self.rank_one(), self.precision))

    def character(self) -> TameCharacter:
        return character_of_rank_one(self.rank_one())

    def is_irreducible(self) -> bool:
        return is_induction_irreducible(self.character(), self.f_k)

    def residue_classes(self, s: int) -> Dict[int, List[int]]:
        """分量 s 内按 r_θ mod p 分组的坐标"""
        p = self.field.p
        classes: Dict[int, List[int]] = {}
        for b in range(self.degree):
            classes.setdefault(self.exponents[self.theta(s, b)] % p, []).append(b)
        return classes


# ==============================================================================
# 子模
# ==============================================================================
class InducedSubmodule:
    """M ⊂ f_*N，每个分量给出一个满秩格（列为基）"""

    def __init__(self, ambient: InducedAmbient, bases: Sequence[SeriesMatrix]):
        bases = tuple(bases)
        d = ambient.degree
        if len(bases) != ambient.f_k:
            raise DimensionMismatch(f"需要 {ambient.f_k} 个分量的格基，实际为 {len(bases)}")
        lattices = []
        for s, B in enumerate(bases):
            if B.shape != (d, d):
                raise DimensionMismatch(f"分量 {s} 的格基形状 {B.shape} 应为 {(d, d)}")
            if not B.is_integral():
                raise NotStable(f"分量 {s} 的格不在 f_*N 内")
            L = Lattice(B.truncate(ambient.precision))
            logger.debug(f"分量 {s}: 格的初等因子指数 {L.exponents}")
            lattices.append(Lattice(L.hermite()))
        self.ambient = ambient
        self.lattices: Tuple[Lattice, ...] = tuple(lattices)

    @classmethod
    def full(cls, ambient: InducedAmbient) -> "InducedSubmodule":
        std = SeriesMatrix.identity(ambient.field, ambient.degree, ambient.precision)
        return cls(ambient, [std] * ambient.f_k)

    @classmethod
    def scaled_ambient(cls, ambient: InducedAmbient) -> "InducedSubmodule":
        """u·f_*N"""
        std = SeriesMatrix.monomial_diagonal(ambient.field, [1] * ambient.degree, ambient.precision)
        return cls(ambient, [std] * ambient.f_k)

    @classmethod
    def from_subspaces(cls, ambient: InducedAmbient, spaces: Sequence) -> "InducedSubmodule":
        """M_s = V_s + u·(f_*N)_s，spaces[s] 的行张成 V_s ⊆ F^d"""
        if len(spaces) != ambient.f_k:
            raise DimensionMismatch(f"需要 {ambient.f_k} 个子空间")
        GF = ambient.field.GF
        d = ambient.degree
        bases = []
        for s, V in enumerate(spaces):
            V = GF(np.asarray(V, dtype=np.int64).reshape(-1, d))
            rows = _independent_rows(V, GF) if V.shape[0] else GF.Zeros((0, d))
            span = rows
            shifted = []
            for e in range(d):
                trial = np.concatenate([span, GF.Identity(d)[e:e + 1]], axis=0)
                if _rank(trial) > span.shape[0]:
                    span = trial
                    shifted.append(e)
            cols = [SeriesMatrix.constant(ambient.field, rows[t:t + 1].T, ambient.precision)
                    for t in range(rows.shape[0])]
            unit = SeriesMatrix.monomial_diagonal(ambient.field, [1] * d, ambient.precision)
            cols += [unit.column(e) for e in shifted]
            bases.append(SeriesMatrix.hstack(cols))
        return cls(ambient, bases)

    def basis(self, s: int) -> SeriesMatrix:
        return self.lattices[s % self.ambient.f_k].basis

    def constant_vectors(self, s: int) -> galois.FieldArray:
        """M_s ∩ F^d 的一组基（按行）"""
        return self.lattices[s % self.ambient.f_k].constant_vectors()

    def contains_constant(self, s: int, vector) -> bool:
        V = self.constant_vectors(s)
        vec = self.ambient.field.GF(np.asarray(vector, dtype=np.int64)).reshape(1, -1)
        if not vec.view(np.ndarray).any():
            return True
        return _rank(np.concatenate([V, vec], axis=0)) == V.shape[0]

    @cached_property
    def frobenius_matrices(self) -> Tuple[SeriesMatrix, ...]:
        """A^M_s = H_s^{-1} B_s σ(H_{s+1})，H_s 为分量 s 的 Hermite 基"""
        amb = self.ambient.module
        out = []
        for s in range(self.ambient.f_k):
            image = amb.matrix(s) @ self.basis(s + 1).sigma()
            out.append(self.basis(s).inverse() @ image)
        return tuple(out)

    def as_bk_module(self) -> BKModule:
        return BKModule.from_matrices(self.ambient.field, self.frobenius_matrices)

    def __repr__(self) -> str:
        return f"InducedSubmodule(exponents={self.ambient.exponents}, lattices={self.lattices})"


# ==============================================================================
# 显式判别条件
# ==============================================================================
def check_condition_1(M: InducedSubmodule) -> bool:
    """φ(M) ⊆ M，且 φ(m) ∈ u^{p+1}M 蕴含 m ∈ uM"""
    p = M.ambient.field.p
    for s, A in enumerate(M.frobenius_matrices):
        if not A.is_integral():
            logger.debug(f"分量 {s}: φ(M) 不含于 M")
            return False
        if filtration_image(A, p + 1, frobenius=True).shape[0]:
            logger.debug(f"分量 {s}: 存在 m ∉ uM 使 φ(m) ∈ u^{p + 1}M")
            return False
    return True


def check_condition_2(M: InducedSubmodule) -> bool:
    """M 中常向量的空间在按 r_θ mod p 分类的投影下稳定"""
    amb = M.ambient
    for s in range(amb.f_k):
        V = M.constant_vectors(s)
        if V.shape[0] == 0:
            continue
        for cls_, coords in amb.residue_classes(s).items():
            proj = amb.field.GF.Zeros(V.shape)
            proj[:, coords] = V[:, coords]
            if _rank(np.concatenate([V, proj], axis=0)) > V.shape[0]:
                logger.debug(f"分量 {s}: 常向量在剩余类 {cls_} 上的投影不在 M 中")
                return False
    return True


def _require_irreducible(ambient: InducedAmbient):
    if not ambient.is_irreducible():
        chi = ambient.character()
        raise AmbientReducible(
            f"特征 ω^(-{chi.exponent}) 在 f_k = {ambient.f_k} 上的诱导可约，显式判别法不适用"
        )


def is_sd_via_explicit(M: InducedSubmodule) -> bool:
    """两个显式条件同时成立

    Raises:
        AmbientReducible: T(f_*N) 可约
    """
    _require_irreducible(M.ambient)
    return check_condition_1(M) and check_condition_2(M)


@dataclass(frozen=True)
class SDComparison:
    explicit: bool
    abstract: bool

    @property
    def agree(self) -> bool:
        return self.explicit == self.abstract


def compare_sd_routes(M: InducedSubmodule) -> SDComparison:
    """显式判别与抽象判别（提取出的 BKModule）并排给出"""
    explicit = is_sd_via_explicit(M)
    abstract = is_strongly_divisible(M.as_bk_module()).sd
    if explicit != abstract:
        logger.warning(f"显式判别 {explicit} 与抽象判别 {abstract} 不一致: {M}")
    return SDComparison(explicit, abstract)


# ==============================================================================
# X 集合与基点 λ
# ==============================================================================
@dataclass(frozen=True)
class XSet:
    """基点 λ 下的 X 集合；vectors[θ] 给出 θ ∉ X 时唯一的规范向量 e_θ + Σ α_κ e_κ"""
    basepoint: int
    f_l: int
    members: frozenset
    vectors: Dict[int, Dict[int, int]] = dc_field(default_factory=dict)

    def rank(self, theta: int) -> int:
        """<_λ 中的位置：λ∘φ 为 0，λ 为 f_l - 1"""
        return (theta - self.basepoint - 1) % self.f_l

    def indicator(self, theta: int) -> int:
        return 1 if theta % self.f_l in self.members else 0

    @property
    def trivial(self) -> bool:
        return not self.members or len(self.members) == self.f_l


def build_X(M: InducedSubmodule, lam: int) -> XSet:
    """按 <_λ 对常向量空间做三角消元

    每个分量把坐标按秩降序排列后取 RREF，主元列就是不属于 X 的 θ，
    对应的行即为规范向量。
    """
    amb = M.ambient
    f_l, d = amb.f_l, amb.degree
    lam %= f_l
    members = set(range(f_l))
    vectors: Dict[int, Dict[int, int]] = {}
    for s in range(amb.f_k):
        V = M.constant_vectors(s)
        if V.shape[0] == 0:
            continue
        thetas = [amb.theta(s, b) for b in range(d)]
        order = sorted(range(d), key=lambda b: -((thetas[b] - lam - 1) % f_l))
        rows = _independent_rows(V[:, order], amb.field.GF)
        for row in rows:
            ints = row.view(np.ndarray)
            pivot = int(np.flatnonzero(ints)[0])
            theta = thetas[order[pivot]]
            members.discard(theta)
            vectors[theta] = {
                thetas[order[t]]: int(ints[t])
                for t in np.flatnonzero(ints) if t != pivot
            }
    X = XSet(lam, f_l, frozenset(members), vectors)
    logger.debug(f"λ = {lam}: X = {sorted(X.members)}")
    return X


def _e_theta_in_M(M: InducedSubmodule, theta: int) -> bool:
    s, b = M.ambient.position(theta)
    vec = np.zeros(M.ambient.degree, dtype=np.int64)
    vec[b] = 1
    return M.contains_constant(s, vec)


def lambda_violations(M: InducedSubmodule, X: XSet) -> List[str]:
    """逐条检查基点的三个条件，返回违反的描述"""
    r = M.ambient.exponents
    out = []
    for theta in range(X.f_l):
        nxt = FrobOrbitIndex(X.f_l, theta).succ().index
        here, there = X.indicator(theta), X.indicator(nxt)
        if here and not there and r[theta] <= 0:
            out.append(f"θ={theta} ∈ X, θ∘φ ∉ X 但 r_θ = 0")
        if not here and there and r[theta] != 0:
            out.append(f"θ={theta} ∉ X, θ∘φ ∈ X 但 r_θ = {r[theta]}")
        if here and not _e_theta_in_M(M, nxt) and not 0 <= r[theta] <= 1:
            out.append(f"θ={theta} ∈ X, e_(θ∘φ) ∉ M 但 r_θ = {r[theta]}")
    return out


@dataclass(frozen=True)
class LambdaChoice:
    """all_trivial 时 X 为空或为全部嵌入，三个条件自动成立"""
    basepoint: int
    x_set: XSet
    all_trivial: bool


def choose_lambda(M: InducedSubmodule) -> LambdaChoice:
    """依次扫描全部基点，返回第一个满足三个条件的 λ

    Raises:
        AmbientReducible: T(f_*N) 可约
        NoValidLambda: 没有任何基点满足条件
    """
    _require_irreducible(M.ambient)
    first = build_X(M, 0)
    if first.trivial:
        return LambdaChoice(0, first, True)
    for lam in range(M.ambient.f_l):
        X = first if lam == 0 else build_X(M, lam)
        bad = lambda_violations(M, X)
        if not bad:
            return LambdaChoice(lam, X, False)
        logger.debug(f"λ = {lam} 不合格: {'; '.join(bad)}")
    raise NoValidLambda(f"{M} 没有满足条件的基点")


# ==============================================================================
# 权重公式与惯性数据
# ==============================================================================
def adapted_exponents(M: InducedSubmodule, X: XSet) -> Tuple[int, ...]:
    """r̃_θ = r_θ + p·s_{θ∘φ} - s_θ"""
    p = M.ambient.field.p
    r = M.ambient.exponents
    return tuple(
        r[theta] + p * X.indicator(FrobOrbitIndex(X.f_l, theta).succ().index) - X.indicator(theta)
        for theta in range(X.f_l)
    )


def adapted_weights(M: InducedSubmodule, X: XSet) -> WeightProfile:
    """Weight_τ(M) = {r̃_θ : θ|_k = τ}"""
    amb = M.ambient
    exps = adapted_exponents(M, X)
    return WeightProfile(tuple(
        tuple(sorted(exps[amb.theta(s, b)] for b in range(amb.degree)))
        for s in range(amb.f_k)
    ))


@dataclass(frozen=True)
class InertialData:
    exponents: Tuple[int, ...]
    character: TameCharacter
    description: InertDescription
    weights: WeightProfile
    choice: LambdaChoice
    consistent: bool


def inertial_data(M: InducedSubmodule) -> InertialData:
    """由 X 集合得到 r̃_θ、对应的驯顺特征及其惯性描述

    consistent 记录公式权重是否与直接计算的权重一致。
    """
    if not is_sd_via_explicit(M):
        raise BKError(f"{M} 不是强可除的")
    choice = choose_lambda(M)
    exps = adapted_exponents(M, choice.x_set)
    chi = character_of_rank_one(RankOneData(M.ambient.field, 1, exps))
    desc = description_from_character(chi, M.ambient.f_k)
    formula = adapted_weights(M, choice.x_set)
    direct = weights(M.as_bk_module())
    consistent = formula == direct
    if not consistent:
        logger.error(f"权重公式 {formula.as_lists()} 与直接计算 {direct.as_lists()} 不一致")
    return InertialData(exps, chi, desc, formula, choice, consistent)


# ==============================================================================
# 辅助性质
# ==============================================================================
def minimal_delta(M: InducedSubmodule, theta: int) -> int:
    """最小的 δ ≥ 0 使 u^δ e_θ ∈ M"""
    amb = M.ambient
    s, b = amb.position(theta)
    L = M.lattices[s]
    for delta in range(L.conductor + 1):
        vec = SeriesMatrix.zeros(amb.field, amb.degree, 1, amb.precision)
        vec.coeffs[b, 0, delta] = 1
        if L.contains(vec):
            return delta
    return L.conductor


@dataclass(frozen=True)
class MinimalSum:
    """e_ι + Σ_{0<j≤length} α_j e_{ι∘φ^j} ∈ M，coefficients[j] = α_j"""
    iota: int
    length: int
    coefficients: Dict[int, int]


def _sum_with_support(M: InducedSubmodule, iota: int, length: int) -> Optional[Dict[int, int]]:
    amb = M.ambient
    f_l = amb.f_l
    s, b0 = amb.position(iota)
    allowed = {}
    for j in range(length + 1):
        theta = (iota + j) % f_l
        if theta % amb.f_k == s:
            allowed[amb.position(theta)[1]] = j
    V = M.constant_vectors(s)
    if V.shape[0] == 0:
        return None
    GF = amb.field.GF
    outside = [c for c in range(amb.degree) if c not in allowed]
    if outside:
        kernel = V[:, outside].T.null_space()
        combos = kernel @ V if kernel.shape[0] else GF.Zeros((0, amb.degree))
    else:
        combos = V
    for vec in combos:
        lead = vec[b0]
        if int(lead):
            vec = vec / lead
            return {allowed[c]: int(vec[c]) for c in allowed if int(vec[c]) and c != b0}
    return None


def minimal_sums(M: InducedSubmodule) -> List[MinimalSum]:
    """长度最短的常向量和（每个 ι 至多一个）"""
    f_l = M.ambient.f_l
    for length in range(f_l):
        found = []
        for iota in range(f_l):
            coeffs = _sum_with_support(M, iota, length)
            if coeffs is not None:
                found.append(MinimalSum(iota, length, coeffs))
        if found:
            return found
    return []


def _rref_subspaces(GF, d: int) -> Iterator[galois.FieldArray]:
    """F^d 的全部子空间（以 RREF 行矩阵给出）"""
    elements = [int(x) for x in GF.elements]
    for k in range(d + 1):
        for pivots in itertools.combinations(range(d), k):
            free = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, d) if c not in pivots]
            for values in itertools.product(elements, repeat=len(free)):
                mat = np.zeros((k, d), dtype=np.int64)
                for i, pc in enumerate(pivots):
                    mat[i, pc] = 1
                for (i, c), v in zip(free, values):
                    mat[i, c] = v
                yield GF(mat)


def enumerate_sd_submodules(ambient: InducedAmbient, max_field_size: Optional[int] = None) -> List[InducedSubmodule]:
    """在 u·f_*N ⊆ M ⊆ f_*N 的范围内穷举强可除子模

    p > 2 时强可除蕴含 u e_θ ∈ M，因此穷举是完整的。

    Raises:
        BoxTooLarge: 域或 f_l 超出有界穷举的上限
        AmbientReducible: T(f_*N) 可约
    """
    limit = SELFTEST_CONFIG["ENUMERATE_MAX_FIELD_SIZE"] if max_field_size is None else max_field_size
    if ambient.field.order > limit or ambient.f_l > SELFTEST_CONFIG["ENUMERATE_MAX_F"]:
        raise BoxTooLarge(f"穷举只支持 |F| ≤ {limit}、f_l ≤ {SELFTEST_CONFIG['ENUMERATE_MAX_F']}")
    _require_irreducible(ambient)
    if ambient.field.p == 2:
        logger.warning("p = 2 时 δ_θ 可以为 2，穷举结果可能不完整")
    per_component = list(_rref_subspaces(ambient.field.GF, ambient.degree))
    out = []
    for spaces in itertools.product(per_component, repeat=ambient.f_k):
        M = InducedSubmodule.from_subspaces(ambient, spaces)
        if is_sd_via_explicit(M):
            out.append(M)
    logger.info(f"共 {len(per_component) ** ambient.f_k} 个候选，其中 {len(out)} 个强可除")
    return out


# ==============================================================================
# 五维例子
# ==============================================================================
def example_ambient(p: int, n: int, x: int, precision: Optional[int] = None) -> InducedAmbient:
    """K = Q_p、[l:k] = 5、r = (0, n, 0, n, x) 的环境模"""
    field = FqField(p, 5)
    return InducedAmbient(UnramifiedExtension(1, 5), (0, n, 0, n, x), field, precision)


def example_submodule(p: int, n: int, x: int, precision: Optional[int] = None) -> InducedSubmodule:
    """由 e_4, e_3 + e_1, e_2, u·e_1, e_0 生成的子模"""
    ambient = example_ambient(p, n, x, precision)
    entries = [
        [[0], [0], [0], [0], [1]],
        [[0], [1], [0], [0, 1], [0]],
        [[0], [0], [1], [0], [0]],
        [[0], [1], [0], [0], [0]],
        [[1], [0], [0], [0], [0]],
    ]
    basis = SeriesMatrix.from_polynomials(ambient.field, entries, ambient.precision)
    return InducedSubmodule(ambient, [basis])
