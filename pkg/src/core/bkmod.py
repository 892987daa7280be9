"""
p-挠 Breuil–Kisin 模：权重、滤过、强可除性判定与子商
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import galois
import numpy as np

from .algebra import FqField
from .errors import (
    BKError,
    DimensionMismatch,
    IncompatibleDegrees,
    NotAGradedBasis,
    NotSaturated,
    NotStable,
    ZeroScalar,
)
from .lattices import (
    FilteredDims,
    FilteredSpace,
    Lattice,
    SeriesMatrix,
    _filtration_dims,
    _independent_rows,
    _rank,
    filtration_image,
    is_strict_linear,
    lift_adapted_basis,
    preimage_of_scaled_standard,
    quotient_mod_u_filtration,
    smith_exponents,
)
from ..utils.params_config import SELFTEST_CONFIG, default_precision

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BKModule:
    """秩 n 的 Breuil–Kisin 模，按嵌入 τ_0, ..., τ_{f-1} 分解

    A_j 描述 φ: M_{τ_{j+1}} → M_{τ_j}：coords(φ(m)) = A_j · σ(coords(m))，σ 为 u ↦ u^p。
    """
    field: FqField
    f: int
    rank: int
    frob: Tuple[SeriesMatrix, ...]
    precision: int

    def __post_init__(self):
        if self.f < 1:
            raise IncompatibleDegrees(f"f = {self.f} 必须 ≥ 1")
        if not self.field.contains_degree(self.f):
            raise IncompatibleDegrees(f"系数域 F_{self.field.order} 不包含 F_{{p^{self.f}}}")
        if len(self.frob) != self.f:
            raise DimensionMismatch(f"需要 {self.f} 个 Frobenius 矩阵，实际为 {len(self.frob)}")
        mats = []
        for j, A in enumerate(self.frob):
            if A.shape != (self.rank, self.rank):
                raise DimensionMismatch(f"A_{j} 的形状 {A.shape} 与秩 {self.rank} 不符")
            if A.precision < self.precision:
                raise DimensionMismatch(f"A_{j} 的精度 {A.precision} 低于模的精度 {self.precision}")
            mats.append(A.truncate(self.precision))
        object.__setattr__(self, "frob", tuple(mats))

    @classmethod
    def from_matrices(cls, field: FqField, frob: Sequence[SeriesMatrix]) -> "BKModule":
        frob = tuple(frob)
        rank = frob[0].rows if frob else 0
        precision = min(A.precision for A in frob)
        return cls(field, len(frob), rank, frob, precision)

    @classmethod
    def from_polynomials(cls, field: FqField, matrices, precision: Optional[int] = None) -> "BKModule":
        """由多项式系数列表构造，matrices[j][a][b] 为升幂系数列表"""
        rank = len(matrices[0]) if matrices else 0
        if precision is None:
            precision = default_precision(rank, field.p)
        frob = tuple(SeriesMatrix.from_polynomials(field, A, precision) for A in matrices)
        return cls(field, len(frob), rank, frob, precision)

    @classmethod
    def identity(cls, field: FqField, f: int, rank: int, precision: Optional[int] = None) -> "BKModule":
        if precision is None:
            precision = default_precision(rank, field.p)
        frob = tuple(SeriesMatrix.identity(field, rank, precision) for _ in range(f))
        return cls(field, f, rank, frob, precision)

    def matrix(self, j: int) -> SeriesMatrix:
        return self.frob[j % self.f]

    def with_precision(self, precision: int) -> "BKModule":
        """把精确给出的 Frobenius 矩阵换一个精度重新截断"""
        frob = tuple(A.exact_with_precision(precision) for A in self.frob)
        return BKModule(self.field, self.f, self.rank, frob, precision)

    def conjugate(self, changes: Sequence[SeriesMatrix]) -> "BKModule":
        """基变换 A_j ↦ C_j^{-1} A_j σ(C_{j+1})，C_j 为 F[[u]] 上的可逆矩阵"""
        if len(changes) != self.f:
            raise DimensionMismatch(f"需要 {self.f} 个基变换矩阵")
        frob = []
        for j in range(self.f):
            C_inv = changes[j].unimodular_inverse()
            nxt = changes[(j + 1) % self.f].sigma()
            frob.append((C_inv @ self.frob[j]) @ nxt)
        return BKModule.from_matrices(self.field, frob)

    def __repr__(self) -> str:
        return f"BKModule(p={self.field.p}, f={self.f}, rank={self.rank}, precision={self.precision})"


@dataclass(frozen=True)
class WeightProfile:
    """每个嵌入的权重多重集（升序）"""
    values: Tuple[Tuple[int, ...], ...]

    def __getitem__(self, j: int) -> Tuple[int, ...]:
        return self.values[j]

    def __len__(self) -> int:
        return len(self.values)

    def within(self, lo: int, hi: int) -> bool:
        return all(lo <= w <= hi for ws in self.values for w in ws)

    def sums(self) -> Tuple[int, ...]:
        return tuple(sum(ws) for ws in self.values)

    def as_lists(self) -> List[List[int]]:
        return [list(ws) for ws in self.values]


@dataclass(frozen=True)
class SubmoduleSpec:
    """每个嵌入一个 n×r 基矩阵，列张成饱和的 φ-稳定子模"""
    bases: Tuple[SeriesMatrix, ...]

    @property
    def rank(self) -> int:
        return self.bases[0].cols if self.bases else 0


@dataclass(frozen=True)
class AdaptedBasis:
    """分量 j 的适配基：φ(f_i) = u^{r_i} h_i，(f_i) 为 M_{τ_{j+1}} 的基，(h_i) 为 M_{τ_j} 的基"""
    component: int
    sources: SeriesMatrix
    targets: SeriesMatrix
    degrees: Tuple[int, ...]


@dataclass(frozen=True)
class SDVerdict:
    sd: bool
    filtered_iso: bool
    weights_in_range: bool
    certificate_found: bool
    certificate: Optional[Tuple[AdaptedBasis, ...]]
    reason: str


@dataclass(frozen=True)
class SubQuotient:
    sub: BKModule
    quotient: BKModule
    extension: BKModule
    completion: Tuple[SeriesMatrix, ...]


@dataclass(frozen=True)
class ExactnessReport:
    sub_sd: bool
    quot_sd: bool
    n_sd: bool
    strict: bool
    weights_additive: bool


# ==============================================================================
# 权重
# ==============================================================================
def weights(M: BKModule) -> WeightProfile:
    """Weight_{τ_j}(M) = A_j 的初等因子指数"""
    return WeightProfile(tuple(smith_exponents(A).exponents for A in M.frob))


def weights_via_filtration(M: BKModule) -> WeightProfile:
    """由 M^φ/u 上的商滤过分次维数计算权重"""
    out = []
    for A in M.frob:
        if M.rank == 0:
            out.append(())
            continue
        out.append(tuple(quotient_mod_u_filtration(Lattice(A)).multiset()))
    return WeightProfile(tuple(out))


def filtration_of_M(M: BKModule, i: int) -> Tuple[Lattice, ...]:
    """F^i M_{τ_j} = {m : φ(m) ∈ u^i M_{τ_{j-1}}}，按 j 返回"""
    return tuple(
        preimage_of_scaled_standard(M.matrix(j - 1), i, frobenius=True)
        for j in range(M.f)
    )


def component_space(M: BKModule, j: int) -> FilteredSpace:
    """M_{k,τ_j} = M_{τ_j}/u 上的滤过（F^i M 在模 u 下的像）"""
    field = M.field
    if M.rank == 0:
        return FilteredSpace(field, 0, 0, -1)
    A = M.matrix(j - 1)
    exps = smith_exponents(A).exponents
    lo, hi = min(exps), max(exps)
    steps = {i: filtration_image(A, i, frobenius=True) for i in range(lo + 1, hi + 1)}
    return FilteredSpace(field, M.rank, lo, hi, steps)


def phi_filtration_dims(M: BKModule, j: int) -> Dict[int, int]:
    """dim F^i(M^φ_{k,τ_j})，i 覆盖 [floor, conductor + 1]"""
    L = Lattice(M.matrix(j))
    fr = L.frame(high=L.conductor + 1)
    return _filtration_dims(L, range(L.floor, L.conductor + 2), fr)


# ==============================================================================
# 强可除性
# ==============================================================================
def _filtered_iso(M: BKModule, j: int) -> bool:
    """M_{k,τ_{j+1}} → M^φ_{k,τ_j} 是否为滤过同构"""
    phi_dims = phi_filtration_dims(M, j)
    space = component_space(M, j + 1)
    for i, d in phi_dims.items():
        if space.dim_at(i) != d:
            logger.debug(f"分量 {j}: 次数 {i} 处 dim F^i M_k = {space.dim_at(i)}，dim F^i M^φ_k = {d}")
            return False
    return True


def _adapted_certificate(M: BKModule, j: int) -> AdaptedBasis:
    """贪心构造 M_{τ_{j+1}} 的适配基并用 lift_adapted_basis 验证"""
    A = M.matrix(j)
    exps = smith_exponents(A).exponents
    lo, hi = min(exps), max(exps)
    GF = M.field.GF
    n = M.rank
    chosen: List[SeriesMatrix] = []
    degrees: List[int] = []
    span = GF.Zeros((0, n))
    for i in range(hi, lo - 1, -1):
        H = preimage_of_scaled_standard(A, i, frobenius=True, precision=M.precision).hermite()
        for t in range(n):
            col = H.column(t)
            red = col.coefficient_matrix(0)[:, 0]
            trial = np.concatenate([span, red[None, :]], axis=0)
            if _rank(trial) > span.shape[0]:
                span = trial
                chosen.append(col)
                degrees.append(i)
        if len(chosen) == n:
            break
    if len(chosen) != n:
        raise NotAGradedBasis(f"分量 {j}: 适配基只找到 {len(chosen)} 个向量")
    F = SeriesMatrix.hstack(chosen).truncate(M.precision)
    G = A @ F.sigma()
    lift = lift_adapted_basis(Lattice(A), [(G.column(t), degrees[t]) for t in range(n)])
    return AdaptedBasis(j, F, lift.standard, tuple(degrees))


def is_strongly_divisible(M: BKModule) -> SDVerdict:
    """判定强可除性：滤过同构 (a) 且全部权重落在 [0, p]

    同时用适配基证书独立给出条件 (a) 的第二种判定。
    """
    p = M.field.p
    if M.rank == 0:
        return SDVerdict(True, True, True, True, (), "秩为 0")
    profile = weights(M)
    in_range = profile.within(0, p)
    iso = all(_filtered_iso(M, j) for j in range(M.f))

    certs: List[AdaptedBasis] = []
    found = True
    for j in range(M.f):
        try:
            certs.append(_adapted_certificate(M, j))
        except NotAGradedBasis as e:
            logger.debug(f"分量 {j} 的适配基证书失败: {str(e)}")
            found = False
            break

    sd = iso and in_range
    if not iso:
        reason = "滤过比较映射不是同构"
    elif not in_range:
        reason = "weight out of range"
        logger.info(f"权重 {profile.as_lists()} 超出 [0, {p}]，不是强可除的")
    else:
        reason = "强可除"
    return SDVerdict(sd, iso, in_range, found, tuple(certs) if (sd and found) else None, reason)


# ==============================================================================
# 子商、正合性与扭
# ==============================================================================
def _complete_basis(S: SeriesMatrix) -> SeriesMatrix:
    """用标准向量把饱和子模的基补成 F[[u]]^n 的基"""
    n, r = S.shape
    GF = S.field.GF
    span = S.coefficient_matrix(0).T
    extra = []
    for e in range(n):
        trial = np.concatenate([span, GF.Identity(n)[e:e + 1]], axis=0)
        if _rank(trial) > span.shape[0]:
            span = trial
            extra.append(e)
    std = SeriesMatrix.identity(S.field, n, S.precision).select(cols=extra)
    return SeriesMatrix.hstack([S, std])


def sub_quotient(M: BKModule, S: SubmoduleSpec) -> SubQuotient:
    """取 φ-稳定饱和子模及其商

    Raises:
        NotSaturated: 某个 S_j 不饱和
        NotStable: A_j σ(S_{j+1}) 不落在 S_j 张成的空间里
    """
    if len(S.bases) != M.f:
        raise DimensionMismatch(f"子模需要 {M.f} 个分量，实际为 {len(S.bases)}")
    r = S.rank
    completion = []
    for j, B in enumerate(S.bases):
        if B.rows != M.rank or B.cols != r:
            raise DimensionMismatch(f"S_{j} 的形状 {B.shape} 不符")
        if B.valuation() < 0 or _rank(B.coefficient_matrix(0)) < r:
            raise NotSaturated(f"S_{j} 不是饱和子模")
        completion.append(_complete_basis(B.truncate(min(B.precision, M.precision))))
    ext = M.conjugate(completion)
    sub_frob, quot_frob = [], []
    for j, A in enumerate(ext.frob):
        lower_left = A.select(rows=range(r, M.rank), cols=range(r))
        if not lower_left.is_zero():
            raise NotStable(f"分量 {j}: 子模在 φ 下不稳定")
        sub_frob.append(A.select(rows=range(r), cols=range(r)))
        quot_frob.append(A.select(rows=range(r, M.rank), cols=range(r, M.rank)))
    sub = BKModule(M.field, M.f, r, tuple(sub_frob), ext.precision)
    quot = BKModule(M.field, M.f, M.rank - r, tuple(quot_frob), ext.precision)
    return SubQuotient(sub, quot, ext, tuple(completion))


def check_exact_sd(M_sub: BKModule, N: BKModule, M_quot: BKModule) -> ExactnessReport:
    """0 → M → N → P → 0 的强可除性与严格性

    N 取子模适配基下的形式（SubQuotient.extension），包含映射是前 r 个坐标，投影是后 n-r 个坐标。
    """
    r, n = M_sub.rank, N.rank
    if r + M_quot.rank != n:
        raise DimensionMismatch("子模与商的秩之和不等于 N 的秩")
    GF = N.field.GF
    incl = GF.Zeros((n, r))
    incl[np.arange(r), np.arange(r)] = 1
    proj = GF.Zeros((n - r, n))
    proj[np.arange(n - r), r + np.arange(n - r)] = 1

    strict = True
    for j in range(N.f):
        W_m = component_space(M_sub, j)
        W_n = component_space(N, j)
        W_p = component_space(M_quot, j)
        if not (is_strict_linear(incl, W_m, W_n) and is_strict_linear(proj, W_n, W_p)):
            strict = False
            break

    w_sub, w_n, w_quot = weights(M_sub), weights(N), weights(M_quot)
    additive = all(
        tuple(sorted(w_sub[j] + w_quot[j])) == w_n[j] for j in range(N.f)
    )
    return ExactnessReport(
        sub_sd=is_strongly_divisible(M_sub).sd,
        quot_sd=is_strongly_divisible(M_quot).sd,
        n_sd=is_strongly_divisible(N).sd,
        strict=strict,
        weights_additive=additive,
    )


def twist_unramified(M: BKModule, x) -> BKModule:
    """Hom(ur_x, M)：A_0 乘 x^{-1}，其他分量不变

    Raises:
        ZeroScalar: x = 0
    """
    x = M.field.elem(x)
    if int(x) == 0:
        raise ZeroScalar("非分歧扭的标量不能为零")
    frob = list(M.frob)
    frob[0] = frob[0].scale(M.field.one / x)
    return BKModule(M.field, M.f, M.rank, tuple(frob), M.precision)


def direct_sum(M: BKModule, P: BKModule) -> BKModule:
    if M.field != P.field or M.f != P.f:
        raise IncompatibleDegrees("直和的两个模必须有相同的系数域与 f")
    frob = tuple(SeriesMatrix.block_diagonal([A, B]) for A, B in zip(M.frob, P.frob))
    return BKModule(M.field, M.f, M.rank + P.rank, frob, min(M.precision, P.precision))


def _projective_points(field: FqField, n: int):
    """P^{n-1}(F) 的代表元：首个非零坐标为 1"""
    for lead in range(n):
        for tail in itertools.product(range(field.order), repeat=n - lead - 1):
            yield [0] * lead + [1] + list(tail)


def _constant_direction(w: SeriesMatrix) -> Optional[List[int]]:
    """若列向量 w = s·d（s 为级数，d 为常向量）则返回规范化的 d"""
    v = w.valuation()
    if v >= w.precision:
        return None
    lead = w.coefficient_matrix(v)[:, 0]
    a = int(np.flatnonzero(lead.view(np.ndarray))[0])
    d = lead / lead[a]
    const = SeriesMatrix.constant(w.field, d[:, None], w.precision - v)
    s = w.select(rows=[a])
    if not (w - const @ s).is_zero():
        return None
    return [int(c) for c in d]


def find_stable_lines(M: BKModule, max_candidates: Optional[int] = None) -> List[SubmoduleSpec]:
    """在小系数域上穷举常向量生成的 φ-稳定直线（启发式，不保证找全）"""
    n = M.rank
    count = (M.field.order ** n - 1) // (M.field.order - 1) if n else 0
    limit = max_candidates if max_candidates is not None else SELFTEST_CONFIG["STABLE_LINE_BUDGET"]
    logger.warning(f"稳定直线搜索是启发式的：只检查常向量生成的直线，候选 {count} 个")
    if count > limit:
        logger.warning(f"候选数 {count} 超过上限 {limit}，只检查前 {limit} 个")
    field = M.field
    found = []
    for v0 in itertools.islice(_projective_points(field, n), limit):
        vecs = [None] * M.f
        vecs[0] = v0
        cur = v0
        ok = True
        for j in range(M.f - 1, -1, -1):
            col = SeriesMatrix.constant(field, field.array(cur)[:, None], M.precision)
            direction = _constant_direction(M.frob[j] @ col)
            if direction is None:
                ok = False
                break
            if j == 0:
                ok = direction == v0
            else:
                vecs[j] = direction
                cur = direction
        if ok:
            bases = tuple(
                SeriesMatrix.constant(field, field.array(v)[:, None], M.precision) for v in vecs
            )
            found.append(SubmoduleSpec(bases))
    return found
