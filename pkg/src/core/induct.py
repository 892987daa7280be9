"""
非分歧诱导与限制、秩一正规形及其特征
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from .algebra import FqField
from .bkmod import BKModule
from .errors import IncompatibleDegrees, InsufficientPrecision, NotRankOne, ZeroScalar
from .inert import TameCharacter
from .lattices import SeriesMatrix
from ..utils.params_config import default_precision

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnramifiedExtension:
    """剩余域扩张 l/k，f_k | f_l"""
    f_k: int
    f_l: int

    def __post_init__(self):
        if self.f_k < 1 or self.f_l < 1 or self.f_l % self.f_k:
            raise IncompatibleDegrees(f"f_k = {self.f_k} 必须整除 f_l = {self.f_l}")

    @property
    def degree(self) -> int:
        return self.f_l // self.f_k

    def check_field(self, field: FqField):
        if not field.contains_degree(self.f_l):
            raise IncompatibleDegrees(f"系数域 F_{field.order} 不包含 F_{{p^{self.f_l}}}")


@dataclass(frozen=True)
class RankOneData:
    """φ(1) = x·u^{r_0} e_0 + Σ_{j>0} u^{r_j} e_j"""
    field: FqField
    x: int
    exponents: Tuple[int, ...]

    def __post_init__(self):
        x = int(self.field.elem(self.x))
        if x == 0:
            raise ZeroScalar("秩一模的标量 x 不能为零")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "exponents", tuple(int(r) for r in self.exponents))

    @property
    def f(self) -> int:
        return len(self.exponents)


def restrict(ext: UnramifiedExtension, M: BKModule) -> BKModule:
    """f^*M：分量 θ 复制分量 θ|_k"""
    if M.f != ext.f_k:
        raise IncompatibleDegrees(f"模的 f = {M.f} 与 f_k = {ext.f_k} 不一致")
    ext.check_field(M.field)
    frob = tuple(M.frob[t % ext.f_k] for t in range(ext.f_l))
    return BKModule(M.field, ext.f_l, M.rank, frob, M.precision)


def induce(ext: UnramifiedExtension, N: BKModule) -> BKModule:
    """f_*N：分量 s 由 θ = s + f_k·b（b = 0, ..., d-1）各块堆叠

    s < f_k - 1 时为块对角 A_θ；s = f_k - 1 时块 (b, b+1 mod d) 为 A_θ。
    """
    if N.f != ext.f_l:
        raise IncompatibleDegrees(f"模的 f = {N.f} 与 f_l = {ext.f_l} 不一致")
    d, r = ext.degree, N.rank
    field = N.field
    frob = []
    for s in range(ext.f_k):
        blocks = [N.frob[s + ext.f_k * b] for b in range(d)]
        if s < ext.f_k - 1 or d == 1:
            frob.append(SeriesMatrix.block_diagonal(blocks))
            continue
        low = min(min(B.low for B in blocks), N.precision)
        mat = SeriesMatrix.zeros(field, r * d, r * d, N.precision, low)
        for b, B in enumerate(blocks):
            c = (b + 1) % d
            mat.coeffs[b * r:(b + 1) * r, c * r:(c + 1) * r, :] = B.window(low, N.precision)
        frob.append(mat)
    return BKModule(field, ext.f_k, r * d, tuple(frob), N.precision)


def rank_one_module(field: FqField, data: RankOneData, precision: Optional[int] = None) -> BKModule:
    if precision is None:
        precision = default_precision(1, field.p)
    frob = []
    for j, r in enumerate(data.exponents):
        c = data.x if j == 0 else 1
        frob.append(SeriesMatrix.from_polynomials(field, [[[0] * (r - min(r, 0)) + [c]]], precision, low=min(r, 0)))
    return BKModule(field, len(frob), 1, tuple(frob), precision)


def rank_one_normal_form(M: BKModule) -> RankOneData:
    """(x, (r_j))：r_j 为 A_j 的赋值，x 为各分量首项系数之积（φ-共轭不变）"""
    if M.rank != 1:
        raise NotRankOne(f"模的秩为 {M.rank}")
    x = M.field.one
    exps = []
    for j, A in enumerate(M.frob):
        s = A.entry(0, 0)
        if s.is_zero():
            raise InsufficientPrecision(f"A_{j} 在精度 {A.precision} 内为零")
        exps.append(s.valuation)
        x = x * s.leading_coefficient()
    return RankOneData(M.field, int(x), tuple(exps))


def character_of_rank_one(data: RankOneData) -> TameCharacter:
    """ψ_x ∏ ω_θ^{-r_θ} = ψ_x ω_{θ_0}^{-e}，e = Σ r_i p^i"""
    p = data.field.p
    e = sum(r * p ** i for i, r in enumerate(data.exponents))
    return TameCharacter(p, data.f, e, data.x)


def unramified_twist_character(chi: TameCharacter, y, field: FqField) -> TameCharacter:
    """Hom(ur_y, -) 对特征的作用：指数不变，非分歧部分 x ↦ x / y"""
    y = field.elem(y)
    if int(y) == 0:
        raise ZeroScalar("非分歧扭的标量不能为零")
    x = field.elem(chi.unramified) / y
    return TameCharacter(chi.p, chi.level, chi.exponent, int(x))
