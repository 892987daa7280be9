"""
随机实例生成（测试与自检共用，全部由 numpy Generator 驱动以保证可复现）
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.algebra import FqField
from ..core.bkmod import BKModule, SubmoduleSpec, WeightProfile
from ..core.errors import BKError
from ..core.induct import RankOneData, UnramifiedExtension
from ..core.lattices import SeriesMatrix, _independent_rows
from ..core.sdinduced import InducedAmbient, InducedSubmodule
from .params_config import default_precision

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def field_for(p: int, m: int = 1) -> FqField:
    return FqField(p, m)


def random_polynomial_matrix(rng: np.random.Generator, field: FqField, rows: int, cols: int,
                             degree: int, precision: int) -> SeriesMatrix:
    """次数 < degree 的随机多项式矩阵"""
    if degree <= 0:
        return SeriesMatrix.zeros(field, rows, cols, precision)
    ints = rng.integers(0, field.order, size=(rows, cols, degree))
    return SeriesMatrix.from_polynomials(field, ints.tolist(), precision)


def random_invertible_constant(rng: np.random.Generator, field: FqField, n: int):
    GF = field.GF
    while True:
        mat = GF(rng.integers(0, field.order, size=(n, n)))
        if n == 0 or np.linalg.matrix_rank(mat) == n:
            return mat


def random_unimodular(rng: np.random.Generator, field: FqField, n: int, precision: int,
                      degree: int = 2) -> SeriesMatrix:
    """C_0·(I + u·R)，常数项可逆"""
    c0 = SeriesMatrix.constant(field, random_invertible_constant(rng, field, n), precision)
    tail = random_polynomial_matrix(rng, field, n, n, degree, precision).shift(1).truncate(precision)
    return c0 @ (SeriesMatrix.identity(field, n, precision) + tail)


def random_module(rng: np.random.Generator, field: FqField, f: int, rank: int, max_exponent: int,
                  precision: Optional[int] = None, degree: int = 2) -> Tuple[BKModule, WeightProfile]:
    """A_j = U_j diag(u^{r}) V_j，返回模及构造时已知的权重"""
    if precision is None:
        precision = default_precision(rank, field.p)
    frob, known = [], []
    for _ in range(f):
        r = sorted(int(x) for x in rng.integers(0, max_exponent + 1, size=rank))
        U = random_unimodular(rng, field, rank, precision, degree)
        V = random_unimodular(rng, field, rank, precision, degree)
        D = SeriesMatrix.monomial_diagonal(field, r, precision)
        frob.append(((U @ D) @ V).truncate(precision))
        known.append(tuple(r))
    return BKModule(field, f, rank, tuple(frob), precision), WeightProfile(tuple(known))


def random_base_change(rng: np.random.Generator, M: BKModule, degree: int = 2) -> BKModule:
    changes = [random_unimodular(rng, M.field, M.rank, M.precision, degree) for _ in range(M.f)]
    return M.conjugate(changes)


def random_rank_one(rng: np.random.Generator, field: FqField, f: int,
                    low: int = 0, high: Optional[int] = None) -> RankOneData:
    high = field.p if high is None else high
    x = int(field.random(rng, nonzero=True))
    return RankOneData(field, x, tuple(int(r) for r in rng.integers(low, high + 1, size=f)))


@dataclass(frozen=True)
class ExactSequence:
    """0 → sub → extension → quotient → 0，spec 给出 extension 中子模的基"""
    sub: BKModule
    quotient: BKModule
    extension: BKModule
    spec: SubmoduleSpec


def random_exact_sequence(rng: np.random.Generator, field: FqField, f: int, r_sub: int, r_quot: int,
                          max_exponent: int, precision: Optional[int] = None,
                          hide: bool = True) -> ExactSequence:
    """块上三角 [[A_sub, X], [0, A_quot]]，hide 时再做一次随机基变换"""
    n = r_sub + r_quot
    if precision is None:
        precision = default_precision(n, field.p)
    sub, _ = random_module(rng, field, f, r_sub, max_exponent, precision)
    quot, _ = random_module(rng, field, f, r_quot, max_exponent, precision)
    frob = []
    for j in range(f):
        X = random_polynomial_matrix(rng, field, r_sub, r_quot, 3, precision)
        zero = SeriesMatrix.zeros(field, r_quot, r_sub, precision)
        top = SeriesMatrix.hstack([sub.frob[j], X])
        bottom = SeriesMatrix.hstack([zero, quot.frob[j]])
        frob.append(SeriesMatrix.vstack([top, bottom]))
    N = BKModule(field, f, n, tuple(frob), precision)
    incl = SeriesMatrix.identity(field, n, precision).select(cols=range(r_sub))
    bases = [incl] * f
    if hide:
        changes = [random_unimodular(rng, field, n, precision) for _ in range(f)]
        N = N.conjugate(changes)
        bases = [C.unimodular_inverse() @ incl for C in changes]
    return ExactSequence(sub, quot, N, SubmoduleSpec(tuple(bases)))


def random_irreducible_ambient(rng: np.random.Generator, p: int, f_k: int, f_l: int,
                               precision: Optional[int] = None, attempts: int = 200) -> InducedAmbient:
    """随机选 r_θ ∈ [0, p] 直到诱导表示不可约"""
    field = field_for(p, f_l)
    ext = UnramifiedExtension(f_k, f_l)
    for _ in range(attempts):
        exps = tuple(int(r) for r in rng.integers(0, p + 1, size=f_l))
        ambient = InducedAmbient(ext, exps, field, precision)
        if ambient.is_irreducible():
            return ambient
    raise BKError(f"{attempts} 次尝试都没有得到不可约的诱导 (p={p}, f_k={f_k}, f_l={f_l})")


def random_subspace(rng: np.random.Generator, field: FqField, d: int):
    k = int(rng.integers(0, d + 1))
    return field.GF(rng.integers(0, field.order, size=(k, d)))


def random_induced_submodule(rng: np.random.Generator, ambient: InducedAmbient) -> InducedSubmodule:
    """M_s = V_s + u·(f_*N)_s，V_s 随机"""
    spaces = [random_subspace(rng, ambient.field, ambient.degree) for _ in range(ambient.f_k)]
    return InducedSubmodule.from_subspaces(ambient, spaces)


def _span(GF, blocks: List, d: int):
    blocks = [B for B in blocks if B.shape[0]]
    if not blocks:
        return GF.Zeros((0, d))
    return _independent_rows(np.concatenate(blocks, axis=0), GF)


def _source(ambient: InducedAmbient, s: int, b: int) -> int:
    """分量 s 的坐标 b 在 φ 下的来源坐标（位于分量 s+1）"""
    return ambient.position(ambient.theta(s, b) + 1)[1]


def sd_closure(ambient: InducedAmbient, spaces: Sequence) -> List:
    """把常向量空间 V_s 扩大到满足两个显式条件的最小配置

    三种扩张都是单调的，不动点即为所求：
      - V_s 对按 r_θ mod p 分类的坐标投影封闭；
      - V_{s+1} 经 φ 后 r_θ = 0 的常数部分落在 V_s 中；
      - V_{s+1} 包含所有 c：c 在 r_θ = 0 的来源坐标上为零，且 φ(u·c)/u^{p+1} 的常数部分落在 V_s 中。
    """
    GF = ambient.field.GF
    d, f_k = ambient.degree, ambient.f_k
    r = ambient.exponents
    V = [_span(GF, [GF(np.asarray(S, dtype=np.int64).reshape(-1, d))], d) for S in spaces]
    while True:
        before = [v.shape[0] for v in V]
        for s in range(f_k):
            t = (s + 1) % f_k
            extra = [V[s]]
            for coords in ambient.residue_classes(s).values():
                proj = GF.Zeros(V[s].shape)
                proj[:, coords] = V[s][:, coords]
                extra.append(proj)
            zeros = [b for b in range(d) if r[ambient.theta(s, b)] == 0]
            if zeros and V[t].shape[0]:
                image = GF.Zeros((V[t].shape[0], d))
                for b in zeros:
                    image[:, b] = V[t][:, _source(ambient, s, b)]
                extra.append(image)
            V[s] = _span(GF, extra, d)

            lifted = [V[t]]
            for b in range(d):
                if r[ambient.theta(s, b)] >= 2:
                    e = GF.Zeros((1, d))
                    e[0, _source(ambient, s, b)] = 1
                    lifted.append(e)
            ones = [b for b in range(d) if r[ambient.theta(s, b)] == 1]
            if ones and V[s].shape[0]:
                outside = [b for b in range(d) if b not in ones]
                combos = V[s]
                if outside:
                    kernel = V[s][:, outside].T.null_space()
                    combos = kernel @ V[s] if kernel.shape[0] else GF.Zeros((0, d))
                if combos.shape[0]:
                    pulled = GF.Zeros((combos.shape[0], d))
                    for b in ones:
                        pulled[:, _source(ambient, s, b)] = combos[:, b]
                    lifted.append(pulled)
            V[t] = _span(GF, lifted, d)
        if [v.shape[0] for v in V] == before:
            logger.debug(f"闭包后各分量常向量维数 {before}")
            return V


def random_sd_submodule(rng: np.random.Generator, ambient: InducedAmbient) -> InducedSubmodule:
    """随机初始空间的闭包；p > 2 且环境不可约时总是强可除的"""
    seeds = [random_subspace(rng, ambient.field, ambient.degree) for _ in range(ambient.f_k)]
    return InducedSubmodule.from_subspaces(ambient, sd_closure(ambient, seeds))


def random_sd_submodules(rng: np.random.Generator, ambient: InducedAmbient, count: int) -> List[InducedSubmodule]:
    return [random_sd_submodule(rng, ambient) for _ in range(count)]
