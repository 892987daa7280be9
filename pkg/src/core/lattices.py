"""
F[[u]]-格的正规形与滤过工具

级数矩阵统一存成稠密张量 coeffs[行, 列, 次数 - low]，全部运算归结为有限域上的线性代数。
"""
import logging
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from math import ceil
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import galois
import numpy as np

from .algebra import FqField, TruncatedLaurentSeries, power_series_inverse
from ..utils.params_config import LATTICE_CONFIG
from .errors import (
    DimensionMismatch,
    InsufficientPrecision,
    NotAGradedBasis,
    NotStable,
    RangeTooSmall,
)

logger = logging.getLogger(__name__)


# ==============================================================================
# 有限域线性代数小工具
# ==============================================================================
def _rank(mat) -> int:
    if mat.size == 0:
        return 0
    return int(np.linalg.matrix_rank(mat))


def _left_kernel(mat, GF) -> galois.FieldArray:
    """{x : x·mat = 0} 的一组基（按行）"""
    rows, cols = mat.shape
    if rows == 0:
        return GF.Zeros((0, 0))
    if cols == 0:
        return GF.Identity(rows)
    return mat.left_null_space()


def _independent_rows(mat, GF) -> galois.FieldArray:
    """行约化后去掉零行"""
    if mat.shape[0] == 0 or mat.shape[1] == 0:
        return GF.Zeros((0, mat.shape[1]))
    rref = mat.row_reduce()
    keep = rref.view(np.ndarray).any(axis=1)
    return rref[keep]


def _toeplitz_stack(v: galois.FieldArray) -> galois.FieldArray:
    """v 形状 (k, W)，返回 T[i, t, b] = v[i, t - b]（t < b 处为 0）"""
    GF = type(v)
    k, W = v.shape
    ints = v.view(np.ndarray)
    diff = np.arange(W)[:, None] - np.arange(W)[None, :]
    table = np.where(diff >= 0, ints[:, np.clip(diff, 0, W - 1)], 0)
    return GF(table)


def _conv_outer(c: galois.FieldArray, row: galois.FieldArray) -> galois.FieldArray:
    """out[i, j] = c[i] * row[j]（模 u^W 的级数乘积）"""
    n, W = c.shape
    m = row.shape[0]
    T = _toeplitz_stack(c).reshape(n * W, W)
    return (T @ row.T).reshape(n, W, m).transpose(0, 2, 1)


def _conv_matvec(mat: galois.FieldArray, v: galois.FieldArray) -> galois.FieldArray:
    """out[a] = Σ_i mat[a, i] * v[i]（模 u^W）"""
    a, i, W = mat.shape
    Tv = _toeplitz_stack(v).transpose(0, 2, 1).reshape(i * W, W)
    return mat.reshape(a, i * W) @ Tv


def _identity_tensor(GF, n: int, W: int) -> galois.FieldArray:
    out = GF.Zeros((n, n, W))
    if W > 0:
        out[np.arange(n), np.arange(n), 0] = 1
    return out


# ==============================================================================
# 级数矩阵
# ==============================================================================
@dataclass(frozen=True, eq=False)
class SeriesMatrix:
    """以截断 Laurent 级数为元素的矩阵，共用一个精度

    coeffs[i, j, k] 是 (i, j) 元素中 u^{low + k} 的系数，k < precision - low。
    """
    field: FqField
    low: int
    coeffs: galois.FieldArray
    precision: int

    def __post_init__(self):
        coeffs = self.coeffs
        if not isinstance(coeffs, galois.FieldArray):
            coeffs = self.field.GF(np.asarray(coeffs, dtype=np.int64))
        if coeffs.ndim != 3:
            raise DimensionMismatch(f"系数张量必须是三维，实际为 {coeffs.ndim} 维")
        low = min(int(self.low), int(self.precision))
        width = int(self.precision) - low
        if coeffs.shape[2] > width:
            coeffs = coeffs[:, :, :width]
        elif coeffs.shape[2] < width:
            padded = self.field.zeros((coeffs.shape[0], coeffs.shape[1], width))
            padded[:, :, :coeffs.shape[2]] = coeffs
            coeffs = padded
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "precision", int(self.precision))

    # ------------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------------
    @classmethod
    def zeros(cls, field: FqField, rows: int, cols: int, precision: int, low: int = 0) -> "SeriesMatrix":
        return cls(field, low, field.zeros((rows, cols, max(precision - low, 0))), precision)

    @classmethod
    def identity(cls, field: FqField, n: int, precision: int) -> "SeriesMatrix":
        return cls.monomial_diagonal(field, [0] * n, precision)

    @classmethod
    def monomial_diagonal(cls, field: FqField, exponents: Sequence[int], precision: int) -> "SeriesMatrix":
        """diag(u^{r_1}, ..., u^{r_n})"""
        n = len(exponents)
        low = min(list(exponents) + [precision])
        mat = cls.zeros(field, n, n, precision, low)
        for i, r in enumerate(exponents):
            if r < precision:
                mat.coeffs[i, i, r - low] = 1
        return mat

    @classmethod
    def constant(cls, field: FqField, matrix, precision: int) -> "SeriesMatrix":
        """常数矩阵（整数按 galois 整数表示解释）"""
        arr = matrix if isinstance(matrix, galois.FieldArray) else field.array(matrix)
        if arr.ndim != 2:
            raise DimensionMismatch("常数矩阵必须是二维")
        mat = cls.zeros(field, arr.shape[0], arr.shape[1], precision)
        if precision > 0:
            mat.coeffs[:, :, 0] = arr
        return mat

    @classmethod
    def from_polynomials(cls, field: FqField, entries, precision: int, low: int = 0) -> "SeriesMatrix":
        """由嵌套列表构造：entries[i][j] 是从 u^low 开始的升幂系数列表"""
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        mat = cls.zeros(field, rows, cols, precision, low)
        width = mat.coeffs.shape[2]
        for i, row in enumerate(entries):
            if len(row) != cols:
                raise DimensionMismatch(f"第 {i} 行长度为 {len(row)}，应为 {cols}")
            for j, poly in enumerate(row):
                values = [int(field.elem(int(c))) for c in poly][:width]
                if values:
                    mat.coeffs[i, j, :len(values)] = field.GF(values)
        return mat

    @classmethod
    def from_series(cls, field: FqField, entries: Sequence[Sequence[TruncatedLaurentSeries]],
                    precision: Optional[int] = None) -> "SeriesMatrix":
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        flat = [s for row in entries for s in row]
        if precision is None:
            precision = min((s.precision for s in flat), default=0)
        low = min([s.lowest_exponent for s in flat] + [precision])
        mat = cls.zeros(field, rows, cols, precision, low)
        for i, row in enumerate(entries):
            for j, s in enumerate(row):
                if s.precision < precision:
                    raise InsufficientPrecision(f"元素 ({i}, {j}) 的精度 {s.precision} 低于 {precision}")
                mat.coeffs[i, j, :] = s.dense(low, precision)
        return mat

    @staticmethod
    def hstack(mats: Sequence["SeriesMatrix"]) -> "SeriesMatrix":
        return SeriesMatrix._stack(mats, axis=1)

    @staticmethod
    def vstack(mats: Sequence["SeriesMatrix"]) -> "SeriesMatrix":
        return SeriesMatrix._stack(mats, axis=0)

    @staticmethod
    def _stack(mats: Sequence["SeriesMatrix"], axis: int) -> "SeriesMatrix":
        if not mats:
            raise DimensionMismatch("至少需要一个矩阵")
        field = mats[0].field
        prec = min(m.precision for m in mats)
        low = min(min(m.low for m in mats), prec)
        parts = [m.window(low, prec) for m in mats]
        return SeriesMatrix(field, low, np.concatenate(parts, axis=axis), prec)

    @staticmethod
    def block_diagonal(mats: Sequence["SeriesMatrix"]) -> "SeriesMatrix":
        field = mats[0].field
        prec = min(m.precision for m in mats)
        low = min(min(m.low for m in mats), prec)
        rows = sum(m.rows for m in mats)
        cols = sum(m.cols for m in mats)
        out = SeriesMatrix.zeros(field, rows, cols, prec, low)
        r = c = 0
        for m in mats:
            out.coeffs[r:r + m.rows, c:c + m.cols, :] = m.window(low, prec)
            r += m.rows
            c += m.cols
        return out

    # ------------------------------------------------------------------
    # 基本属性
    # ------------------------------------------------------------------
    @property
    def rows(self) -> int:
        return self.coeffs.shape[0]

    @property
    def cols(self) -> int:
        return self.coeffs.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def valuation(self) -> int:
        """全部元素的最小赋值；精度内为零时返回精度"""
        ints = self.coeffs.view(np.ndarray)
        if ints.size == 0:
            return self.precision
        nz = np.flatnonzero(ints.any(axis=(0, 1)))
        if len(nz) == 0:
            return self.precision
        return self.low + int(nz[0])

    def is_zero(self) -> bool:
        return self.valuation() >= self.precision

    def entry(self, i: int, j: int) -> TruncatedLaurentSeries:
        return TruncatedLaurentSeries(self.field, self.low, self.coeffs[i, j, :], self.precision)

    def entry_valuation(self, i: int, j: int) -> int:
        return self.entry(i, j).valuation

    def window(self, lo: int, hi: int) -> galois.FieldArray:
        """次数 [lo, hi) 上的系数张量，形状 (rows, cols, hi - lo)

        Raises:
            InsufficientPrecision: hi 超过精度
        """
        if hi > self.precision:
            raise InsufficientPrecision(f"需要模 u^{hi} 的系数，但精度只有 {self.precision}")
        width = max(hi - lo, 0)
        out = self.field.zeros((self.rows, self.cols, width))
        src_lo = max(lo, self.low)
        if hi > src_lo:
            out[:, :, src_lo - lo:hi - lo] = self.coeffs[:, :, src_lo - self.low:hi - self.low]
        return out

    def coefficient_matrix(self, k: int) -> galois.FieldArray:
        """u^k 的系数矩阵"""
        return self.window(k, k + 1)[:, :, 0]

    def column(self, j: int) -> "SeriesMatrix":
        return SeriesMatrix(self.field, self.low, self.coeffs[:, j:j + 1, :], self.precision)

    def select(self, rows: Optional[Sequence[int]] = None, cols: Optional[Sequence[int]] = None) -> "SeriesMatrix":
        coeffs = self.coeffs
        if rows is not None:
            coeffs = coeffs[list(rows)]
        if cols is not None:
            coeffs = coeffs[:, list(cols)]
        return SeriesMatrix(self.field, self.low, coeffs, self.precision)

    def transpose(self) -> "SeriesMatrix":
        return SeriesMatrix(self.field, self.low, self.coeffs.transpose(1, 0, 2), self.precision)

    def truncate(self, precision: int) -> "SeriesMatrix":
        if precision > self.precision:
            raise InsufficientPrecision(f"不能把精度从 {self.precision} 扩大到 {precision}")
        return SeriesMatrix(self.field, self.low, self.coeffs, precision)

    def exact_with_precision(self, precision: int) -> "SeriesMatrix":
        """把已知为精确多项式的数据重新截断/补零到给定精度"""
        return SeriesMatrix(self.field, self.low, self.coeffs, precision)

    # ------------------------------------------------------------------
    # 运算
    # ------------------------------------------------------------------
    def __add__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"形状不一致: {self.shape} 与 {other.shape}")
        prec = min(self.precision, other.precision)
        low = min(self.low, other.low, prec)
        return SeriesMatrix(self.field, low, self.window(low, prec) + other.window(low, prec), prec)

    def __neg__(self) -> "SeriesMatrix":
        return SeriesMatrix(self.field, self.low, -self.coeffs, self.precision)

    def __sub__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        return self + (-other)

    def scale(self, c) -> "SeriesMatrix":
        return SeriesMatrix(self.field, self.low, self.coeffs * self.field.elem(c), self.precision)

    def shift(self, k: int) -> "SeriesMatrix":
        """乘以 u^k"""
        return SeriesMatrix(self.field, self.low + k, self.coeffs, self.precision + k)

    def column_shift(self, shifts: Sequence[int]) -> "SeriesMatrix":
        """第 j 列乘以 u^{shifts[j]}"""
        if len(shifts) != self.cols:
            raise DimensionMismatch("列移位个数与列数不一致")
        if self.cols == 0:
            return self
        base = min(shifts)
        width = self.coeffs.shape[2]
        out = self.field.zeros(self.coeffs.shape)
        for j, s in enumerate(shifts):
            off = s - base
            if off < width:
                out[:, j, off:] = self.coeffs[:, j, :width - off]
        return SeriesMatrix(self.field, self.low + base, out, self.precision + base)

    def __matmul__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"无法相乘: {self.shape} @ {other.shape}")
        va, vb = self.valuation(), other.valuation()
        prec = min(self.precision + vb, other.precision + va)
        low = va + vb
        n, m, k = self.rows, self.cols, other.cols
        L = prec - low
        if L <= 0 or n == 0 or m == 0 or k == 0:
            return SeriesMatrix.zeros(self.field, n, k, prec, min(low, prec))
        Aw = self.window(va, va + L)
        Bi = other.window(vb, vb + L).view(np.ndarray)
        diff = np.arange(L)[None, :] - np.arange(L)[:, None]  # [a, t] = t - a
        big = np.where(diff >= 0, Bi[:, :, np.clip(diff, 0, L - 1)], 0)  # (m, k, a, t)
        big = big.transpose(0, 2, 1, 3).reshape(m * L, k * L)
        prod = Aw.reshape(n, m * L) @ self.field.GF(big)
        return SeriesMatrix(self.field, low, prod.reshape(n, k, L), prec)

    def sigma(self) -> "SeriesMatrix":
        """逐元素代入 u ↦ u^p"""
        p = self.field.p
        ints = self.coeffs.view(np.ndarray)
        spread = np.zeros(ints.shape[:2] + (ints.shape[2] * p,), dtype=np.int64)
        spread[:, :, ::p] = ints
        return SeriesMatrix(self.field, p * self.low, self.field.GF(spread), p * self.precision)

    def frobenius_coefficients(self, j: int = 1) -> "SeriesMatrix":
        """系数逐项作用 x ↦ x^{p^j}"""
        return SeriesMatrix(self.field, self.low, self.coeffs ** (self.field.p ** (j % self.field.m)), self.precision)

    def equals(self, other: "SeriesMatrix") -> bool:
        """在共同精度内是否相等"""
        return self.shape == other.shape and (self - other).is_zero()

    def is_integral(self) -> bool:
        return self.valuation() >= 0

    def unimodular_inverse(self) -> "SeriesMatrix":
        """F[[u]] 上可逆矩阵的逆，保持精度

        Raises:
            DimensionMismatch: 非方阵或常数项不可逆
        """
        n = self.rows
        if n != self.cols:
            raise DimensionMismatch("只有方阵可以求逆")
        if self.valuation() < 0:
            raise DimensionMismatch("矩阵不是整的")
        N = self.precision
        if n == 0 or N <= 0:
            return SeriesMatrix.zeros(self.field, n, n, N)
        A = self.window(0, N)
        A0 = A[:, :, 0]
        if _rank(A0) < n:
            raise DimensionMismatch("常数项不可逆，矩阵不是幺模的")
        A0_inv = np.linalg.inv(A0)
        X = self.field.zeros((n, n, N))
        X[:, :, 0] = A0_inv
        for k in range(1, N):
            acc = self.field.zeros((n, n))
            for j in range(1, k + 1):
                acc = acc + A[:, :, j] @ X[:, :, k - j]
            X[:, :, k] = -(A0_inv @ acc)
        return SeriesMatrix(self.field, 0, X, N)

    def inverse(self) -> "SeriesMatrix":
        """F((u)) 上的逆，通过 Smith 分解 A = U·diag(u^r)·V 得到"""
        smith = smith_exponents(self)
        if self.rows == 0:
            return self
        neg = [-r for r in smith.exponents]
        D = SeriesMatrix.monomial_diagonal(self.field, neg, smith.V_inv.precision - min(neg))
        return (smith.V_inv @ D) @ smith.U_inv

    def det_valuation(self) -> int:
        return sum(smith_exponents(self).exponents)

    def __repr__(self) -> str:
        return f"SeriesMatrix({self.rows}x{self.cols}, low={self.low}, precision={self.precision})"


# ==============================================================================
# Smith 正规形
# ==============================================================================
@dataclass(frozen=True)
class SmithForm:
    """A = U · diag(u^{r_i}) · V，U、V 在 F[[u]] 上可逆"""
    exponents: Tuple[int, ...]
    U: SeriesMatrix
    V: SeriesMatrix
    U_inv: SeriesMatrix
    V_inv: SeriesMatrix


def smith_exponents(A: SeriesMatrix) -> SmithForm:
    """计算方阵 A 的初等因子指数及幺模见证

    每一步在剩余子矩阵中选赋值最小的主元（同赋值时取行号最小、再取列号最小），
    把主元归一化为 u^d 后消去所在行列。

    Args:
        A: 方阵

    Returns:
        SmithForm，指数升序；见证矩阵在模 u^{N - r_max} 下有效

    Raises:
        InsufficientPrecision: 主元赋值无法在精度内确认
    """
    n = A.rows
    if n != A.cols:
        raise DimensionMismatch(f"Smith 形式需要方阵，实际为 {A.shape}")
    field = A.field
    GF = field.GF
    if n == 0:
        empty = SeriesMatrix.zeros(field, 0, 0, A.precision)
        return SmithForm((), empty, empty, empty, empty)

    v0 = A.valuation()
    N = A.precision
    if v0 >= N:
        raise InsufficientPrecision(f"矩阵在精度 {N} 内为零，行列式赋值无法确定")
    W = N - v0
    M = A.window(v0, N)
    R = _identity_tensor(GF, n, W)
    R_inv = _identity_tensor(GF, n, W)
    C = _identity_tensor(GF, n, W)
    C_inv = _identity_tensor(GF, n, W)
    degrees: List[int] = []

    for k in range(n):
        sub = M[k:, k:, :].view(np.ndarray) != 0
        if not sub.any():
            raise InsufficientPrecision(
                f"第 {k} 个主元在模 u^{N} 内为零，需要更高精度"
            )
        first = np.where(sub.any(axis=2), sub.argmax(axis=2), W)
        d = int(first.min())
        i0, j0 = np.argwhere(first == d)[0]
        pr, pc = k + int(i0), k + int(j0)
        logger.debug(f"Smith 第 {k} 步: 主元 ({pr}, {pc})，赋值 {d + v0}")

        if pr != k:
            M[[k, pr]] = M[[pr, k]]
            R[[k, pr]] = R[[pr, k]]
            R_inv[:, [k, pr]] = R_inv[:, [pr, k]]
        if pc != k:
            M[:, [k, pc]] = M[:, [pc, k]]
            C[:, [k, pc]] = C[:, [pc, k]]
            C_inv[[k, pc]] = C_inv[[pc, k]]

        # 主元行乘单位的逆，使主元恰为 u^d
        w = GF.Zeros(W)
        w[:W - d] = power_series_inverse(field, M[k, k, d:], W - d)
        w_inv = power_series_inverse(field, w, W)
        M[k] = _conv_outer(w[None, :], M[k])[0]
        R[k] = _conv_outer(w[None, :], R[k])[0]
        R_inv[:, k] = _conv_outer(R_inv[:, k], w_inv[None, :])[:, 0]

        # 行消去
        c = GF.Zeros((n, W))
        c[:, :W - d] = M[:, k, d:]
        c[k] = 0
        if c.view(np.ndarray).any():
            M = M - _conv_outer(c, M[k])
            R = R - _conv_outer(c, R[k])
            R_inv[:, k] = R_inv[:, k] + _conv_matvec(R_inv, c)

        # 列消去：主元列此时只剩主元
        c = GF.Zeros((n, W))
        c[:, :W - d] = M[k, :, d:]
        c[k] = 0
        if c.view(np.ndarray).any():
            M[k] = 0
            M[k, k, d] = 1
            C = C - _conv_outer(C[:, k], c)
            C_inv[k] = C_inv[k] + _conv_matvec(C_inv.transpose(1, 0, 2), c)

        degrees.append(d)

    witness_prec = W - max(degrees)
    exponents = tuple(d + v0 for d in degrees)

    def _wrap(t):
        return SeriesMatrix(field, 0, t, W).truncate(witness_prec)

    return SmithForm(exponents, _wrap(R_inv), _wrap(C_inv), _wrap(R), _wrap(C))


# ==============================================================================
# 分次维数与有限维滤过空间
# ==============================================================================
@dataclass(frozen=True)
class FilteredDims:
    """分次维数 i ↦ dim gr^i"""
    dims: Dict[int, int]

    def total(self) -> int:
        return sum(self.dims.values())

    def multiset(self) -> List[int]:
        """按次数展开成升序多重集"""
        out: List[int] = []
        for i in sorted(self.dims):
            out.extend([i] * self.dims[i])
        return out

    def weighted_sum(self) -> int:
        return sum(i * d for i, d in self.dims.items())

    def support(self) -> List[int]:
        return sorted(i for i, d in self.dims.items() if d)

    @classmethod
    def from_multiset(cls, values: Iterable[int]) -> "FilteredDims":
        dims: Dict[int, int] = {}
        for v in values:
            dims[v] = dims.get(v, 0) + 1
        return cls(dims)


@dataclass(frozen=True)
class WeightSumComparison:
    f_sum: int
    g_sum: int
    ordering: int  # -1: f < g，0: 相等，1: f > g
    equal: bool


def graded_weight_sum_compare(f_dims: FilteredDims, g_dims: FilteredDims) -> WeightSumComparison:
    """比较两个滤过的加权和 Σ i·dim gr^i

    Raises:
        DimensionMismatch: 两个滤过的总维数不同
    """
    if f_dims.total() != g_dims.total():
        raise DimensionMismatch(f"总维数不一致: {f_dims.total()} 与 {g_dims.total()}")
    fs, gs = f_dims.weighted_sum(), g_dims.weighted_sum()
    ordering = (fs > gs) - (fs < gs)
    return WeightSumComparison(fs, gs, ordering, fs == gs)


@dataclass
class FilteredSpace:
    """F^dim 上的递减滤过；次数 ≤ low 时为全空间，次数 > high 时为零"""
    field: FqField
    dim: int
    low: int
    high: int
    steps: Dict[int, galois.FieldArray] = dc_field(default_factory=dict)

    def subspace(self, i: int) -> galois.FieldArray:
        GF = self.field.GF
        if i <= self.low:
            return GF.Identity(self.dim)
        if i > self.high:
            return GF.Zeros((0, self.dim))
        return self.steps[i]

    def dim_at(self, i: int) -> int:
        return _rank(self.subspace(i))

    def graded_dims(self) -> FilteredDims:
        dims = {}
        for i in range(self.low, self.high + 1):
            d = self.dim_at(i) - self.dim_at(i + 1)
            if d:
                dims[i] = d
        return FilteredDims(dims)


def _degree_range(*spaces: FilteredSpace) -> range:
    return range(min(s.low for s in spaces), max(s.high for s in spaces) + 2)


def _image(T, basis):
    """basis 的行向量在 T 下的像（按行）"""
    if basis.shape[0] == 0:
        return type(T).Zeros((0, T.shape[0]))
    return (T @ basis.T).T


def _sum_rank(*mats) -> int:
    parts = [m for m in mats if m.shape[0]]
    if not parts:
        return 0
    return _rank(np.concatenate(parts, axis=0))


def is_strict_linear(T, source: FilteredSpace, target: FilteredSpace) -> bool:
    """有限维滤过空间之间线性映射的严格性

    T 作用在列向量上，形状 (target.dim, source.dim)。
    严格当且仅当对每个 i 都有 T(F^i M) = F^i N ∩ T(M)；不保持滤过时返回 False。
    """
    if T.shape != (target.dim, source.dim):
        raise DimensionMismatch(f"映射形状 {T.shape} 与滤过空间维数不符")
    image_all = _image(T, source.subspace(source.low))
    r_image = _rank(image_all)
    for i in _degree_range(source, target):
        img = _image(T, source.subspace(i))
        tgt = target.subspace(i)
        r_img = _rank(img)
        r_tgt = _rank(tgt)
        if _sum_rank(img, tgt) != r_tgt:
            return False
        meet = r_tgt + r_image - _sum_rank(tgt, image_all)
        if meet != r_img:
            logger.debug(f"次数 {i} 处不严格: dim T(F^i) = {r_img}，dim(F^i ∩ im) = {meet}")
            return False
    return True


def graded_sequence_exact(T, source: FilteredSpace, target: FilteredSpace) -> bool:
    """0 → gr(ker) → gr(M) → gr(N) → gr(coker) → 0 是否正合（维数检验）"""
    if T.shape != (target.dim, source.dim):
        raise DimensionMismatch(f"映射形状 {T.shape} 与滤过空间维数不符")
    image_all = _image(T, source.subspace(source.low))
    r_image = _rank(image_all)

    def ker_dim(i):
        basis = source.subspace(i)
        return _rank(basis) - _rank(_image(T, basis))

    def coker_dim(i):
        return _sum_rank(target.subspace(i), image_all) - r_image

    for i in _degree_range(source, target):
        if _sum_rank(_image(T, source.subspace(i)), target.subspace(i)) != _rank(target.subspace(i)):
            return False
        gr_m = source.dim_at(i) - source.dim_at(i + 1)
        gr_n = target.dim_at(i) - target.dim_at(i + 1)
        nxt = target.subspace(i + 1)
        rank_i = _sum_rank(_image(T, source.subspace(i)), nxt) - _rank(nxt)
        a_i = ker_dim(i) - ker_dim(i + 1)
        c_i = coker_dim(i) - coker_dim(i + 1)
        if a_i + rank_i != gr_m or rank_i + c_i != gr_n:
            return False
    return True


# ==============================================================================
# 有限窗口坐标
# ==============================================================================
@dataclass(frozen=True)
class Frame:
    """u^low F[[u]]^n / u^high F[[u]]^n 的 F-坐标

    坐标 (行 i, 次数 k) 的下标为 (n-1-i)·W + (k - low)。行约化后的主元行即列 Hermite 形。
    """
    n: int
    low: int
    high: int

    @property
    def width(self) -> int:
        return self.high - self.low

    @property
    def size(self) -> int:
        return self.n * self.width

    def degrees(self) -> np.ndarray:
        """每个坐标对应的次数"""
        return np.tile(np.arange(self.low, self.high), self.n)

    def vectorize(self, mat: SeriesMatrix) -> galois.FieldArray:
        """把 n×r 矩阵的各列写成坐标行向量，形状 (r, size)"""
        w = mat.window(self.low, self.high)
        return w[::-1].transpose(1, 0, 2).reshape(mat.cols, self.size)

    def devectorize(self, rows: galois.FieldArray, field: FqField, precision: int) -> SeriesMatrix:
        r = rows.shape[0]
        coeffs = rows.reshape(r, self.n, self.width).transpose(1, 0, 2)[::-1]
        return SeriesMatrix(field, self.low, coeffs, max(precision, self.high))


def _hermite_from_rref(rref: galois.FieldArray, frame: Frame, field: FqField, precision: int) -> SeriesMatrix:
    ints = rref.view(np.ndarray)
    pivots = [int(np.flatnonzero(row)[0]) for row in ints]
    W = frame.width
    chosen = []
    for i in range(frame.n):
        block = frame.n - 1 - i
        cand = [(pc, r) for r, pc in enumerate(pivots) if block * W <= pc < (block + 1) * W]
        if not cand:
            raise InsufficientPrecision(f"窗口 [{frame.low}, {frame.high}) 内第 {i} 行没有主元")
        chosen.append(min(cand)[1])
    return frame.devectorize(rref[chosen], field, precision)


# ==============================================================================
# 格
# ==============================================================================
class Lattice:
    """F((u))^n 中满秩的 F[[u]]-格，由基矩阵的列生成"""

    def __init__(self, basis: SeriesMatrix):
        if basis.rows != basis.cols:
            raise DimensionMismatch(f"格的基必须是方阵，实际为 {basis.shape}")
        self.basis = basis
        self.field = basis.field
        self.ambient_rank = basis.rows
        self._rref_cache: Dict[Tuple[int, int], galois.FieldArray] = {}

    @classmethod
    def standard(cls, field: FqField, n: int, precision: int) -> "Lattice":
        return cls(SeriesMatrix.identity(field, n, precision))

    @cached_property
    def smith(self) -> SmithForm:
        return smith_exponents(self.basis)

    @property
    def exponents(self) -> Tuple[int, ...]:
        return self.smith.exponents

    @property
    def conductor(self) -> int:
        """最小的 c 使 u^c F[[u]]^n ⊆ L"""
        return max(self.exponents) if self.ambient_rank else 0

    @property
    def floor(self) -> int:
        """格中元素的最小赋值"""
        return min(self.exponents) if self.ambient_rank else 0

    def det_valuation(self) -> int:
        return sum(self.exponents)

    def frame(self, low: Optional[int] = None, high: Optional[int] = None) -> Frame:
        lo = self.floor if low is None else min(low, self.floor)
        hi = max(self.conductor + 1, high if high is not None else lo + 1, lo + 1)
        if hi > self.basis.precision:
            raise InsufficientPrecision(
                f"格的窗口需要模 u^{hi}，基只有精度 {self.basis.precision}"
            )
        return Frame(self.ambient_rank, lo, hi)

    def span_rows(self, frame: Frame, min_shift: int = 0) -> galois.FieldArray:
        """{u^e b_j : e ≥ min_shift} 在窗口中的像（按行）"""
        GF = self.field.GF
        v = self.basis.valuation()
        top = frame.high - v
        if top <= min_shift:
            return GF.Zeros((0, frame.size))
        base = self.basis.window(frame.low, frame.high)
        blocks = []
        W = frame.width
        for e in range(min_shift, top):
            shifted = GF.Zeros(base.shape)
            if e < W:
                shifted[:, :, e:] = base[:, :, :W - e]
            blocks.append(shifted[::-1].transpose(1, 0, 2).reshape(self.ambient_rank, frame.size))
        return np.concatenate(blocks, axis=0)

    def rref(self, frame: Frame) -> galois.FieldArray:
        key = (frame.low, frame.high)
        if key not in self._rref_cache:
            self._rref_cache[key] = _independent_rows(self.span_rows(frame), self.field.GF)
        return self._rref_cache[key]

    @cached_property
    def _hermite(self) -> SeriesMatrix:
        fr = self.frame()
        return _hermite_from_rref(self.rref(fr), fr, self.field, self.basis.precision)

    def hermite(self) -> SeriesMatrix:
        """列 Hermite 形：上三角，主元 u^{a_i}，主元上方的元素模 u^{a_i} 约化"""
        if self.ambient_rank == 0:
            return self.basis
        return self._hermite

    def contains(self, vectors: SeriesMatrix) -> bool:
        """vectors 的每一列是否都属于 L"""
        if vectors.rows != self.ambient_rank:
            raise DimensionMismatch("向量维数与格的秩不一致")
        if vectors.cols == 0 or self.ambient_rank == 0:
            return True
        v = vectors.valuation()
        if v >= vectors.precision:
            # 精度内为零：只要 u^N F[[u]]^n ⊆ L 就能确认
            return vectors.precision >= self.conductor
        if v < self.floor:
            return False
        fr = self.frame()
        rows = self.rref(fr)
        vec = fr.vectorize(vectors)
        return _sum_rank(rows, vec) == rows.shape[0]

    def contains_lattice(self, other: "Lattice") -> bool:
        return self.contains(other.basis)

    def same_as(self, other: "Lattice") -> bool:
        return self.contains_lattice(other) and other.contains_lattice(self)

    def scaled(self, k: int) -> "Lattice":
        """u^k L"""
        return Lattice(self.basis.shift(k))

    def intersect_with_scaled_standard(self, i: int) -> "Lattice":
        return intersect_with_scaled_standard(self, i)

    def constant_vectors(self) -> galois.FieldArray:
        """L ∩ F^n 的一组基（按行，长度 n）"""
        GF = self.field.GF
        n = self.ambient_rank
        if self.floor > 0 or n == 0:
            return GF.Zeros((0, n))
        fr = self.frame(low=0, high=max(self.conductor, 0) + 1)
        rows = self.rref(fr)
        degs = fr.degrees()
        mask = degs != 0
        x = _left_kernel(rows[:, mask], GF)
        if x.shape[0] == 0:
            return GF.Zeros((0, n))
        vecs = (x @ rows)[:, ~mask]
        # ~mask 坐标按块倒序排列，翻回行顺序
        return _independent_rows(vecs[:, ::-1], GF)

    def __repr__(self) -> str:
        return f"Lattice(rank={self.ambient_rank}, exponents={self.exponents})"


def intersect_with_scaled_standard(L: Lattice, i: int) -> Lattice:
    """L ∩ u^i F[[u]]^n，以 Hermite 基返回"""
    if L.ambient_rank == 0 or i <= L.floor:
        return L
    fr = L.frame(high=max(L.conductor, i) + 1)
    rows = L.rref(fr)
    mask = fr.degrees() < i
    x = _left_kernel(rows[:, mask], L.field.GF)
    sub = _independent_rows(x @ rows, L.field.GF)
    herm = _hermite_from_rref(sub, fr, L.field, L.basis.precision)
    return Lattice(herm)


def _filtration_dims(L: Lattice, degrees: Iterable[int], frame: Frame) -> Dict[int, int]:
    """dim F^i(L/uL) = dim((L ∩ u^i) + uL)/uL"""
    GF = L.field.GF
    rows = L.rref(frame)
    r_u = _independent_rows(L.span_rows(frame, min_shift=1), GF)
    base = _rank(r_u)
    degs = frame.degrees()
    out = {}
    for i in degrees:
        if i <= L.floor:
            out[i] = L.ambient_rank
            continue
        if i > L.conductor:
            out[i] = 0
            continue
        x = _left_kernel(rows[:, degs < i], GF)
        out[i] = _sum_rank(r_u, x @ rows if x.shape[0] else GF.Zeros((0, frame.size))) - base
    return out


def quotient_mod_u_filtration(L: Lattice, degrees: Optional[Sequence[int]] = None) -> FilteredDims:
    """L/uL 上由 F^i = L ∩ u^i F[[u]]^n 诱导的商滤过的分次维数

    Args:
        L: 格
        degrees: 次数范围 (lo, hi)；为 None 时取 [floor, conductor]

    Returns:
        FilteredDims
    """
    if L.ambient_rank == 0:
        return FilteredDims({})
    lo, hi = (L.floor, L.conductor) if degrees is None else (degrees[0], degrees[-1])
    fr = L.frame(high=L.conductor + 1)
    dims = _filtration_dims(L, range(lo, hi + 2), fr)
    gr = {}
    for i in range(lo, hi + 1):
        d = dims[i] - dims[i + 1]
        if d:
            gr[i] = d
    return FilteredDims(gr)


# ==============================================================================
# 原像格 {c : G·τ(c) ∈ u^i F[[u]]^n}
# ==============================================================================
def _preimage_kernel(G: SeriesMatrix, i: int, frobenius: bool) -> Tuple[int, galois.FieldArray]:
    """返回 (K, kernel)：kernel 的行是模 u^K 的解，坐标下标 j·K + k"""
    GF = G.field.GF
    m, n = G.cols, G.rows
    q = G.field.p if frobenius else 1
    g = G.valuation()
    if g >= G.precision:
        raise InsufficientPrecision("映射矩阵在精度内为零")
    K = max(0, ceil((i - g) / q))
    if K == 0 or m == 0:
        return K, GF.Zeros((0, m * K))
    W = i - g
    Gw = G.window(g, i)
    lin = GF.Zeros((m, K, n, W))
    for k in range(K):
        s = q * k
        if s < W:
            lin[:, k, :, s:] = Gw[:, :, :W - s].transpose(1, 0, 2)
    lin = lin.reshape(m * K, n * W)
    return K, _left_kernel(lin, GF)


def preimage_of_scaled_standard(G: SeriesMatrix, i: int, frobenius: bool = False,
                                precision: Optional[int] = None) -> Lattice:
    """{c ∈ F[[u]]^m : G·τ(c) ∈ u^i F[[u]]^n}，τ 为恒等或 u ↦ u^p

    Args:
        G: n×m 矩阵
        i: 次数
        frobenius: 是否先代入 u ↦ u^p
        precision: 结果基的精度，默认取 G 的精度

    Returns:
        以 Hermite 基表示的格
    """
    field = G.field
    m = G.cols
    K, kernel = _preimage_kernel(G, i, frobenius)
    prec = max(G.precision if precision is None else precision, K + 1)
    if K == 0:
        return Lattice.standard(field, m, prec)
    fr = Frame(m, 0, K + 1)
    GF = field.GF
    gens = GF.Zeros((kernel.shape[0] + m, m, K + 1))
    if kernel.shape[0]:
        gens[:kernel.shape[0], :, :K] = kernel.reshape(-1, m, K)
    gens[kernel.shape[0] + np.arange(m), np.arange(m), K] = 1
    rows = gens[:, ::-1, :].reshape(-1, fr.size)
    rref = _independent_rows(rows, GF)
    return Lattice(_hermite_from_rref(rref, fr, field, prec))


def filtration_image(G: SeriesMatrix, i: int, frobenius: bool = False) -> galois.FieldArray:
    """原像格模 u 的像，即 F^i 在 F[[u]]^m / u 中的像（按行）"""
    GF = G.field.GF
    m = G.cols
    K, kernel = _preimage_kernel(G, i, frobenius)
    if K == 0:
        return GF.Identity(m)
    if kernel.shape[0] == 0:
        return GF.Zeros((0, m))
    return _independent_rows(kernel.reshape(-1, m, K)[:, :, 0], GF)


# ==============================================================================
# 严格性与适配基提升
# ==============================================================================
def is_strict(map_matrix: SeriesMatrix, source: Lattice, target: Lattice,
              degrees: Optional[Sequence[int]] = None) -> bool:
    """格之间映射的严格性：对范围内每个 i，f(S ∩ u^i) = f(S) ∩ T ∩ u^i

    Args:
        map_matrix: n×n 方阵，要求 f(S) ⊆ T 且 f 在 S 上单射
        source: 源格 S
        target: 目标格 T
        degrees: 次数范围 (lo, hi)，默认覆盖两边商滤过的支撑

    Raises:
        NotStable: f(S) ⊄ T
        RangeTooSmall: 商滤过的非零分次落在范围之外
    """
    n = map_matrix.rows
    if map_matrix.cols != n or source.ambient_rank != n or target.ambient_rank != n:
        raise DimensionMismatch("is_strict 只接受同秩格之间的方阵映射")
    image = map_matrix @ source.basis
    if not target.contains(image):
        raise NotStable("映射没有把源格送入目标格")
    support = quotient_mod_u_filtration(source).support() + quotient_mod_u_filtration(target).support()
    if degrees is None:
        lo, hi = (min(support), max(support)) if support else (0, 0)
        lo += LATTICE_CONFIG["STRICT_RANGE_LOW"]
        hi += LATTICE_CONFIG["STRICT_RANGE_HIGH_OFFSET"]
    else:
        lo, hi = degrees[0], degrees[-1]
        if support and (min(support) < lo or max(support) > hi):
            raise RangeTooSmall(f"分次支撑 [{min(support)}, {max(support)}] 超出范围 [{lo}, {hi}]")
    for i in range(lo, hi + 1):
        P = preimage_of_scaled_standard(source.basis, i)
        Q = preimage_of_scaled_standard(image, i)
        if not P.same_as(Q):
            logger.debug(f"次数 {i} 处不严格")
            return False
    return True


@dataclass(frozen=True)
class AdaptedLift:
    """(g_i) 是 L 的基，(u^{-r_i} g_i) 是 F[[u]]^n 的基"""
    basis: SeriesMatrix
    standard: SeriesMatrix
    degrees: Tuple[int, ...]


def lift_adapted_basis(L: Lattice, graded_generators: Sequence[Tuple[SeriesMatrix, int]]) -> AdaptedLift:
    """把 gr(L/uL) 的分次基提升为 L 的基

    Args:
        L: 满秩格
        graded_generators: (列向量, 次数 r_i) 列表，要求向量属于 L ∩ u^{r_i} F[[u]]^n

    Returns:
        AdaptedLift

    Raises:
        NotAGradedBasis: 这些向量在分次商中不构成基
    """
    n = L.ambient_rank
    if len(graded_generators) != n:
        raise NotAGradedBasis(f"需要 {n} 个生成元，实际给出 {len(graded_generators)} 个")
    if n == 0:
        return AdaptedLift(L.basis, L.basis, ())
    vectors = SeriesMatrix.hstack([v for v, _ in graded_generators])
    degrees = tuple(int(r) for _, r in graded_generators)
    for t, (v, r) in enumerate(graded_generators):
        if v.valuation() < r:
            raise NotAGradedBasis(f"第 {t} 个向量不在 u^{r} F[[u]]^n 中")
    if not L.contains(vectors):
        raise NotAGradedBasis("有向量不属于格")

    lo = min(min(degrees), L.floor)
    hi = max(max(degrees), L.conductor) + 1
    fr = L.frame(high=max(L.conductor, max(degrees)) + 1)
    GF = L.field.GF
    dims = _filtration_dims(L, range(lo, hi + 1), fr)
    r_u = _independent_rows(L.span_rows(fr, min_shift=1), GF)
    base = _rank(r_u)
    vec_rows = fr.vectorize(vectors)
    deg_arr = np.array(degrees)
    for d in range(lo, hi + 1):
        picked = vec_rows[deg_arr >= d]
        count = picked.shape[0]
        if _sum_rank(r_u, picked) - base != count or count != dims[d]:
            raise NotAGradedBasis(
                f"次数 {d} 处: 生成元给出 {count} 维，滤过实际为 {dims[d]} 维"
            )

    standard = vectors.column_shift([-r for r in degrees])
    if standard.valuation() < 0:
        raise NotAGradedBasis("u^{-r_i} g_i 不是整的")
    if any(smith_exponents(standard).exponents):
        raise NotAGradedBasis("(u^{-r_i} g_i) 不是 F[[u]]^n 的基")
    if sum(smith_exponents(vectors).exponents) != L.det_valuation():
        raise NotAGradedBasis("生成元张成的格比 L 小")
    return AdaptedLift(vectors, standard, degrees)
