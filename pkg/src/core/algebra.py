"""
有限域 F_{p^m} 与截断 Laurent 级数的精确算术
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Union

import galois
import numpy as np

from .errors import InvalidField, ZeroToPrecision

logger = logging.getLogger(__name__)

FqElem = galois.FieldArray


class FqField:
    """有限域 F_{p^m} 的多项式基表示

    元素的整数表示与 galois 一致：系数坐标 (c_0, ..., c_{m-1}) 对应整数 Σ c_k p^k。
    """

    def __init__(self, p: int, m: int = 1, modulus: Optional[Sequence[int]] = None):
        """初始化有限域

        Args:
            p: 特征（素数）
            m: 在 F_p 上的扩张次数
            modulus: 升幂排列的首一不可约多项式系数，长度 m+1；为 None 时使用默认表
        """
        if not isinstance(p, (int, np.integer)) or p < 2 or not galois.is_prime(int(p)):
            raise InvalidField(f"p = {p} 不是素数")
        if m < 1:
            raise InvalidField(f"扩张次数 m = {m} 必须 ≥ 1")
        self.p = int(p)
        self.m = int(m)
        prime_field = galois.GF(self.p)

        if modulus is None:
            if self.m == 1:
                self.modulus = (0, 1)
                self.GF = prime_field
            else:
                self.GF = galois.GF(self.p ** self.m)
                poly = self.GF.irreducible_poly
                self.modulus = tuple(int(c) for c in poly.coeffs[::-1])
        else:
            coeffs = [int(c) % self.p for c in modulus]
            if len(coeffs) != self.m + 1 or coeffs[-1] != 1:
                raise InvalidField(f"模多项式必须是 {self.m} 次首一多项式: {list(modulus)}")
            poly = galois.Poly(coeffs[::-1], field=prime_field)
            if not poly.is_irreducible():
                raise InvalidField(f"模多项式在 F_{self.p} 上可约: {list(modulus)}")
            self.modulus = tuple(coeffs)
            if self.m == 1:
                self.GF = prime_field
            else:
                self.GF = galois.GF(self.p ** self.m, irreducible_poly=poly)

        self.order = self.p ** self.m
        self.zero = self.GF(0)
        self.one = self.GF(1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FqField)
            and self.p == other.p
            and self.m == other.m
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return hash((self.p, self.m, self.modulus))

    def __repr__(self) -> str:
        return f"FqField(p={self.p}, m={self.m}, modulus={list(self.modulus)})"

    def elem(self, value: Union[int, Sequence[int], FqElem]) -> FqElem:
        """构造域元素

        Args:
            value: 整数表示、系数坐标列表或已有的域元素；负整数视为素域元素

        Returns:
            域元素
        """
        if isinstance(value, galois.FieldArray):
            return self.GF(int(value))
        if isinstance(value, (list, tuple, np.ndarray)):
            return self.from_coords(value)
        value = int(value)
        if value < 0:
            value %= self.p
        if value >= self.order:
            raise InvalidField(f"整数 {value} 超出 F_{self.order} 的表示范围")
        return self.GF(value)

    def array(self, values) -> FqElem:
        """把整数数组（galois 整数表示）转成域数组"""
        arr = np.asarray(values, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.order):
            raise InvalidField("整数数组超出域的表示范围")
        return self.GF(arr)

    def zeros(self, shape) -> FqElem:
        return self.GF.Zeros(shape)

    def coords(self, x: FqElem) -> List[int]:
        """返回元素在多项式基下的坐标（升幂）"""
        value = int(x)
        digits = []
        for _ in range(self.m):
            digits.append(value % self.p)
            value //= self.p
        return digits

    def from_coords(self, coords: Sequence[int]) -> FqElem:
        if len(coords) > self.m:
            raise InvalidField(f"坐标长度 {len(coords)} 超过扩张次数 {self.m}")
        value = 0
        for c in reversed(list(coords)):
            value = value * self.p + int(c) % self.p
        return self.GF(value)

    def random(self, rng: np.random.Generator, nonzero: bool = False) -> FqElem:
        low = 1 if nonzero else 0
        return self.GF(int(rng.integers(low, self.order)))

    def contains_degree(self, f: int) -> bool:
        """F 是否包含 F_{p^f}"""
        return f >= 1 and self.m % f == 0


def coeff_frobenius(x: FqElem, j: int, field: Optional[FqField] = None) -> FqElem:
    """计算 x^{p^j}，j 可以为负

    Frobenius 在 F_{p^m} 上的阶为 m，负指数按 j mod m 处理。
    """
    gf = type(x)
    p = gf.characteristic
    m = gf.degree if field is None else field.m
    return x ** (p ** (j % m))


def toeplitz_matrix(field: FqField, c: FqElem, width: int) -> FqElem:
    """乘以截断级数 c 的下三角 Toeplitz 矩阵（模 u^width）"""
    if width == 0:
        return field.zeros((0, 0))
    c_int = np.asarray(c.view(np.ndarray), dtype=np.int64)[:width]
    idx = np.arange(width)[:, None] - np.arange(width)[None, :]
    mask = (idx >= 0) & (idx < len(c_int))
    if len(c_int) == 0:
        return field.zeros((width, width))
    table = np.where(mask, c_int[np.clip(idx, 0, len(c_int) - 1)], 0)
    return field.GF(table)


def power_series_inverse(field: FqField, w: FqElem, length: int) -> FqElem:
    """单位幂级数 w 的逆，模 u^length

    Args:
        field: 系数域
        w: 系数数组，w[0] 非零
        length: 需要的系数个数

    Returns:
        长度为 length 的系数数组
    """
    if length <= 0:
        return field.zeros(0)
    if len(w) == 0 or int(w[0]) == 0:
        raise ZeroToPrecision("常数项为零，不是单位")
    padded = field.zeros(length)
    k = min(length, len(w))
    padded[:k] = w[:k]
    T = toeplitz_matrix(field, padded, length)
    rhs = field.zeros(length)
    rhs[0] = field.one
    return np.linalg.solve(T, rhs)


def truncated_product(a: FqElem, b: FqElem, length: int) -> FqElem:
    """两个系数数组的卷积，截断到 length 项"""
    gf = type(a) if isinstance(a, galois.FieldArray) else type(b)
    if length <= 0 or len(a) == 0 or len(b) == 0:
        return gf.Zeros(max(length, 0))
    out = np.convolve(a[:length], b[:length])[:length]
    if len(out) < length:
        full = gf.Zeros(length)
        full[:len(out)] = out
        return full
    return out


@dataclass(frozen=True, eq=False)
class TruncatedLaurentSeries:
    """截断 Laurent 级数 Σ c_k u^{lowest_exponent + k}，已知到模 u^precision

    零级数（在精度内为零）规范化为 coeffs 为空、lowest_exponent = precision。
    """
    field: FqField
    lowest_exponent: int
    coeffs: FqElem
    precision: int

    def __post_init__(self):
        gf = self.field.GF
        coeffs = self.coeffs if isinstance(self.coeffs, galois.FieldArray) else gf(np.asarray(self.coeffs, dtype=np.int64))
        low = int(self.lowest_exponent)
        keep = max(self.precision - low, 0)
        coeffs = coeffs[:keep]
        ints = coeffs.view(np.ndarray)
        nz = np.flatnonzero(ints)
        if len(nz) == 0:
            object.__setattr__(self, "lowest_exponent", int(self.precision))
            object.__setattr__(self, "coeffs", gf.Zeros(0))
        else:
            object.__setattr__(self, "lowest_exponent", low + int(nz[0]))
            object.__setattr__(self, "coeffs", coeffs[nz[0]:nz[-1] + 1])
        object.__setattr__(self, "precision", int(self.precision))

    # ------------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------------
    @classmethod
    def from_coefficients(
        cls,
        field: FqField,
        coeffs: Iterable,
        precision: int,
        lowest_exponent: int = 0,
    ) -> "TruncatedLaurentSeries":
        """由系数构造（整数按 galois 整数表示解释）"""
        if isinstance(coeffs, galois.FieldArray):
            arr = coeffs
        else:
            arr = field.array([int(field.elem(int(c))) for c in coeffs])
        return cls(field, lowest_exponent, arr, precision)

    @classmethod
    def zero(cls, field: FqField, precision: int) -> "TruncatedLaurentSeries":
        return cls(field, precision, field.zeros(0), precision)

    @classmethod
    def monomial(cls, field: FqField, exponent: int, precision: int, coefficient=None) -> "TruncatedLaurentSeries":
        c = field.one if coefficient is None else field.elem(coefficient)
        return cls(field, exponent, field.GF([int(c)]), precision)

    @classmethod
    def one(cls, field: FqField, precision: int) -> "TruncatedLaurentSeries":
        return cls.monomial(field, 0, precision)

    # ------------------------------------------------------------------
    # 基本属性
    # ------------------------------------------------------------------
    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    @property
    def valuation(self) -> int:
        """u-adic 赋值；零级数返回精度（表示 ≥ precision）"""
        return self.lowest_exponent

    def coefficient(self, k: int) -> FqElem:
        if k >= self.precision:
            raise ZeroToPrecision(f"u^{k} 的系数超出精度 {self.precision}")
        idx = k - self.lowest_exponent
        if self.is_zero() or idx < 0 or idx >= len(self.coeffs):
            return self.field.zero
        return self.coeffs[idx]

    def leading_coefficient(self) -> FqElem:
        if self.is_zero():
            raise ZeroToPrecision("零级数没有首项系数")
        return self.coeffs[0]

    def dense(self, low: int, high: int) -> FqElem:
        """指数 [low, high) 上的稠密系数数组"""
        width = max(high - low, 0)
        out = self.field.zeros(width)
        if self.is_zero() or width == 0:
            return out
        start = self.lowest_exponent - low
        src_lo = max(0, -start)
        src_hi = min(len(self.coeffs), width - start)
        if src_hi > src_lo:
            out[start + src_lo:start + src_hi] = self.coeffs[src_lo:src_hi]
        return out

    def truncate(self, precision: int) -> "TruncatedLaurentSeries":
        if precision > self.precision:
            raise ZeroToPrecision(f"不能把精度从 {self.precision} 扩大到 {precision}")
        return TruncatedLaurentSeries(self.field, self.lowest_exponent, self.coeffs, precision)

    # ------------------------------------------------------------------
    # 环运算
    # ------------------------------------------------------------------
    def _same_field(self, other: "TruncatedLaurentSeries"):
        if self.field != other.field:
            raise InvalidField(f"级数的系数域不一致: F_{self.field.order} 与 F_{other.field.order}")

    def __add__(self, other: "TruncatedLaurentSeries") -> "TruncatedLaurentSeries":
        self._same_field(other)
        prec = min(self.precision, other.precision)
        low = min(self.lowest_exponent, other.lowest_exponent, prec)
        coeffs = self.dense(low, prec) + other.dense(low, prec)
        return TruncatedLaurentSeries(self.field, low, coeffs, prec)

    def __neg__(self) -> "TruncatedLaurentSeries":
        return TruncatedLaurentSeries(self.field, self.lowest_exponent, -self.coeffs, self.precision)

    def __sub__(self, other: "TruncatedLaurentSeries") -> "TruncatedLaurentSeries":
        return self + (-other)

    def __mul__(self, other) -> "TruncatedLaurentSeries":
        if not isinstance(other, TruncatedLaurentSeries):
            return self.scale(other)
        self._same_field(other)
        va, vb = self.valuation, other.valuation
        prec = min(self.precision + vb, other.precision + va)
        low = va + vb
        if self.is_zero() or other.is_zero() or prec <= low:
            return TruncatedLaurentSeries.zero(self.field, prec)
        coeffs = truncated_product(self.coeffs, other.coeffs, prec - low)
        return TruncatedLaurentSeries(self.field, low, coeffs, prec)

    def scale(self, c) -> "TruncatedLaurentSeries":
        c = self.field.elem(c)
        return TruncatedLaurentSeries(self.field, self.lowest_exponent, self.coeffs * c, self.precision)

    def shift(self, k: int) -> "TruncatedLaurentSeries":
        """乘以 u^k"""
        return TruncatedLaurentSeries(self.field, self.lowest_exponent + k, self.coeffs, self.precision + k)

    def inverse(self, target_precision: Optional[int] = None) -> "TruncatedLaurentSeries":
        return series_inverse(self, target_precision)

    def substitute_u_p(self) -> "TruncatedLaurentSeries":
        return substitute_u_p(self)

    def frobenius_coefficients(self, j: int = 1) -> "TruncatedLaurentSeries":
        """系数逐项作用 x ↦ x^{p^j}"""
        return TruncatedLaurentSeries(
            self.field, self.lowest_exponent,
            coeff_frobenius(self.coeffs, j, self.field), self.precision,
        )

    # ------------------------------------------------------------------
    # 比较
    # ------------------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedLaurentSeries):
            return NotImplemented
        return (
            self.field == other.field
            and self.precision == other.precision
            and self.lowest_exponent == other.lowest_exponent
            and np.array_equal(self.coeffs.view(np.ndarray), other.coeffs.view(np.ndarray))
        )

    __hash__ = None

    def agrees_with(self, other: "TruncatedLaurentSeries") -> bool:
        """在两者共同精度内是否相等"""
        return (self - other).is_zero()

    def __repr__(self) -> str:
        if self.is_zero():
            return f"O(u^{self.precision})"
        terms = []
        for k, c in enumerate(self.coeffs):
            if int(c):
                terms.append(f"{int(c)}*u^{self.lowest_exponent + k}")
        return " + ".join(terms) + f" + O(u^{self.precision})"


def series_inverse(s: TruncatedLaurentSeries, target_precision: Optional[int] = None) -> TruncatedLaurentSeries:
    """级数求逆

    结果精度为 min(s.precision - 2·v(s), target_precision)，从不悄悄扩大精度；
    s·t ≡ 1 (mod u^{t.precision + v(s)})。

    Raises:
        ZeroToPrecision: s 在精度内为零
    """
    if s.is_zero():
        raise ZeroToPrecision(f"级数在精度 {s.precision} 内为零，不可逆")
    v = s.valuation
    prec = s.precision - 2 * v
    if target_precision is not None:
        prec = min(prec, target_precision)
    length = prec + v
    coeffs = power_series_inverse(s.field, s.coeffs, length)
    return TruncatedLaurentSeries(s.field, -v, coeffs, prec)


def substitute_u_p(s: TruncatedLaurentSeries) -> TruncatedLaurentSeries:
    """u ↦ u^p：指数乘 p，系数不变，精度乘 p"""
    p = s.field.p
    if s.is_zero():
        return TruncatedLaurentSeries.zero(s.field, p * s.precision)
    spread = np.zeros((len(s.coeffs) - 1) * p + 1, dtype=np.int64)
    spread[::p] = s.coeffs.view(np.ndarray)
    return TruncatedLaurentSeries(s.field, p * s.lowest_exponent, s.field.GF(spread), p * s.precision)


@dataclass(frozen=True)
class FrobOrbitIndex:
    """嵌入的 Frobenius 轨道下标：index ↦ index+1 模 f 对应 θ ↦ θ∘φ"""
    f: int
    index: int

    def __post_init__(self):
        if self.f < 1:
            raise InvalidField(f"轨道长度 f = {self.f} 必须 ≥ 1")
        object.__setattr__(self, "index", self.index % self.f)

    def succ(self, steps: int = 1) -> "FrobOrbitIndex":
        return FrobOrbitIndex(self.f, self.index + steps)

    def pred(self) -> "FrobOrbitIndex":
        return FrobOrbitIndex(self.f, self.index - 1)

    def restrict(self, f_k: int) -> "FrobOrbitIndex":
        """限制到子域 k 的嵌入（下标模 f_k）"""
        if self.f % f_k:
            raise InvalidField(f"f_k = {f_k} 不整除 f = {self.f}")
        return FrobOrbitIndex(f_k, self.index)

    def extensions(self, f_l: int) -> List["FrobOrbitIndex"]:
        """扩张到 l 的全部嵌入，按扩张下标递增"""
        if f_l % self.f:
            raise InvalidField(f"f = {self.f} 不整除 f_l = {f_l}")
        return [FrobOrbitIndex(f_l, self.index + self.f * b) for b in range(f_l // self.f)]
