"""
JSON 输入输出格式（pydantic 校验）
"""
import json
import logging
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..core.algebra import FqField
from ..core.bkmod import BKModule
from ..core.errors import DimensionMismatch
from ..core.induct import RankOneData, UnramifiedExtension
from ..core.inert import InertDescription, TameCharacter, WeightTuple
from ..core.lattices import SeriesMatrix
from ..core.sdinduced import InducedAmbient, InducedSubmodule
from .params_config import CLI_CONFIG, default_precision

logger = logging.getLogger(__name__)

# 超过该值的整数写成十进制字符串
MAX_SAFE_INTEGER = 2 ** 53

Coefficient = Union[int, List[int]]
Polynomial = List[Coefficient]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ==============================================================================
# 数据模型
# ==============================================================================
class FieldModel(_Strict):
    p: int = Field(..., ge=2)
    m: int = Field(1, ge=1)
    modulus: Optional[List[int]] = None

    def build(self) -> FqField:
        return FqField(self.p, self.m, self.modulus)


class MatrixModel(_Strict):
    """entries[i][j] 是从 u^low 开始的升幂系数列表；系数为整数表示或坐标列表"""
    field: FieldModel
    entries: List[List[Polynomial]]
    low: int = 0
    precision: Optional[int] = None


class ModuleModel(_Strict):
    field: FieldModel
    f: int = Field(..., ge=1)
    rank: int = Field(..., ge=0)
    precision: Optional[int] = None
    low: int = 0
    frob: List[List[List[Polynomial]]]

    @field_validator("frob")
    @classmethod
    def _square(cls, v):
        for j, A in enumerate(v):
            if any(len(row) != len(A) for row in A):
                raise ValueError(f"A_{j} 不是方阵")
        return v


class SummandModel(_Strict):
    f: int = Field(..., ge=1)
    exponent: Union[int, str]
    unramified: int = 1

    @field_validator("exponent")
    @classmethod
    def _decimal(cls, v):
        return int(v) if isinstance(v, str) else v


class DescriptionModel(_Strict):
    p: int = Field(..., ge=2)
    f_k: int = Field(..., ge=1)
    summands: List[SummandModel]


class RankOneModel(_Strict):
    field: FieldModel
    x: int = 1
    exponents: List[int]
    precision: Optional[int] = None


class InducedModel(_Strict):
    """lattices 为空时取 M = f_*N；否则 lattices[s] 为分量 s 的格基"""
    field: FieldModel
    f_k: int = Field(..., ge=1)
    f_l: int = Field(..., ge=1)
    exponents: List[int]
    precision: Optional[int] = None
    lattices: Optional[List[List[List[Polynomial]]]] = None


class JobOptions(_Strict):
    precision: Optional[int] = Field(None, ge=1)
    box: Optional[Tuple[int, int]] = None
    seed: Optional[int] = Field(None, ge=0)
    trials: Optional[int] = Field(None, ge=0)
    json_output: bool = False

    @field_validator("box")
    @classmethod
    def _ordered(cls, v):
        if v is not None and v[0] > v[1]:
            raise ValueError(f"盒子下界 {v[0]} 大于上界 {v[1]}")
        return v


class JobSpec(_Strict):
    command: Literal[CLI_CONFIG["COMMANDS"]]
    input: Optional[Dict[str, Any]] = None
    options: JobOptions = JobOptions()


# ==============================================================================
# 读取
# ==============================================================================
def load_json(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def dump_json(data: Any, path: Optional[str] = None) -> str:
    text = json.dumps(data, ensure_ascii=False, indent=2)
    if path is not None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    return text


def _coefficient(field: FqField, c: Coefficient) -> int:
    if isinstance(c, list):
        return int(field.from_coords(c))
    return int(field.elem(c))


def _normalize(field: FqField, entries) -> List[List[List[int]]]:
    return [[[_coefficient(field, c) for c in poly] for poly in row] for row in entries]


def _matrix(field: FqField, entries, precision: int, low: int = 0) -> SeriesMatrix:
    return SeriesMatrix.from_polynomials(field, _normalize(field, entries), precision, low=low)


def parse_matrix(data: Dict[str, Any]) -> SeriesMatrix:
    model = MatrixModel.model_validate(data)
    field = model.field.build()
    precision = model.precision
    if precision is None:
        precision = max((len(poly) for row in model.entries for poly in row), default=0) + model.low + 1
    return _matrix(field, model.entries, precision, model.low)


def parse_module(data: Dict[str, Any]) -> BKModule:
    """Raises:
        ValidationError: 结构不合法
        BKError: 数学上不合法（维数、次数不相容等）
    """
    model = ModuleModel.model_validate(data)
    field = model.field.build()
    if len(model.frob) != model.f:
        raise DimensionMismatch(f"f = {model.f}，但给出了 {len(model.frob)} 个 Frobenius 矩阵")
    if any(len(A) != model.rank for A in model.frob):
        raise DimensionMismatch(f"Frobenius 矩阵的大小与秩 {model.rank} 不一致")
    precision = model.precision or default_precision(model.rank, field.p)
    frob = [_matrix(field, A, precision, model.low) for A in model.frob]
    return BKModule(field, model.f, model.rank, tuple(frob), precision)


def parse_description(data: Dict[str, Any]) -> InertDescription:
    model = DescriptionModel.model_validate(data)
    summands = tuple(TameCharacter(model.p, s.f, s.exponent, s.unramified) for s in model.summands)
    return InertDescription(model.p, model.f_k, summands)


def parse_weights(values: List[List[int]]) -> WeightTuple:
    return WeightTuple(tuple(tuple(v) for v in values))


def parse_rank_one(data: Dict[str, Any]) -> Tuple[RankOneData, Optional[int]]:
    model = RankOneModel.model_validate(data)
    field = model.field.build()
    return RankOneData(field, model.x, tuple(model.exponents)), model.precision


def parse_induced(data: Dict[str, Any]) -> InducedSubmodule:
    model = InducedModel.model_validate(data)
    field = model.field.build()
    ambient = InducedAmbient(UnramifiedExtension(model.f_k, model.f_l), tuple(model.exponents),
                             field, model.precision)
    if model.lattices is None:
        return InducedSubmodule.full(ambient)
    bases = [_matrix(field, entries, ambient.precision) for entries in model.lattices]
    return InducedSubmodule(ambient, bases)


# ==============================================================================
# 写出
# ==============================================================================
def _field_dict(field: FqField) -> Dict[str, Any]:
    out: Dict[str, Any] = {"p": field.p, "m": field.m}
    if field.m > 1:
        out["modulus"] = list(field.modulus)
    return out


def _polynomials(A: SeriesMatrix, low: int) -> List[List[List[int]]]:
    """按 u^low 起的系数写出，去掉末尾的零"""
    window = A.window(low, A.precision).view(np.ndarray)
    out = []
    for i in range(A.rows):
        row = []
        for j in range(A.cols):
            nz = np.flatnonzero(window[i, j])
            top = int(nz[-1]) + 1 if len(nz) else 0
            row.append([int(c) for c in window[i, j, :top]])
        out.append(row)
    return out


def _integer(value: int) -> Union[int, str]:
    return str(value) if abs(value) > MAX_SAFE_INTEGER else value


def dump_module(M: BKModule) -> Dict[str, Any]:
    low = min([A.valuation() for A in M.frob] + [0])
    data: Dict[str, Any] = {
        "field": _field_dict(M.field),
        "f": M.f,
        "rank": M.rank,
        "precision": M.precision,
        "frob": [_polynomials(A, low) for A in M.frob],
    }
    if low:
        data["low"] = low
    return data


def dump_matrix(A: SeriesMatrix) -> Dict[str, Any]:
    low = min(A.valuation(), 0)
    data = {"field": _field_dict(A.field), "entries": _polynomials(A, low), "precision": A.precision}
    if low:
        data["low"] = low
    return data


def dump_description(desc: InertDescription) -> Dict[str, Any]:
    return {
        "p": desc.p,
        "f_k": desc.f_k,
        "summands": [
            {"f": chi.level, "exponent": _integer(chi.exponent), "unramified": chi.unramified}
            for chi in desc.summands
        ],
    }


def dump_induced(M: InducedSubmodule) -> Dict[str, Any]:
    amb = M.ambient
    return {
        "field": _field_dict(amb.field),
        "f_k": amb.f_k,
        "f_l": amb.f_l,
        "exponents": list(amb.exponents),
        "precision": amb.precision,
        "lattices": [_polynomials(L.basis, 0) for L in M.lattices],
    }


def validation_message(error: ValidationError) -> str:
    """把 pydantic 的错误列表压成一行"""
    parts = []
    for item in error.errors():
        loc = ".".join(str(x) for x in item.get("loc", ()))
        parts.append(f"{loc}: {item.get('msg')}")
    return "; ".join(parts)
