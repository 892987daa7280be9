"""
领域异常定义

所有异常都继承自 ValueError，调用方按 ValueError 捕获同样有效。
"""


class BKError(ValueError):
    """Breuil–Kisin 计算相关异常的基类"""


class InvalidField(BKError):
    """有限域参数非法（p 非素数、m < 1 或模多项式不可约性不成立）"""


class ZeroToPrecision(BKError):
    """级数在精度范围内为零，无法确定赋值"""


class InsufficientPrecision(BKError):
    """当前精度不足以认证结果"""


class RangeTooSmall(BKError):
    """给定的次数范围没有覆盖全部非零分次"""


class NotAGradedBasis(BKError):
    """给定向量在分次商中不构成基"""


class DimensionMismatch(BKError):
    """维数或形状不匹配"""


class NotStable(BKError):
    """子模不在 φ 作用下稳定"""


class NotSaturated(BKError):
    """子模不饱和"""


class ZeroScalar(BKError):
    """非零标量参数为零"""


class IncompatibleDegrees(BKError):
    """剩余域次数不相容（例如 f_k 不整除 f_l）"""


class NotRankOne(BKError):
    """模的秩不为 1"""


class BoxTooLarge(BKError):
    """枚举空间超出预算"""


class SizeMismatch(BKError):
    """权重元组与描述的维数不一致"""


class AmbientReducible(BKError):
    """诱导模对应的表示可约，显式判别法不适用"""


class NoValidLambda(BKError):
    """找不到满足三个条件的基点 λ"""
