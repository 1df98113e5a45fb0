# -*- coding: utf-8 -*-
"""异常层级：输入类错误继承 ValueError，CLI 按类型映射退出码."""
from __future__ import annotations

from typing import Optional, Tuple


class RectiscopeError(Exception):
    """所有 rectiscope 异常的根."""


class InputError(RectiscopeError, ValueError):
    """维度不符、参数越界等输入问题（CLI 退出码 2）。"""


class ParseError(InputError):
    """文件解析失败，携带 1 起始的行号（CLI 退出码 1）。"""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"第 {row} 行: {message}"
        super().__init__(message)


class DegenerateInputError(InputError):
    """两平面几乎重合等退化输入。"""


class EmptyBallError(InputError):
    """球内没有任何点，无法拟合平面。"""


class NonSummableError(InputError):
    """模数序列 λ_j 不可和。"""


class InconsistentJetError(InputError):
    """重复基点却给出不同的值或导数。"""


class NonGraphError(InputError):
    """投影到基平面后两点重合，点云不是图。"""

    def __init__(self, message: str, pair: Tuple[int, int]):
        self.pair = pair
        super().__init__(f"{message} (点对 {pair[0]}, {pair[1]})")


class TiltError(InputError):
    """某点平面相对基平面倾斜过大。"""

    def __init__(self, message: str, index: int, distance: float):
        self.index = index
        self.distance = distance
        super().__init__(f"{message} (点 {index}, d={distance:.4g})")
