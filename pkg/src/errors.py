#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Error Types

Every failure raised by the pipeline carries a stable error code and the
exit code the command-line surface maps it to.
"""

from typing import Optional, Tuple


class FlatCurveError(Exception):
    """所有业务异常的基类"""
    code = "RUNTIME"
    exit_code = 2

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


class InvalidParamsError(FlatCurveError, ValueError):
    """参数不合法"""
    code = "INVALID_PARAMS"
    exit_code = 1


class OutOfRangeError(InvalidParamsError):
    """节点编号越界"""
    code = "OUT_OF_RANGE"


class SelfLoopError(InvalidParamsError):
    """自环边"""
    code = "SELF_LOOP"


class ParseError(FlatCurveError, ValueError):
    """输入文件解析失败"""
    code = "PARSE_ERROR"
    exit_code = 3

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ExportError(FlatCurveError, OSError):
    """读写文件失败"""
    code = "IO_ERROR"
    exit_code = 3


class NoConvergenceError(FlatCurveError):
    """迭代求解器未收敛"""
    code = "NO_CONVERGENCE"

    def __init__(self, message: str, iterate=None, residual: Optional[float] = None):
        super().__init__(f"{message} (residual={residual})")
        self.iterate = iterate
        self.residual = residual


class DegenerateGraphError(FlatCurveError):
    """图结构退化(例如无边图)"""
    code = "DEGENERATE"


class DegenerateSampleError(FlatCurveError):
    """样本方差为0或样本为空"""
    code = "DEGENERATE_SAMPLE"


class EmptyCurveError(FlatCurveError):
    """曲线在 t >= 1 上没有数据"""
    code = "EMPTY_CURVE"


class UnreachableTargetError(FlatCurveError):
    """目标聚类系数超出可达范围"""
    code = "UNREACHABLE_TARGET"

    def __init__(self, target: float, band: Tuple[float, float]):
        super().__init__(
            f"target GCC {target:.4f} outside achievable band "
            f"[{band[0]:.4f}, {band[1]:.4f}]"
        )
        self.target = target
        self.band = band
