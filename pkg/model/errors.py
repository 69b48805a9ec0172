#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
异常定义
所有模块共用的异常层次，每个异常类带有命令行退出码
"""

from typing import Optional


class QuantumMirrorError(Exception):
    """量子镜模拟器异常基类"""

    exit_code = 1


class ConfigError(QuantumMirrorError):
    """
    配置文件错误

    Args:
        message: 错误描述
        source: 配置文件路径
        line: 出错的行号（从1开始）
    """

    exit_code = 2

    def __init__(self, message: str, source: Optional[str] = None, line: Optional[int] = None):
        self.source = source
        self.line = line
        if source is not None:
            message = f"{source}:{line if line is not None else 1}: {message}"
        super().__init__(message)


class InvalidGeometry(QuantumMirrorError):
    """几何配置非法（原子位置重合、镜子数量不对等）"""

    exit_code = 2


class CollectiveInvalid(QuantumMirrorError):
    """非布拉格间距时不能做集体态约化"""

    exit_code = 2


class Unsupported(QuantumMirrorError):
    """超出模型支持范围的配置（非对称腔、镜子原子数不等）"""

    exit_code = 2


class InvalidCase(QuantumMirrorError):
    """解析近似的适用条件与几何不匹配"""

    exit_code = 2


class InvalidTimeGrid(QuantumMirrorError):
    """时间网格必须从0开始且严格递增"""

    exit_code = 2


class InvalidModeGrid(QuantumMirrorError):
    """离散模式网格不满足带宽或分辨率要求"""

    exit_code = 2


class NumericalFailure(QuantumMirrorError):
    """
    数值计算失败（出现NaN/Inf或范数增长）

    Args:
        message: 错误描述
        branch: 出错的分支标签
        t: 出错的时间
    """

    exit_code = 3

    def __init__(self, message: str, branch: Optional[str] = None, t: Optional[float] = None):
        self.branch = branch
        self.t = t
        details = []
        if branch is not None:
            details.append(f"branch={branch}")
        if t is not None:
            details.append(f"t={t:.6g}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)


class HistoryTooShort(QuantumMirrorError):
    """
    轨迹时间范围不足以计算推迟时间处的振幅

    Args:
        message: 错误描述
        required_t_max: 所需的最大时间
    """

    exit_code = 3

    def __init__(self, message: str, required_t_max: Optional[float] = None):
        self.required_t_max = required_t_max
        if required_t_max is not None:
            message = f"{message} (required t_max={required_t_max:.6g})"
        super().__init__(message)


class OracleWindowExceeded(QuantumMirrorError):
    """模拟时间超出离散模式的回归时间窗口"""

    exit_code = 3


class FitFailure(QuantumMirrorError):
    """频率或衰减率拟合失败（样本不足）"""

    exit_code = 3


class OutputError(QuantumMirrorError):
    """结果文件写入失败"""

    exit_code = 4
