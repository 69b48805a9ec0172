#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
轨迹拟合工具
从数值轨迹中读取振荡频率、衰减率和条纹周期
"""

from typing import Optional, Tuple

import numpy as np
from scipy.signal import find_peaks

from model.errors import FitFailure


def _window(t: np.ndarray, values: np.ndarray, t_min: Optional[float], t_max: Optional[float]) -> Tuple[np.ndarray, np.ndarray]:
    t = np.asarray(t, dtype=float)
    values = np.asarray(values)
    mask = np.ones(t.shape, dtype=bool)
    if t_min is not None:
        mask &= t >= t_min
    if t_max is not None:
        mask &= t <= t_max
    return t[mask], values[mask]


def zero_crossing_times(t, signal) -> np.ndarray:
    """实信号的过零时刻（相邻采样点之间线性插值）"""
    t = np.asarray(t, dtype=float)
    y = np.asarray(signal, dtype=float)
    idx = np.nonzero(np.signbit(y[:-1]) != np.signbit(y[1:]))[0]
    y0, y1 = y[idx], y[idx + 1]
    frac = np.where(y1 != y0, y0 / (y0 - y1), 0.0)
    return t[idx] + frac * (t[idx + 1] - t[idx])


def zero_crossing_frequency(t, signal, min_periods: int = 5,
                            t_min: Optional[float] = None, t_max: Optional[float] = None) -> float:
    """
    过零计数法拟合角频率

    相邻过零点间隔为半个周期，ω = π / 平均间隔。

    Args:
        t: 时间
        signal: 实信号（一般取 Re c_A）
        min_periods: 窗口内至少包含的周期数
        t_min: 窗口起点
        t_max: 窗口终点

    Returns:
        角频率（单位 γ）

    Raises:
        FitFailure: 过零点不足 2·min_periods 个
    """
    t_w, y_w = _window(t, np.real(signal), t_min, t_max)
    crossings = zero_crossing_times(t_w, y_w)
    if crossings.size < 2 * min_periods:
        raise FitFailure(f"only {crossings.size} zero crossings, need {2 * min_periods} for {min_periods} periods")
    spacing = (crossings[-1] - crossings[0]) / (crossings.size - 1)
    return float(np.pi / spacing)


def decay_rate(t, probability, t_min: Optional[float] = None, t_max: Optional[float] = None) -> float:
    """
    对 ln P(t) 做线性拟合，返回衰减率 -斜率

    Raises:
        FitFailure: 窗口内有效点少于3个
    """
    t_w, p_w = _window(t, probability, t_min, t_max)
    keep = p_w > 0
    if np.count_nonzero(keep) < 3:
        raise FitFailure("need at least three positive samples to fit a decay rate")
    slope, _ = np.polyfit(t_w[keep], np.log(p_w[keep]), 1)
    return float(-slope)


def envelope_decay_rate(t, norm, t_min: Optional[float] = None, t_max: Optional[float] = None) -> float:
    """振幅包络衰减率：分支范数 Σ|c|² 的衰减率的一半"""
    return 0.5 * decay_rate(t, norm, t_min, t_max)


def fringe_period(t, signal, min_fringes: int = 3) -> float:
    """
    条纹周期：相邻峰值间隔的平均值

    Raises:
        FitFailure: 峰值少于 min_fringes+1 个
    """
    t = np.asarray(t, dtype=float)
    peaks, _ = find_peaks(np.asarray(signal, dtype=float))
    if peaks.size < min_fringes + 1:
        raise FitFailure(f"found {peaks.size} peaks, need {min_fringes + 1}")
    return float(np.mean(np.diff(t[peaks])))
