#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
波导中辐射场强度
由原子振幅历史重建左右传播的导模场，I(x,t)/I₀ 按分支计算后按权重非相干求和
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger
from scipy.interpolate import CubicSpline

from model.branches import BranchLabel, LabelLike, Slot, SlotKind, Trajectory, as_label
from model.errors import HistoryTooShort, Unsupported
from model.geometry import Geometry


TOTAL = 'total'


class IntensityMode(str, Enum):
    """逐原子推迟 / 无延迟集体近似"""

    PER_ATOM_RETARDED = 'per_atom_retarded'
    NO_DELAY_COLLECTIVE = 'no_delay_collective'


@dataclass(frozen=True)
class IntensityField:
    """
    归一化强度 I/I₀

    Attributes:
        x_grid: 位置（单位 λ₀）
        t_grid: 时间（单位 1/γ）
        values: 分支名或 'total' -> (n_t, n_x) 非负实数组
        weights: 分支名 -> |w|²
    """

    x_grid: np.ndarray
    t_grid: np.ndarray
    values: Dict[str, np.ndarray]
    weights: Dict[str, float] = field(default_factory=dict)

    def branch(self, label: LabelLike) -> np.ndarray:
        key = label if label == TOTAL else str(as_label(label))
        return self.values[key]

    @property
    def total(self) -> np.ndarray:
        return self.values[TOTAL]

    def steady_state_profile(self, label: LabelLike, t_min: float = 5.0, fraction: float = 0.1) -> np.ndarray:
        """稳态空间分布：时间窗口最后 fraction 部分（且 γt ≥ t_min）的平均"""
        t_start = max(t_min, self.t_grid[-1] - fraction * (self.t_grid[-1] - self.t_grid[0]))
        rows = self.t_grid >= t_start
        if not np.any(rows):
            raise HistoryTooShort("intensity window does not reach the steady state", required_t_max=t_min)
        return self.branch(label)[rows].mean(axis=0)

    def to_frame(self) -> pd.DataFrame:
        """长表格式：t, x, branch, intensity"""
        tt, xx = np.meshgrid(self.t_grid, self.x_grid, indexing='ij')
        frames = [
            pd.DataFrame({'t': tt.ravel(), 'x': xx.ravel(), 'branch': name, 'intensity': values.ravel()})
            for name, values in self.values.items()
        ]
        return pd.concat(frames, ignore_index=True)


class AmplitudeInterpolator:
    """按 (分支, 槽位) 缓存实部和虚部的三次样条"""

    def __init__(self, traj: Trajectory):
        self.traj = traj
        self._splines = {}

    def _spline(self, label: BranchLabel, slot: str):
        key = (label, slot)
        if key not in self._splines:
            values = self.traj.amplitude(label, slot)
            t = self.traj.t_grid
            if t.size < 2:
                raise HistoryTooShort("trajectory has a single time point", required_t_max=None)
            # 实部虚部分别建样条
            self._splines[key] = (CubicSpline(t, values.real), CubicSpline(t, values.imag))
            logger.debug(f"built interpolation spline for {label}/{slot}")
        return self._splines[key]

    def __call__(self, label: LabelLike, slot: str, t) -> np.ndarray:
        """
        插值振幅

        Raises:
            HistoryTooShort: t 超出 [0, t_max]
        """
        t = np.asarray(t, dtype=float)
        if t.size and (t.min() < self.traj.t_grid[0] or t.max() > self.traj.t_max):
            raise HistoryTooShort(
                f"amplitude requested at t in [{t.min():.6g}, {t.max():.6g}] outside the trajectory",
                required_t_max=float(t.max()),
            )
        re_spline, im_spline = self._spline(as_label(label), slot)
        return re_spline(t) + 1j * im_spline(t)


def interpolate_amplitude(traj: Trajectory, label: LabelLike, slot: str, t) -> np.ndarray:
    """三次样条插值（实部虚部分别插值），网格点上返回存储值"""
    return AmplitudeInterpolator(traj)(label, slot, t)


def default_x_grid(geom: Geometry, n_x: int = 800) -> np.ndarray:
    x1 = geom.x1
    return np.linspace(-4.0 * x1, 4.0 * x1, n_x)


def default_intensity_t_grid(t_max: float = 10.0, n_t: int = 500) -> np.ndarray:
    return np.linspace(0.0, t_max, n_t)


def _emitter_field(interp: AmplitudeInterpolator, label: BranchLabel, slot: Slot, anchor: float,
                   tt: np.ndarray, xx: np.ndarray, k0: float, v: float, h0: float) -> np.ndarray:
    """
    单个发射体的左右传播场

    右行：e^{ik₀(x-x_s)}·c(t-(x-a)/v)·[Θ(t-(x-a)/v) - Θ(-(x-a)/v)]
    左行：e^{-ik₀(x-x_s)}·c(t+(x-a)/v)·[Θ(t+(x-a)/v) - Θ((x-a)/v)]
    x_s 为相位参考位置，a 为推迟时间参考位置。
    """
    # 推迟时间和光锥门函数
    delay = (xx - anchor) / v
    gate_right = np.heaviside(tt - delay, h0) - np.heaviside(-delay, h0)
    gate_left = np.heaviside(tt + delay, h0) - np.heaviside(delay, h0)
    # 右行和左行推迟场叠加
    result = np.zeros(tt.shape, dtype=complex)
    for gate, tau, sign in ((gate_right, tt - delay, 1.0), (gate_left, tt + delay, -1.0)):
        active = gate != 0.0
        if not np.any(active):
            continue
        amp = interp(label, slot.name, np.clip(tau[active], 0.0, None))
        carrier = np.exp(sign * 1j * k0 * (xx[active] - slot.position))
        result[active] += gate[active] * carrier * amp
    return slot.field_scale * result


def intensity_map(traj: Trajectory, geom: Optional[Geometry] = None,
                  x_grid: Optional[Sequence[float]] = None,
                  t_grid: Optional[Sequence[float]] = None,
                  mode: IntensityMode = IntensityMode.NO_DELAY_COLLECTIVE,
                  heaviside_zero: float = 0.5) -> IntensityField:
    """
    计算强度图

    Args:
        traj: 振幅轨迹
        geom: 几何（用于默认位置网格）
        x_grid: 位置网格，默认 [-4x₁, 4x₁] 800 点
        t_grid: 时间网格，默认 [0, 10] 500 点
        mode: PER_ATOM_RETARDED 要求逐原子轨迹；NO_DELAY_COLLECTIVE 中每个镜子原子
              以所属镜子最近原子为推迟时间参考
        heaviside_zero: Θ(0) 的取值。取 1/2 时每个发射体所在位置的场是左右两侧的平均，
            探测原子处的节点得以保留；取 1 时发射体在自身位置的场为零，x=0 处只剩镜子的场，节点消失

    Returns:
        IntensityField

    Raises:
        HistoryTooShort: 轨迹时间范围不够
        Unsupported: 对集体轨迹要求逐原子推迟
    """
    mode = IntensityMode(mode)
    if x_grid is None:
        if geom is None:
            geom = traj.system.geometry
        if geom is None:
            raise Unsupported("x_grid is required when the trajectory carries no geometry")
        x_grid = default_x_grid(geom)
    x = np.asarray(x_grid, dtype=float)
    t = default_intensity_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    if t.size and t.max() > traj.t_max:
        raise HistoryTooShort("intensity window exceeds the trajectory", required_t_max=float(t.max()))

    params = traj.params
    tt, xx = np.meshgrid(t, x, indexing='ij')
    interp = AmplitudeInterpolator(traj)
    values: Dict[str, np.ndarray] = {}
    weights: Dict[str, float] = {}
    total = np.zeros(tt.shape)

    for label in traj.labels:
        slots = traj.slots(label)
        if mode is IntensityMode.PER_ATOM_RETARDED and any(s.kind is SlotKind.COLLECTIVE for s in slots):
            raise Unsupported("per-atom retarded intensity needs a full-array trajectory")
        # 分支内所有发射体的场相干叠加
        amplitude = np.zeros(tt.shape, dtype=complex)
        for slot in slots:
            if mode is IntensityMode.PER_ATOM_RETARDED or slot.kind is SlotKind.PROBE:
                anchor = slot.position
            else:
                anchor = slot.retardation_anchor
            amplitude += _emitter_field(interp, label, slot, anchor, tt, xx, params.k0, params.v, heaviside_zero)
        intensity = np.abs(amplitude) ** 2
        values[str(label)] = intensity
        # 按分支权重非相干求和
        weight = abs(traj.system.weight(label)) ** 2
        weights[str(label)] = weight
        total += weight * intensity

    values[TOTAL] = total
    logger.info(f"intensity map {t.size}x{x.size} over {len(traj.labels)} branches ({mode.value})")
    return IntensityField(x, t, values, weights)
