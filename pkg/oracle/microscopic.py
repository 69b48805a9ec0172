#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
离散模式微观模拟
在单激发子空间中直接积分原子-导模耦合方程（旋转坐标系），不做马尔可夫近似，
用来独立检验集体约化和强度重建
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence
import math

import numpy as np
from loguru import logger
from scipy.integrate import solve_ivp

from dynamics.propagator import check_time_grid
from model.branches import BranchLabel, BranchSystem, LabelLike, Trajectory, as_label
from model.builders import build_full_array
from model.errors import InvalidModeGrid, NumericalFailure, OracleWindowExceeded
from model.geometry import Geometry, PhysicalParams


MAX_DIMENSION = 200_000
MIN_BANDWIDTH = 50.0
# Δω ≤ γ/20：衰减线宽内至少 20 个模式，回归时间 2π/Δω ≥ 126/γ 远大于模拟时长
MAX_MODE_SPACING = 1.0 / 20.0


@dataclass(frozen=True)
class ModeGrid:
    """
    ±k₀ 附近的对称离散模式

    Attributes:
        params: 物理参数
        n_modes: 每个传播方向的模式数 M
        bandwidth: 全带宽 W（单位 γ，对应波数带宽 W·γ/v）

    W ≥ 50γ 使带外的洛伦兹尾部可以忽略，其截断误差随 1/W 减小；
    模式间距 Δω = W/M 不超过 γ/20，否则线宽分辨不足且很快出现回归。
    """

    params: PhysicalParams
    n_modes: int = 2000
    bandwidth: float = 100.0

    def __post_init__(self):
        gamma = self.params.gamma
        if self.n_modes < 1:
            raise InvalidModeGrid(f"oracle.n_modes must be positive, got {self.n_modes}")
        if self.bandwidth < MIN_BANDWIDTH:
            raise InvalidModeGrid(f"oracle.bandwidth must be >= {MIN_BANDWIDTH:g} gamma, got {self.bandwidth}")
        if self.delta_omega > MAX_MODE_SPACING * gamma * (1 + 1e-12):
            raise InvalidModeGrid(
                f"mode spacing {self.delta_omega:.4g} exceeds gamma/20; raise n_modes above {self.bandwidth * 20:g}"
            )

    @property
    def delta_omega(self) -> float:
        return self.bandwidth * self.params.gamma / self.n_modes

    @property
    def detunings(self) -> np.ndarray:
        """单个方向的失谐 Δ_j，关于0对称"""
        return (np.arange(self.n_modes) - (self.n_modes - 1) / 2.0) * self.delta_omega

    @property
    def k_values(self) -> np.ndarray:
        """先 +k 后 -k，|k| = k₀ + Δ/v"""
        k = self.params.k0 + self.detunings / self.params.v
        return np.concatenate((k, -k))

    @property
    def mode_detunings(self) -> np.ndarray:
        return np.concatenate((self.detunings, self.detunings))

    @property
    def coupling(self) -> float:
        """每个模式的耦合 g = g₀√(Δω/2)，使 γ = 4πg²/Δω"""
        return self.params.g0 * math.sqrt(self.delta_omega / 2.0)

    @property
    def recurrence_time(self) -> float:
        return 2.0 * math.pi / self.delta_omega


@dataclass(frozen=True)
class MicroscopicResult:
    """
    微观模拟结果

    Attributes:
        trajectory: 原子振幅，槽位与 build_full_array 相同（M1..MN, A）
        modes: 模式网格
        mode_amplitudes: 分支 -> (n_t, 2M) 旋转坐标系模式振幅
    """

    trajectory: Trajectory
    modes: ModeGrid
    mode_amplitudes: Dict[BranchLabel, np.ndarray]

    def norm(self, label: LabelLike) -> np.ndarray:
        label = as_label(label)
        atoms = np.sum(np.abs(self.trajectory.amplitudes[label]) ** 2, axis=1)
        field = np.sum(np.abs(self.mode_amplitudes[label]) ** 2, axis=1)
        return atoms + field

    def time_index(self, t: float) -> int:
        t_grid = self.trajectory.t_grid
        idx = int(np.argmin(np.abs(t_grid - t)))
        if not math.isclose(t_grid[idx], t, rel_tol=1e-12, abs_tol=1e-12):
            raise KeyError(f"t={t} is not on the oracle time grid")
        return idx


def markov_reference(params: PhysicalParams, geom: Geometry) -> BranchSystem:
    """与微观模拟同槽位的逐原子马尔可夫系统"""
    positions = [mirror.positions(params) for mirror in geom.mirrors]
    ids = np.concatenate([np.full(len(p), i) for i, p in enumerate(positions)])
    return build_full_array(params, np.concatenate(positions), geom.x_a, mirror_ids=ids, geometry=geom)


def _integrate_branch(positions: np.ndarray, init: np.ndarray, modes: ModeGrid, t_grid: np.ndarray,
                      rtol: float, atol: float, label: str):
    n_atoms = positions.size
    coupling = modes.coupling * np.exp(1j * np.outer(positions, modes.k_values))
    coupling_h = coupling.conj().T
    detuning = modes.mode_detunings

    def rhs(_t, y):
        c = y[:n_atoms]
        b = y[n_atoms:]
        dc = -1j * (coupling @ b)
        db = -1j * (detuning * b) - 1j * (coupling_h @ c)
        return np.concatenate((dc, db))

    y0 = np.concatenate((init.astype(complex), np.zeros(coupling.shape[1], dtype=complex)))
    if t_grid[-1] == 0.0:
        return y0[None, :]
    sol = solve_ivp(rhs, (0.0, float(t_grid[-1])), y0, method='DOP853', t_eval=t_grid, rtol=rtol, atol=atol)
    if not sol.success:
        raise NumericalFailure(f"oracle integration failed: {sol.message}", branch=label)
    return sol.y.T


def simulate_microscopic(params: PhysicalParams, geom: Geometry, modes: ModeGrid, t_grid: Sequence[float],
                         branches: Optional[Sequence[LabelLike]] = None,
                         rtol: float = 1e-10, atol: float = 1e-12) -> MicroscopicResult:
    """
    离散模式微观模拟

    db_k/dt = -iΔ_k b_k - i g Σ_a c_a e^{-ikx_a}
    dc_a/dt = -i g Σ_k b_k e^{ikx_a}

    Args:
        params: 物理参数
        geom: 几何，每个分支只包含处于 G 态的镜子原子和探测原子
        modes: 模式网格
        t_grid: 从0开始的时间网格
        branches: 只模拟这些分支，默认全部
        rtol: 积分相对容差
        atol: 积分绝对容差

    Returns:
        MicroscopicResult

    Raises:
        InvalidModeGrid: 总维数超过上限
        OracleWindowExceeded: 模拟时间超过回归时间 2π/Δω
    """
    t = check_time_grid(t_grid)
    system = markov_reference(params, geom)
    n_atoms_total = sum(m.n_atoms for m in geom.mirrors) + 1
    dimension = n_atoms_total + 2 * modes.n_modes
    if dimension > MAX_DIMENSION:
        raise InvalidModeGrid(f"oracle dimension {dimension} exceeds {MAX_DIMENSION}")
    if t[-1] > modes.recurrence_time:
        raise OracleWindowExceeded(
            f"t_max={t[-1]:g} exceeds the mode recurrence time {modes.recurrence_time:.4g}"
        )
    if t[-1] > 0.5 * modes.recurrence_time:
        logger.warning(f"oracle window t_max={t[-1]:g} is close to recurrence {modes.recurrence_time:.4g}")

    labels = system.labels if branches is None else tuple(as_label(l) for l in branches)
    atom_amps: Dict[BranchLabel, np.ndarray] = {}
    mode_amps: Dict[BranchLabel, np.ndarray] = {}
    for label in labels:
        branch = system.branch(label)
        positions = np.array([slot.position for slot in branch.slots])
        states = _integrate_branch(positions, np.asarray(branch.init), modes, t, rtol, atol, str(label))
        atom_amps[label] = states[:, :branch.dim]
        mode_amps[label] = states[:, branch.dim:]
        logger.info(f"oracle branch {label}: {branch.dim} atoms, {2 * modes.n_modes} modes, {t.size} samples")

    traj = Trajectory(t, system, atom_amps, {'description': f"oracle {system.description}"})
    return MicroscopicResult(traj, modes, mode_amps)


def intensity_from_modes(result: MicroscopicResult, label: LabelLike, x, t: float) -> np.ndarray:
    """
    模式求和得到的强度 I/I₀ = |Σ_k b_k(t)e^{ikx}|²·Δω/(πγ)

    Args:
        result: 微观模拟结果
        label: 分支
        x: 位置（标量或数组）
        t: 时间，必须在模拟网格上
    """
    modes = result.modes
    b = result.mode_amplitudes[as_label(label)][result.time_index(t)]
    x = np.atleast_1d(np.asarray(x, dtype=float))
    field = np.exp(1j * np.outer(x, modes.k_values)) @ b
    return np.abs(field) ** 2 * modes.delta_omega / (math.pi * modes.params.gamma)
