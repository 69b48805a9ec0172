#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
时间演化
c(t) = exp(A t)·c(0)，优先使用本征分解，本征值简并或条件数过大时退回 scipy 的 expm
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
import scipy.linalg
from loguru import logger

from model.branches import BranchLabel, BranchSystem, LabelLike, Trajectory, as_label
from model.errors import InvalidTimeGrid, NumericalFailure


# 本征向量矩阵条件数超过该值时改用 scaling-and-squaring
EIG_COND_LIMIT = 1e8
# 极点间距小于 DEGENERACY_GAP·γ 视为简并
DEGENERACY_GAP = 1e-8


def check_time_grid(t_grid) -> np.ndarray:
    """
    检查时间网格

    Raises:
        InvalidTimeGrid: 不是从0开始或不严格递增
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise InvalidTimeGrid("time grid must be a non-empty 1-D sequence")
    if t[0] != 0.0:
        raise InvalidTimeGrid(f"time grid must start at 0, got {t[0]}")
    if not np.all(np.isfinite(t)):
        raise InvalidTimeGrid("time grid contains non-finite values")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise InvalidTimeGrid("time grid must be strictly increasing")
    return t


def default_time_grid(t_max: float = 10.0, n_steps: int = 2000) -> np.ndarray:
    """默认网格：[0, t_max] 上 n_steps 个均匀点"""
    return np.linspace(0.0, t_max, n_steps)


def refine_time_grid(t_max: float, n_steps: int, omega: float, points_per_period: int = 40) -> np.ndarray:
    """保证每个振荡周期至少 points_per_period 个采样点"""
    if omega > 0:
        needed = int(np.ceil(t_max * omega / (2.0 * np.pi) * points_per_period)) + 1
        if needed > n_steps:
            logger.debug(f"refining time grid from {n_steps} to {needed} points (omega={omega:.4g})")
            n_steps = needed
    return default_time_grid(t_max, n_steps)


def ensure_finite(values: np.ndarray, branch: str, t_grid: np.ndarray) -> None:
    """出现 NaN/Inf 时抛出 NumericalFailure，并给出第一个出错时刻"""
    bad = ~np.isfinite(values)
    if np.any(bad):
        rows = np.nonzero(bad.reshape(values.shape[0], -1).any(axis=1))[0]
        raise NumericalFailure("non-finite amplitude", branch=branch, t=float(t_grid[rows[0]]))


def _min_gap(eigvals: np.ndarray) -> float:
    if eigvals.size < 2:
        return np.inf
    gaps = np.abs(eigvals[:, None] - eigvals[None, :])
    np.fill_diagonal(gaps, np.inf)
    return float(gaps.min())


def evolve_branch(matrix: np.ndarray, init: np.ndarray, t_grid: np.ndarray, branch: str = '',
                  gap_tol: float = DEGENERACY_GAP) -> np.ndarray:
    """
    单个分支的演化

    本征向量矩阵条件数不超过 EIG_COND_LIMIT 且本征值间距不小于 gap_tol 时用本征分解，
    否则逐个时刻计算 expm(A t)。

    Args:
        matrix: 耦合矩阵 A
        init: 初始振幅
        t_grid: 时间网格
        branch: 分支名（仅用于日志和报错）
        gap_tol: 简并判据

    Returns:
        (n_t, dim) 复数组
    """
    eigvals, eigvecs = np.linalg.eig(matrix)
    cond = np.linalg.cond(eigvecs)
    if np.isfinite(cond) and cond <= EIG_COND_LIMIT and _min_gap(eigvals) >= gap_tol:
        coeffs = np.linalg.solve(eigvecs, init)
        amps = (np.exp(np.outer(t_grid, eigvals)) * coeffs) @ eigvecs.T
        logger.debug(f"branch {branch}: eigen propagation, cond(V)={cond:.3g}")
    else:
        logger.warning(f"branch {branch}: degenerate or ill-conditioned eigenbasis (cond(V)={cond:.3g}), using expm")
        amps = np.empty((t_grid.size, init.size), dtype=complex)
        for i, t in enumerate(t_grid):
            amps[i] = scipy.linalg.expm(matrix * t) @ init
    amps[t_grid == 0.0] = init
    ensure_finite(amps, branch, t_grid)
    return amps


def propagate(system: BranchSystem, t_grid: Sequence[float],
              branches: Optional[Sequence[LabelLike]] = None) -> Trajectory:
    """
    所有分支的时间演化

    Args:
        system: 分支系统
        t_grid: 从0开始、严格递增的时间网格
        branches: 只演化这些分支，默认全部

    Returns:
        Trajectory
    """
    t = check_time_grid(t_grid)
    labels = system.labels if branches is None else tuple(as_label(l) for l in branches)
    amplitudes: Dict[BranchLabel, np.ndarray] = {}
    for label in labels:
        branch = system.branch(label)
        amplitudes[label] = evolve_branch(branch.matrix, branch.init, t, str(label),
                                         DEGENERACY_GAP * system.params.gamma)
    traj = Trajectory(t, system, amplitudes, {'description': system.description})
    traj.check_norm_monotone()
    return traj


@dataclass(frozen=True)
class PoleDecomposition:
    """
    极点-留数展开 c_slot(t) = Σ_j r_j e^{s_j t}

    Attributes:
        label: 分支标签
        slots: 槽位名
        poles: 极点 s_j（A 的本征值）
        residues: (n_slots, n_poles)，简并时为 None
        degeneracy_flag: 每个极点是否与其他极点近简并
    """

    label: BranchLabel
    slots: tuple
    poles: np.ndarray
    residues: Optional[np.ndarray]
    degeneracy_flag: np.ndarray

    @property
    def degenerate(self) -> bool:
        return bool(np.any(self.degeneracy_flag))

    def evaluate(self, t_grid) -> np.ndarray:
        """重建振幅，返回 (n_t, n_slots)"""
        if self.residues is None:
            raise NumericalFailure("pole decomposition is degenerate, use propagate", branch=str(self.label))
        t = np.asarray(t_grid, dtype=float)
        return np.exp(np.outer(t, self.poles)) @ self.residues.T

    def residues_for(self, slot: str) -> np.ndarray:
        if self.residues is None:
            raise NumericalFailure("pole decomposition is degenerate", branch=str(self.label))
        return self.residues[self.slots.index(slot)]


def pole_decomposition(system: BranchSystem, branch: LabelLike) -> PoleDecomposition:
    """
    分支振幅的拉普拉斯极点展开

    留数由谱投影给出：r_j = V[:, j]·(V⁻¹c(0))_j。极点间距小于 1e-8·γ 时只设置
    简并标志，不计算留数。
    """
    b = system.branch(branch)
    gamma = system.params.gamma
    poles, eigvecs = np.linalg.eig(b.matrix)
    gaps = np.abs(poles[:, None] - poles[None, :])
    np.fill_diagonal(gaps, np.inf)
    flags = gaps.min(axis=1) < DEGENERACY_GAP * gamma
    cond = np.linalg.cond(eigvecs)
    if np.any(flags) or not np.isfinite(cond) or cond > EIG_COND_LIMIT:
        logger.warning(f"branch {b.label}: degenerate poles, residues not available")
        residues = None
    else:
        coeffs = np.linalg.solve(eigvecs, b.init)
        residues = eigvecs * coeffs[None, :]
    return PoleDecomposition(b.label, b.slot_names, poles, residues, np.asarray(flags, dtype=bool))
