#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
量子擦除
对镜子做 (|G⟩ + e^{iφ_M}|G'⟩)/√2 投影测量后，探测原子的激发概率及其 Ramsey 条纹
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple
import math

import numpy as np
import pandas as pd
import scipy.linalg
from loguru import logger

from dynamics.propagator import check_time_grid, propagate
from model.branches import BranchLabel, BranchSystem, MirrorState
from model.errors import InvalidCase, Unsupported
from model.geometry import PhysicalParams


TWO_PI = 2.0 * math.pi
EQUAL_WEIGHTS = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))

LABEL_G = BranchLabel((MirrorState.G,))
LABEL_GP = BranchLabel((MirrorState.GP,))


def wrap_phase(phi):
    """相位约化到 [0, 2π)"""
    return np.mod(phi, TWO_PI)


@dataclass(frozen=True)
class EraserParams:
    """
    擦除测量参数

    Attributes:
        phi_m: 测量基相位
        phi_s: 初始叠加相位
        delta: 基态能级劈裂（角频率，单位 γ），φ_S(t) = φ_S + δ·t
        t_m: 测量时刻
    """

    phi_m: float = 0.0
    phi_s: float = 0.0
    delta: float = 0.0
    t_m: float = 0.0

    def __post_init__(self):
        if not self.t_m >= 0:
            raise InvalidCase(f"eraser.t_m must be >= 0, got {self.t_m}")

    def delta_phi(self, t_m: Optional[float] = None):
        """Δφ(t_M) = φ_M - φ_S - δ·t_M，约化到 [0, 2π)"""
        t = self.t_m if t_m is None else t_m
        return wrap_phase(self.phi_m - self.phi_s - self.delta * np.asarray(t, dtype=float))


def post_erasure_probability(c_a, c_ap, phi_m, weights: Sequence[complex] = EQUAL_WEIGHTS):
    """
    擦除后探测原子的激发概率 P_e = ½|w_G c_A + e^{-iφ_M} w_G' c'_A|²

    c_A、c'_A 为各自分支归一化的振幅，默认权重 1/√2。
    """
    w_g, w_gp = weights
    amplitude = w_g * np.asarray(c_a) + np.exp(-1j * np.asarray(phi_m, dtype=float)) * w_gp * np.asarray(c_ap)
    return 0.5 * np.abs(amplitude) ** 2


def large_n_p_e(x1: float, t_m, delta_phi, params: Optional[PhysicalParams] = None):
    """
    大N极限下的擦除概率

    P_e = (e^{-γt}/4)[1 + e^{γt cos(2k₀x₁)} + 2e^{γt cos(2k₀x₁)/2}cos(Δφ + (γt/2)sin(2k₀x₁))]
    """
    params = params or PhysicalParams()
    theta = 2.0 * params.k0 * x1
    gt = params.gamma * np.asarray(t_m, dtype=float)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    cross = 2.0 * np.exp(0.5 * gt * cos_t) * np.cos(np.asarray(delta_phi, dtype=float) + 0.5 * gt * sin_t)
    return 0.25 * np.exp(-gt) * (1.0 + np.exp(gt * cos_t) + cross)


def mixture_baseline(c_a, c_ap, weights: Sequence[complex] = EQUAL_WEIGHTS):
    """统计混合态基线（去掉干涉项）：½(|w_G c_A|² + |w_G' c'_A|²)"""
    w_g, w_gp = weights
    return 0.5 * (np.abs(w_g * np.asarray(c_a)) ** 2 + np.abs(w_gp * np.asarray(c_ap)) ** 2)


def fringe_visibility(values) -> float:
    """条纹可见度 (max-min)/(max+min)"""
    values = np.asarray(values, dtype=float)
    hi, lo = values.max(), values.min()
    return float((hi - lo) / (hi + lo)) if hi + lo > 0 else 0.0


def _eraser_branches(system: BranchSystem):
    if set(system.labels) != {LABEL_G, LABEL_GP}:
        raise Unsupported(f"eraser needs a single-mirror system, got branches {[str(l) for l in system.labels]}")
    branch_gp = system.branch(LABEL_GP)
    if branch_gp.dim != 1:
        raise Unsupported("eraser needs the transparent branch to hold only the probe")
    return system.branch(LABEL_G), branch_gp


def which_path_overlap(system: BranchSystem, t_grid) -> np.ndarray:
    """
    两个分支中"探测原子+辐射场"部分的重叠 O(t) = ⟨φ_G'|φ_G⟩

    dO/dt = Σ_n κ_n conj(c'_A) c_n，κ_n = -conj(A[A, n])（镜子在探测原子同一侧）。
    用增广矩阵 [[A + conj(a')I, 0], [κᵀ, 0]] 的矩阵指数一次积分得到。

    Returns:
        与 t_grid 等长的复数组
    """
    t = check_time_grid(t_grid)
    branch_g, branch_gp = _eraser_branches(system)
    probe = branch_g.probe_index
    a_prime = complex(branch_gp.matrix[0, 0])
    c_gp0 = complex(branch_gp.init[0])

    dim = branch_g.dim
    kappa = -np.conj(branch_g.matrix[probe])
    kappa[probe] = 0.0
    augmented = np.zeros((dim + 1, dim + 1), dtype=complex)
    augmented[:dim, :dim] = branch_g.matrix + np.conj(a_prime) * np.eye(dim)
    augmented[dim, :dim] = kappa
    start = np.append(branch_g.init, 0.0)

    overlap0 = np.conj(c_gp0) * branch_g.init[probe]
    integral = np.array([(scipy.linalg.expm(augmented * ti) @ start)[dim] for ti in t])
    return overlap0 + np.conj(c_gp0) * integral


def outcome_probability(mirror_population, overlap, phi_m, weights: Sequence[complex] = EQUAL_WEIGHTS):
    """
    测量得到 (|G⟩ + e^{iφ_M}|G'⟩)/√2 的概率

    p = ½[|w_G|²(1 - P_mirror) + |w_G'|² + 2Re(conj(w_G)e^{-iφ_M}w_G' conj(O))]
    """
    w_g, w_gp = weights
    cross = np.conj(w_g) * np.exp(-1j * np.asarray(phi_m, dtype=float)) * w_gp * np.conj(np.asarray(overlap))
    return 0.5 * (abs(w_g) ** 2 * (1.0 - np.asarray(mirror_population)) + abs(w_gp) ** 2 + 2.0 * cross.real)


def ramsey_scan(system: BranchSystem, eraser: EraserParams, t_m_grid) -> pd.DataFrame:
    """
    测量时刻扫描

    对每个 t_M 演化到 t_M，用 Δφ(t_M) = φ_M - φ_S - δ·t_M 计算 P_e。分支权重只取模，
    相位全部由 EraserParams 给出。

    Args:
        system: 单镜分支系统
        eraser: 擦除参数
        t_m_grid: 测量时刻（非负、严格递增）

    Returns:
        DataFrame，列为 t_m, delta_phi, p_e, p_mixture, p_outcome, p_e_conditional
    """
    t_m = np.asarray(t_m_grid, dtype=float)
    prepend = t_m.size == 0 or t_m[0] != 0.0
    t_grid = np.concatenate(([0.0], t_m)) if prepend else t_m
    check_time_grid(t_grid)

    branch_g, _ = _eraser_branches(system)
    traj = propagate(system, t_grid)
    overlap = which_path_overlap(system, t_grid)
    mirror_pop = traj.mirror_population(LABEL_G)
    probe_name = branch_g.slots[branch_g.probe_index].name
    c_a = traj.amplitude(LABEL_G, probe_name)
    c_ap = traj.amplitude(LABEL_GP, 'A')
    if prepend:
        c_a, c_ap, overlap, mirror_pop = c_a[1:], c_ap[1:], overlap[1:], mirror_pop[1:]

    weights: Tuple[float, float] = (abs(system.weight(LABEL_G)), abs(system.weight(LABEL_GP)))
    delta_phi = eraser.delta_phi(t_m)
    p_e = post_erasure_probability(c_a, c_ap, delta_phi, weights)
    p_outcome = outcome_probability(mirror_pop, overlap, delta_phi, weights)
    conditional = np.divide(p_e, p_outcome, out=np.zeros_like(p_e), where=p_outcome > 1e-15)
    logger.info(f"ramsey scan over {t_m.size} measurement times, delta={eraser.delta}")
    return pd.DataFrame({
        't_m': t_m,
        'delta_phi': delta_phi,
        'p_e': p_e,
        'p_mixture': mixture_baseline(c_a, c_ap, weights),
        'p_outcome': p_outcome,
        'p_e_conditional': conditional,
    })


def phase_sweep(c_a: complex, c_ap: complex, n_phi: int = 360,
                weights: Sequence[complex] = EQUAL_WEIGHTS) -> pd.DataFrame:
    """固定 t_M 扫描 φ_M ∈ [0, 2π)"""
    phi = np.arange(n_phi) * TWO_PI / n_phi
    return pd.DataFrame({
        'phi_m': phi,
        'p_e': post_erasure_probability(c_a, c_ap, phi, weights),
        'p_mixture': mixture_baseline(c_a, c_ap, weights) * np.ones(n_phi),
    })
