#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
解析解
单镜有限N双极点解、单镜和腔的大N极限
"""

from enum import Enum
from typing import Optional, Tuple
import math

import numpy as np
from loguru import logger

from model.errors import InvalidCase, InvalidGeometry
from model.geometry import Geometry, PhysicalParams, ScenarioKind


# 判断节点/腹点几何时 e^{2ik₀x₁} 的容差
PHASE_TOL = 1e-9
# 近节点情形要求 0 < k₀|x_A| 不超过该值
NEAR_NODE_MAX_PHASE = 0.5


class ClosedFormKind(str, Enum):
    """解析解类型，每种类型只在对应几何下成立"""

    SINGLE_MIRROR_FINITE_N = 'single_mirror_finite_n'
    SINGLE_MIRROR_LARGE_N = 'single_mirror_large_n'
    OPEN_WAVEGUIDE = 'open_waveguide'
    CAVITY_NODE = 'cavity_node'
    CAVITY_ANTINODE = 'cavity_antinode'
    CAVITY_NEAR_NODE = 'cavity_near_node'


def open_waveguide(params: PhysicalParams, t, c_a0: complex = 1.0) -> np.ndarray:
    """透明镜子（开放波导）：c'_A(t) = c'_A(0)e^{-γt/2}"""
    return c_a0 * np.exp(-0.5 * params.gamma * np.asarray(t, dtype=float))


def single_mirror_roots(params: PhysicalParams, n_atoms: int, x1: float) -> Tuple[complex, complex]:
    """
    特征方程 s² + (N+1)(γ/2)s + N(γ²/4)(1 - e^{2ik₀x₁}) = 0 的两个根

    Returns:
        (s₊, s₋)，按实部从大到小
    """
    gamma = params.gamma
    coeffs = [1.0, (n_atoms + 1) * gamma / 2.0, n_atoms * gamma ** 2 / 4.0 * (1.0 - params.phase(2.0 * x1))]
    # 求根后按实部从大到小排序，节点处 s₊ = 0
    roots = np.roots(coeffs)
    roots = sorted(roots, key=lambda s: (-s.real, -s.imag))
    return complex(roots[0]), complex(roots[1])


def printed_pole_formula(params: PhysicalParams, n_atoms: int, x1: float) -> Tuple[complex, complex]:
    """
    另一种常见的极点写法 -(γ/2)[(N+1)/2 ± √((N+1)²/4 + N e^{2ik₀x₁})]

    与特征方程不一致（根号内应为 (N-1)²/4），只用于对比，不参与计算。
    """
    root = np.sqrt((n_atoms + 1) ** 2 / 4.0 + n_atoms * params.phase(2.0 * x1) + 0j)
    base = (n_atoms + 1) / 2.0
    return complex(-0.5 * params.gamma * (base - root)), complex(-0.5 * params.gamma * (base + root))


def _single_mirror_geometry(geom: Geometry, n_atoms: Optional[int]) -> Tuple[int, float]:
    if geom.kind is not ScenarioKind.SINGLE_MIRROR or geom.x_a != 0.0:
        raise InvalidCase("single-mirror closed form needs a single_mirror geometry with the probe at x_a=0")
    mirror = geom.mirrors[0]
    return (mirror.n_atoms if n_atoms is None else int(n_atoms)), float(mirror.x_first)


def closed_form_single_mirror(params: PhysicalParams, geom: Geometry, t,
                              n_atoms: Optional[int] = None,
                              c_a0: complex = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """
    单镜有限N双极点解（c_QM(0)=0）

    c_A(t)  = [(s₊+Nγ/2)e^{s₊t} - (s₋+Nγ/2)e^{s₋t}] / (s₊-s₋) · c_A(0)
    c_QM(t) = -(√N γ/2)e^{ik₀x₁}(e^{s₊t} - e^{s₋t}) / (s₊-s₋) · c_A(0)

    Args:
        params: 物理参数
        geom: 单镜几何（布拉格间距，探测原子在原点）
        t: 时间（标量或数组）
        n_atoms: 覆盖几何中的原子数
        c_a0: 探测原子初始振幅

    Returns:
        (c_A, c_QM)
    """
    n, x1 = _single_mirror_geometry(geom, n_atoms)
    if not geom.mirrors[0].is_bragg(params):
        raise InvalidCase("single-mirror closed form needs Bragg spacing")
    # 计算两个极点和对应的指数项
    s_plus, s_minus = single_mirror_roots(params, n, x1)
    t = np.asarray(t, dtype=float)
    gamma = params.gamma
    e_plus = np.exp(s_plus * t)
    e_minus = np.exp(s_minus * t)
    denom = s_plus - s_minus
    half_n = n * gamma / 2.0
    # 双极点展开
    c_a = ((s_plus + half_n) * e_plus - (s_minus + half_n) * e_minus) / denom * c_a0
    c_qm = -(math.sqrt(n) * gamma / 2.0) * params.phase(x1) * (e_plus - e_minus) / denom * c_a0
    return c_a, c_qm


def large_n_single_mirror(params: PhysicalParams, x1: float, t, c_a0: complex = 1.0) -> np.ndarray:
    """
    单镜大N极限

    c_A,∞(t) = c_A(0)·e^{i(γt/2)sin(2k₀x₁)}·e^{-(γt/2)(1-cos(2k₀x₁))}
    """
    t = np.asarray(t, dtype=float)
    theta = 2.0 * params.k0 * x1
    half = 0.5 * params.gamma * t
    return c_a0 * np.exp(1j * half * math.sin(theta)) * np.exp(-half * (1.0 - math.cos(theta)))


def large_n_single_mirror_mirror_amplitude(params: PhysicalParams, n_atoms: int, x1: float, t,
                                           c_a0: complex = 1.0) -> np.ndarray:
    """大N下镜子集体振幅的绝热解 c_QM ≈ -e^{ik₀x₁}c_A,∞/√N"""
    return -params.phase(x1) * large_n_single_mirror(params, x1, t, c_a0) / math.sqrt(n_atoms)


def cavity_standing_wave_allowed(params: PhysicalParams, x1: float) -> bool:
    """腔长 2x₁ 不小于 λ₀/2 时才存在驻波模式"""
    return 2.0 * x1 >= params.lambda0 / 2.0


def _phase_close(params: PhysicalParams, distance: float, target: complex) -> bool:
    return abs(complex(params.phase(distance)) - target) < PHASE_TOL


def classify_cavity(params: PhysicalParams, x_a: float, x1: float) -> Optional[ClosedFormKind]:
    """判断腔几何属于哪种大N解析情形，不属于任何情形时返回 None"""
    node_spacing = _phase_close(params, 2.0 * x1, 1.0)
    antinode_spacing = _phase_close(params, 2.0 * x1, -1.0)
    phase_a = params.k0 * abs(x_a)
    if phase_a < PHASE_TOL:
        if node_spacing:
            return ClosedFormKind.CAVITY_NODE
        if antinode_spacing:
            return ClosedFormKind.CAVITY_ANTINODE
        return None
    if node_spacing and phase_a <= NEAR_NODE_MAX_PHASE:
        return ClosedFormKind.CAVITY_NEAR_NODE
    return None


def large_n_cavity(params: PhysicalParams, case: ClosedFormKind, x_a: float, x1: float,
                   n_atoms: int, t, c_a0: complex = 1.0) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    腔（GG 分支）大N极限

    节点：c_A 不变，c_QM → 0
    腹点：c_A = c(0)e^{-γt/4}cos(Ωt)，c_QMj = -(e^{ik₀x₁}/√2)c(0)e^{-γt/4}sin(Ωt)，Ω = √(N/2)γ
    近节点：c_A = c(0)cos(k₀x_A·Ωt)，c_QM1 = -c_QM2 = -(i e^{ik₀x₁}/√2)c(0)sin(k₀x_A·Ωt)

    腹点的镜子振幅取 1/√2 使总概率守恒。

    Returns:
        (c_A, c_QM1, c_QM2)

    Raises:
        InvalidCase: 情形与几何不匹配
    """
    if case not in (ClosedFormKind.CAVITY_NODE, ClosedFormKind.CAVITY_ANTINODE, ClosedFormKind.CAVITY_NEAR_NODE):
        raise InvalidCase(f"{case.value} is not a cavity case")
    actual = classify_cavity(params, x_a, x1)
    if actual is not case:
        found = actual.value if actual is not None else 'none'
        raise InvalidCase(f"geometry x_a={x_a}, x1={x1} does not match {case.value} (classified as {found})")
    if n_atoms < 1:
        raise InvalidGeometry(f"n_atoms must be >= 1, got {n_atoms}")

    # 真空拉比频率 Ω = √(N/2)γ
    t = np.asarray(t, dtype=float)
    gamma = params.gamma
    omega = math.sqrt(n_atoms / 2.0) * gamma
    mirror_phase = complex(params.phase(x1))

    if case is ClosedFormKind.CAVITY_NODE:
        c_a = np.full(t.shape, c_a0, dtype=complex)
        zeros = np.zeros(t.shape, dtype=complex)
        return c_a, zeros, zeros.copy()

    if case is ClosedFormKind.CAVITY_ANTINODE:
        envelope = np.exp(-0.25 * gamma * t)
        c_a = c_a0 * envelope * np.cos(omega * t) + 0j
        c_qm = -(mirror_phase / math.sqrt(2.0)) * c_a0 * envelope * np.sin(omega * t)
        return c_a, c_qm, c_qm.copy()

    # 近节点：拉比频率按 k₀x_A 缩小，两镜反相
    rabi = params.k0 * x_a * omega
    c_a = c_a0 * np.cos(rabi * t) + 0j
    c_qm1 = -(1j * mirror_phase / math.sqrt(2.0)) * c_a0 * np.sin(rabi * t)
    logger.debug(f"near-node Rabi frequency {rabi:.6g}")
    return c_a, c_qm1, -c_qm1
