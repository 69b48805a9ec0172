#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
交叉验证
汇总解析解、逐原子模型和离散模式微观模拟之间的全部对照检查
"""

from dataclasses import dataclass
from typing import Callable, List, Optional
import math

import numpy as np
import pandas as pd
from loguru import logger

from dynamics.closed_forms import (
    ClosedFormKind, closed_form_single_mirror, large_n_cavity, large_n_single_mirror, open_waveguide,
)
from dynamics.fitting import decay_rate, envelope_decay_rate, fringe_period, zero_crossing_frequency
from dynamics.propagator import default_time_grid, pole_decomposition, propagate
from eraser.erasure import EraserParams, large_n_p_e, post_erasure_probability, ramsey_scan
from field.intensity import intensity_map
from model.builders import (
    build_cavity_collective, build_full_array, build_single_mirror_collective, collective_projection,
)
from model.errors import QuantumMirrorError
from model.geometry import Geometry, PhysicalParams
from .microscopic import ModeGrid, intensity_from_modes, simulate_microscopic


@dataclass
class CheckResult:
    """单项检查结果"""

    name: str
    passed: bool
    deviation: float
    tolerance: float
    detail: str = ''


@dataclass
class ValidationSettings:
    """
    交叉验证参数

    Attributes:
        n_atoms: 集体模型原子数
        include_oracle: 是否运行离散模式微观模拟
        oracle_atoms: 微观模拟中的镜子原子数
        oracle_modes: 每个方向的模式数
        oracle_bandwidth: 全带宽（单位 γ）
        oracle_v: 微观模拟使用的导模速度
        oracle_t_max: 微观模拟时长
        oracle_steps: 微观模拟采样点数
        rtol: 积分相对容差
        atol: 积分绝对容差
    """

    n_atoms: int = 100
    include_oracle: bool = True
    oracle_atoms: int = 10
    oracle_modes: int = 2000
    oracle_bandwidth: float = 100.0
    oracle_v: float = 1000.0
    oracle_t_max: float = 5.0
    oracle_steps: int = 101
    rtol: float = 1e-10
    atol: float = 1e-12


def _check(name: str, deviation: float, tolerance: float, detail: str = '', upper: bool = True) -> CheckResult:
    passed = deviation <= tolerance if upper else deviation >= tolerance
    return CheckResult(name, bool(passed), float(deviation), float(tolerance), detail)


class CrossCheckSuite:
    """
    交叉验证套件

    每个检查方法返回 CheckResult 列表；run 逐个执行，单项异常记为失败并继续。
    """

    def __init__(self, params: Optional[PhysicalParams] = None, settings: Optional[ValidationSettings] = None):
        self.params = params or PhysicalParams()
        self.settings = settings or ValidationSettings()
        self.t_grid = default_time_grid(10.0, 2000)

    def checks(self) -> List[Callable[[], List[CheckResult]]]:
        items = [
            self.check_open_waveguide,
            self.check_single_mirror_node,
            self.check_single_mirror_antinode,
            self.check_collective_reduction,
            self.check_cavity_cases,
            self.check_eraser,
            self.check_intensity_structure,
        ]
        if self.settings.include_oracle:
            items.append(self.check_oracle)
        return items

    def run(self) -> pd.DataFrame:
        results: List[CheckResult] = []
        for check in self.checks():
            try:
                results.extend(check())
            except QuantumMirrorError as e:
                logger.error(f"{check.__name__} failed: {e}")
                results.append(CheckResult(check.__name__, False, math.nan, math.nan, str(e)))
        frame = pd.DataFrame([r.__dict__ for r in results])
        logger.info(f"validation: {int(frame['passed'].sum())}/{len(frame)} checks passed")
        return frame

    def check_open_waveguide(self) -> List[CheckResult]:
        system = build_single_mirror_collective(self.params, Geometry.single_mirror(self.settings.n_atoms, 1.5))
        traj = propagate(system, self.t_grid, branches=['Gp'])
        expected = np.abs(open_waveguide(self.params, self.t_grid)) ** 2
        dev = np.max(np.abs(traj.probability('Gp', 'A') - expected))
        return [_check('open_waveguide_decay', dev, 1e-12)]

    def check_single_mirror_node(self) -> List[CheckResult]:
        n = self.settings.n_atoms
        geom = Geometry.single_mirror(n, 1.5)
        system = build_single_mirror_collective(self.params, geom)
        traj = propagate(system, self.t_grid)
        c_a = traj.amplitude('G', 'A')
        closed_a, _ = closed_form_single_mirror(self.params, geom, self.t_grid)
        large = large_n_single_mirror(self.params, 1.5, self.t_grid)
        poles = np.sort_complex(pole_decomposition(system, 'G').poles)
        expected_poles = np.sort_complex(np.array([-(n + 1) * self.params.gamma / 2.0, 0.0]))
        return [
            _check('node_plateau', float(np.abs(c_a[-1]) ** 2), 0.9, upper=False),
            _check('node_closed_form', float(np.max(np.abs(c_a - closed_a))), 1e-9),
            _check('node_large_n', float(np.max(np.abs(np.abs(large) ** 2 - np.abs(c_a) ** 2))), 0.05),
            _check('node_poles', float(np.max(np.abs(poles - expected_poles))), 1e-10 * self.params.gamma),
        ]

    def check_single_mirror_antinode(self) -> List[CheckResult]:
        system = build_single_mirror_collective(self.params, Geometry.single_mirror(self.settings.n_atoms, 1.25))
        traj = propagate(system, self.t_grid, branches=['G'])
        rate = decay_rate(self.t_grid, traj.probability('G', 'A'), 0.5, 2.0)
        target = 2.0 * self.params.gamma
        return [_check('antinode_decay_rate', abs(rate - target) / target, 0.02, f"rate={rate:.5g}")]

    def check_collective_reduction(self) -> List[CheckResult]:
        n = self.settings.n_atoms
        geom = Geometry.single_mirror(n, 1.5)
        collective = propagate(build_single_mirror_collective(self.params, geom), self.t_grid, branches=['G'])
        full = propagate(build_full_array(self.params, geom.mirrors[0].positions(self.params), 0.0),
                         self.t_grid, branches=['G'])
        dev_single = np.max(np.abs(collective.amplitude('G', 'A') - full.amplitude('G', 'A')))

        n_side = 6
        cav_geom = Geometry.cavity(n_side, 1.5)
        cavity = build_cavity_collective(self.params, cav_geom).branch('GG')
        qm1, qm2 = (m.positions(self.params) for m in cav_geom.mirrors)
        full_cav = build_full_array(self.params, np.concatenate((qm1, qm2)), 0.0,
                                    mirror_ids=[0] * n_side + [1] * n_side).branch('GG')
        groups = [[f"M{i + 1}" for i in range(n_side)], [f"M{n_side + i + 1}" for i in range(n_side)]]
        dev_cavity = np.max(np.abs(collective_projection(full_cav, groups) - cavity.matrix))
        return [
            _check('collective_vs_full_single_mirror', float(dev_single), 1e-10),
            _check('collective_vs_full_cavity_matrix', float(dev_cavity), 1e-12),
        ]

    def check_cavity_cases(self) -> List[CheckResult]:
        n = self.settings.n_atoms
        gamma = self.params.gamma
        results = []

        antinode = propagate(build_cavity_collective(self.params, Geometry.cavity(n, 1.25)), self.t_grid, ['GG'])
        omega = zero_crossing_frequency(self.t_grid, antinode.amplitude('GG', 'A').real)
        target = math.sqrt(n / 2.0) * gamma
        envelope = envelope_decay_rate(self.t_grid, antinode.population('GG'), 1.0, 8.0)
        results.append(_check('cavity_antinode_frequency', abs(omega - target) / target, 0.05, f"omega={omega:.5g}"))
        results.append(_check('cavity_antinode_envelope', abs(envelope - gamma / 4) / (gamma / 4), 0.10,
                              f"rate={envelope:.5g}"))

        node = propagate(build_cavity_collective(self.params, Geometry.cavity(n, 1.5)), self.t_grid, ['GG'])
        results.append(_check('cavity_node_plateau', float(node.probability('GG', 'A')[-1]), 0.98, upper=False))
        qm_max = max(node.probability('GG', 'QM1').max(), node.probability('GG', 'QM2').max())
        results.append(_check('cavity_node_mirror_population', float(qm_max), 2.0 / n))

        x_a = 0.01 * self.params.lambda0
        t_long = default_time_grid(80.0, 8000)
        near = propagate(build_cavity_collective(self.params, Geometry.cavity(n, 1.5, x_a)), t_long, ['GG'])
        rabi = zero_crossing_frequency(t_long, near.amplitude('GG', 'A').real, min_periods=3)
        target_rabi = self.params.k0 * x_a * math.sqrt(n / 2.0) * gamma
        results.append(_check('cavity_near_node_rabi', abs(rabi - target_rabi) / target_rabi, 0.10, f"rabi={rabi:.5g}"))

        # 大 N 极限只到 O(1/sqrt(N))，和数值传播的结果对照
        scale = 1.0 / math.sqrt(n)
        for name, case, x1, x_atom, traj, t in (
            ('cavity_antinode', ClosedFormKind.CAVITY_ANTINODE, 1.25, 0.0, antinode, self.t_grid),
            ('cavity_near_node', ClosedFormKind.CAVITY_NEAR_NODE, 1.5, x_a, near, t_long),
        ):
            c_a, c_qm1, c_qm2 = large_n_cavity(self.params, case, x_atom, x1, n, t)
            dev_a = np.max(np.abs(traj.amplitude('GG', 'A') - c_a))
            dev_qm = max(np.max(np.abs(traj.amplitude('GG', 'QM1') - c_qm1)),
                         np.max(np.abs(traj.amplitude('GG', 'QM2') - c_qm2)))
            results.append(_check(f"{name}_large_n_atom", float(dev_a), 0.5 * scale))
            results.append(_check(f"{name}_large_n_mirrors", float(dev_qm), scale))

        # 近节点时两面镜子反相，对称分量被强阻尼压到 O(1/sqrt(N))
        sym = np.max(np.abs(near.amplitude('GG', 'QM1') + near.amplitude('GG', 'QM2')))
        results.append(_check('cavity_near_node_antisymmetry', float(sym), 1.5 * scale))
        return results

    def check_eraser(self) -> List[CheckResult]:
        n = self.settings.n_atoms
        results = [
            _check('eraser_in_phase', abs(float(post_erasure_probability(1.0, 1.0, 0.0)) - 1.0), 1e-15),
            _check('eraser_out_of_phase', abs(float(post_erasure_probability(1.0, 1.0, math.pi))), 1e-30),
        ]
        system = build_single_mirror_collective(self.params, Geometry.single_mirror(n, 1.5))
        traj = propagate(system, np.linspace(0.0, 1.0, 201))
        finite = post_erasure_probability(traj.amplitude('G', 'A')[-1], traj.amplitude('Gp', 'A')[-1], 0.0)
        results.append(_check('eraser_finite_vs_large_n', abs(float(finite) - float(large_n_p_e(1.5, 1.0, 0.0))), 0.02))

        delta = 10.0 * self.params.gamma
        scan = ramsey_scan(system, EraserParams(delta=delta), np.linspace(0.0, 6.0, 601))
        period = fringe_period(scan['t_m'].to_numpy(), scan['p_e'].to_numpy())
        target = 2.0 * math.pi / delta
        results.append(_check('ramsey_period', abs(period - target) / target, 0.02, f"period={period:.5g}"))
        return results

    def check_intensity_structure(self) -> List[CheckResult]:
        n = self.settings.n_atoms
        x = np.linspace(-6.0, 6.0, 1201)
        t = np.linspace(0.0, 10.0, 201)
        results = []

        node_traj = propagate(build_single_mirror_collective(self.params, Geometry.single_mirror(n, 1.5)), self.t_grid)
        node = intensity_map(node_traj, x_grid=x, t_grid=t)
        profile = node.steady_state_profile('G')
        center = int(np.argmin(np.abs(x)))
        results.append(_check('intensity_node', float(profile[center] / profile.max()), 1e-3))

        outside = np.abs(x)[None, :] / self.params.v > t[:, None]
        results.append(_check('intensity_causality', float(np.max(node.branch('Gp')[outside], initial=0.0)), 0.0))

        anti_traj = propagate(build_single_mirror_collective(self.params, Geometry.single_mirror(n, 1.25)), self.t_grid)
        anti = intensity_map(anti_traj, x_grid=x, t_grid=t).steady_state_profile('G')
        neighbours = max(anti[center - 1], anti[center + 1])
        results.append(_check('intensity_antinode', float(neighbours / anti[center]), 1.001))
        return results

    def check_oracle(self) -> List[CheckResult]:
        s = self.settings
        params = PhysicalParams(self.params.gamma, self.params.lambda0, s.oracle_v)
        modes = ModeGrid(params, s.oracle_modes, s.oracle_bandwidth)
        t = np.linspace(0.0, s.oracle_t_max, s.oracle_steps)
        geom = Geometry.single_mirror(s.oracle_atoms, 1.5)
        oracle = simulate_microscopic(params, geom, modes, t, rtol=s.rtol, atol=s.atol)

        lone = oracle.trajectory.probability('Gp', 'A')
        dev_lone = np.max(np.abs(lone - np.exp(-params.gamma * t)))

        markov = propagate(build_single_mirror_collective(params, geom), t, ['G'])
        dev_mirror = np.max(np.abs(oracle.trajectory.probability('G', 'A') - markov.probability('G', 'A')))
        dev_norm = max(np.max(np.abs(oracle.norm(label) - 1.0)) for label in oracle.trajectory.labels)

        t_obs = 2.0
        x_obs = params.v * t_obs / 2.0
        mode_sum = float(intensity_from_modes(oracle, 'Gp', x_obs, t_obs)[0])
        retarded = float(np.exp(-params.gamma * (t_obs - x_obs / params.v)))
        return [
            _check('oracle_lone_atom', float(dev_lone), 0.02),
            _check('oracle_mirror_vs_markov', float(dev_mirror), 0.03),
            _check('oracle_norm', float(dev_norm), 1e-8),
            _check('oracle_mode_sum_intensity', abs(mode_sum - retarded) / retarded, 0.05),
        ]


def run_validation_suite(params: Optional[PhysicalParams] = None,
                         settings: Optional[ValidationSettings] = None) -> pd.DataFrame:
    """运行全部交叉验证，返回 name, passed, deviation, tolerance, detail 表"""
    return CrossCheckSuite(params, settings).run()
