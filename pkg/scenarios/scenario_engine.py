#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
场景引擎
按配置运行单镜、腔、强度、擦除、交叉验证和参数扫描场景，写出 CSV 和运行清单
"""

from typing import Any, Callable, Dict, List, Optional
import math
import os

import click
import numpy as np
import pandas as pd
from loguru import logger

from dynamics.closed_forms import (
    ClosedFormKind, cavity_standing_wave_allowed, classify_cavity, closed_form_single_mirror,
    large_n_cavity, large_n_single_mirror,
)
from dynamics.fitting import decay_rate, envelope_decay_rate, fringe_period, zero_crossing_frequency
from dynamics.propagator import DEGENERACY_GAP, EIG_COND_LIMIT, propagate, refine_time_grid
from eraser.erasure import LABEL_G, LABEL_GP, fringe_visibility, large_n_p_e, phase_sweep, ramsey_scan
from field.intensity import IntensityMode, default_x_grid, intensity_map
from model.branches import NORM_MONOTONE_TOL, NORMALIZATION_TOL, BranchSystem, Trajectory
from model.builders import build_system
from model.errors import FitFailure, HistoryTooShort, OutputError, QuantumMirrorError
from model.geometry import ScenarioKind
from oracle.cross_checks import run_validation_suite
from utils.config_loader import DEFAULT_FLAT, ScenarioConfig, sweep_values
from utils.result_writer import build_manifest, emit_csv, write_json


# 衰减率拟合窗口
DECAY_FIT_WINDOW = (0.5, 2.0)
# 腔腹点包络拟合窗口
ENVELOPE_FIT_WINDOW = (1.0, 8.0)


def _safe_fit(fit: Callable[[], float], what: str) -> float:
    """拟合失败时返回 NaN 并记录警告"""
    try:
        return fit()
    except FitFailure as e:
        logger.warning(f"{what}: {e}")
        return math.nan


class ScenarioEngine:
    """
    场景引擎

    一个配置对应一次运行，所有输出写到同一个目录
    """

    def __init__(self, config: ScenarioConfig, output_dir: Optional[str] = None, echo: bool = True):
        """
        初始化场景引擎

        Args:
            config: 校验后的场景配置
            output_dir: 输出目录，默认取配置中的 output.dir
            echo: 是否在终端打印结果报告
        """
        self.config = config
        self.params = config.params
        self.geometry = config.geometry
        self.output_dir = output_dir or config.output_dir
        self.echo = echo

        self.files: List[str] = []
        self.results: Dict[str, Any] = {}

    # ------------------------------------------------------------------
    # 入口
    # ------------------------------------------------------------------

    def run(self) -> Dict[str, Any]:
        """
        运行配置中的场景

        Returns:
            结果字典：scenario, files, metrics, passed
        """
        handlers = {
            'single-mirror': self._run_decay,
            'cavity': self._run_decay,
            'intensity': self._run_intensity,
            'eraser': self._run_eraser,
            'validate': self._run_validate,
            'sweep': self._run_sweep,
        }
        scenario = self.config.scenario
        logger.info(f"scenario {scenario} from {self.config.source} -> {self.output_dir}")
        try:
            os.makedirs(self.output_dir, exist_ok=True)
        except OSError as e:
            raise OutputError(f"cannot create output directory {self.output_dir}: {e.strerror}") from None

        metrics = handlers[scenario]()
        self.results = {
            'scenario': scenario,
            'config_hash': self.config.config_hash(),
            'files': list(self.files),
            'metrics': metrics,
            'passed': bool(metrics.get('passed', True)),
        }
        manifest = build_manifest(self.config.config_hash(), scenario, self.files + ['manifest.json'],
                                  self.tolerances(), self.config.source)
        write_json(manifest, os.path.join(self.output_dir, 'manifest.json'))
        if self.echo:
            self._print_results(self.results)
        return self.results

    def tolerances(self) -> Dict[str, float]:
        """本次运行用到的数值容差"""
        return {
            'eig_cond_limit': EIG_COND_LIMIT,
            'degeneracy_gap': DEGENERACY_GAP,
            'norm_monotone_tol': NORM_MONOTONE_TOL,
            'normalization_tol': NORMALIZATION_TOL,
            'heaviside_zero': self.config.get('intensity.heaviside_zero'),
            'oracle_rtol': self.config.get('oracle.rtol'),
            'oracle_atol': self.config.get('oracle.atol'),
        }

    # ------------------------------------------------------------------
    # 公共步骤
    # ------------------------------------------------------------------

    def _emit(self, obj, name: str) -> None:
        emit_csv(obj, os.path.join(self.output_dir, name))
        self.files.append(name)

    def build_system(self, config: Optional[ScenarioConfig] = None) -> BranchSystem:
        config = config or self.config
        return build_system(config.params, config.geometry, config.collective, config.weights, config.init_mirror)

    def time_grid(self, system: BranchSystem, t_max: float, n_steps: int, auto_refine: bool = True) -> np.ndarray:
        """均匀时间网格；auto_refine 时按最快振荡频率加密"""
        omega = 0.0
        if auto_refine:
            omega = max(float(np.max(np.abs(np.linalg.eigvals(b.matrix).imag))) for b in system.branches)
        return refine_time_grid(t_max, n_steps, omega)

    def propagate(self, config: Optional[ScenarioConfig] = None, t_max: Optional[float] = None) -> Trajectory:
        config = config or self.config
        system = self.build_system(config)
        t_max = config.get('time.t_max') if t_max is None else t_max
        t_grid = self.time_grid(system, t_max, config.get('time.n_steps'), config.get('time.auto_refine'))
        logger.info(f"{system.description}: {len(system.branches)} branches, {t_grid.size} time points")
        return propagate(system, t_grid)

    def decay_metrics(self, traj: Trajectory, config: Optional[ScenarioConfig] = None) -> Dict[str, Any]:
        """衰减曲线的拟合量和与解析解的偏差"""
        config = config or self.config
        params, geom = config.params, config.geometry
        t = traj.t_grid
        metrics: Dict[str, Any] = {'n_time_points': int(t.size)}

        for label in traj.labels:
            key = str(label)
            probe = traj.probability(label, 'A')
            metrics[f"{key}.probe_prob_final"] = float(probe[-1])
            metrics[f"{key}.mirror_prob_final"] = float(traj.mirror_population(label)[-1])
            metrics[f"{key}.emitted_prob_final"] = float(traj.emitted_probability(label)[-1])
            if traj.t_max >= DECAY_FIT_WINDOW[1]:
                metrics[f"{key}.decay_rate"] = _safe_fit(
                    lambda: decay_rate(t, probe, *DECAY_FIT_WINDOW), f"branch {key} decay fit")

        unit = params.lambda0
        if geom.kind is ScenarioKind.SINGLE_MIRROR and config.init_mirror == 0 and geom.mirrors[0].is_bragg(params):
            c_a, _ = closed_form_single_mirror(params, geom, t)
            metrics['G.closed_form_max_deviation'] = float(np.max(np.abs(traj.amplitude(LABEL_G, 'A') - c_a)))
            large_n = large_n_single_mirror(params, geom.x1, t)
            metrics['G.large_n_max_deviation'] = float(
                np.max(np.abs(traj.probability(LABEL_G, 'A') - np.abs(large_n) ** 2)))

        if geom.kind is ScenarioKind.CAVITY:
            x1 = geom.x1
            metrics['x1_lambda0'] = x1 / unit
            metrics['standing_wave_allowed'] = cavity_standing_wave_allowed(params, x1)
            if not metrics['standing_wave_allowed']:
                logger.warning(f"cavity length 2x1={2 * x1 / unit:g} lambda0 admits no standing wave")
            case = classify_cavity(params, geom.x_a, x1)
            metrics['cavity_case'] = case.value if case is not None else 'none'
            c_a = traj.amplitude('GG', 'A')
            if case is ClosedFormKind.CAVITY_ANTINODE:
                metrics['GG.frequency'] = _safe_fit(lambda: zero_crossing_frequency(t, c_a.real), 'GG frequency fit')
                metrics['GG.envelope_decay_rate'] = _safe_fit(
                    lambda: envelope_decay_rate(t, traj.population('GG'), *ENVELOPE_FIT_WINDOW), 'GG envelope fit')
            elif case is ClosedFormKind.CAVITY_NEAR_NODE:
                metrics['GG.frequency'] = _safe_fit(
                    lambda: zero_crossing_frequency(t, c_a.real, min_periods=3), 'GG Rabi frequency fit')
            if case is not None and config.collective and config.init_mirror == 0:
                n = geom.mirrors[0].n_atoms
                ref_a, _, _ = large_n_cavity(params, case, geom.x_a, x1, n, t)
                metrics['GG.large_n_max_deviation'] = float(np.max(np.abs(c_a - ref_a)))
        return metrics

    # ------------------------------------------------------------------
    # 场景
    # ------------------------------------------------------------------

    def _run_decay(self) -> Dict[str, Any]:
        traj = self.propagate()
        self._emit(traj, 'decay.csv')
        self._emit(traj.summary(), 'summary.csv')
        metrics = self.decay_metrics(traj)
        write_json(metrics, os.path.join(self.output_dir, 'summary.json'))
        self.files.append('summary.json')
        return metrics

    def _run_intensity(self) -> Dict[str, Any]:
        config = self.config
        unit = self.params.lambda0
        t_max = config.get('intensity.t_max')
        traj = self.propagate(t_max=max(t_max, config.get('time.t_max')))
        self._emit(traj, 'decay.csv')

        n_x = config.get('intensity.n_x')
        x_min, x_max = config.get('intensity.x_min'), config.get('intensity.x_max')
        if x_min is None or x_max is None:
            x_grid = default_x_grid(self.geometry, n_x)
        else:
            x_grid = np.linspace(x_min * unit, x_max * unit, n_x)
        t_grid = np.linspace(0.0, t_max, config.get('intensity.n_t'))
        intensity = intensity_map(traj, self.geometry, x_grid, t_grid,
                                  IntensityMode(config.get('intensity.mode')),
                                  config.get('intensity.heaviside_zero'))
        self._emit(intensity, 'intensity.csv')

        metrics: Dict[str, Any] = {'n_x': int(x_grid.size), 'n_t': int(t_grid.size)}
        probe_x = int(np.argmin(np.abs(x_grid - self.geometry.x_a)))
        for name in list(intensity.values):
            try:
                profile = intensity.steady_state_profile(name)
            except HistoryTooShort as e:
                logger.warning(f"{name}: {e}")
                continue
            peak = float(profile.max())
            metrics[f"{name}.steady_peak"] = peak
            metrics[f"{name}.steady_at_probe_ratio"] = float(profile[probe_x] / peak) if peak > 0 else 0.0
        return metrics

    def _run_eraser(self) -> Dict[str, Any]:
        config = self.config
        system = self.build_system()
        t_m = np.linspace(0.0, config.get('eraser.t_m_max'), config.get('eraser.n_t_m'))
        scan = ramsey_scan(system, config.eraser, t_m)
        self._emit(scan, 'eraser.csv')

        traj = propagate(system, np.array([0.0, t_m[-1]]) if t_m[-1] > 0 else np.array([0.0]))
        weights = (abs(system.weight(LABEL_G)), abs(system.weight(LABEL_GP)))
        sweep = phase_sweep(traj.amplitude(LABEL_G, 'A')[-1], traj.amplitude(LABEL_GP, 'A')[-1], weights=weights)
        self._emit(sweep, 'phase_sweep.csv')

        metrics: Dict[str, Any] = {
            't_m_max': float(t_m[-1]),
            'phase_visibility': fringe_visibility(sweep['p_e']),
        }
        if self.geometry.kind is ScenarioKind.SINGLE_MIRROR:
            reference = large_n_p_e(self.geometry.x1, t_m, scan['delta_phi'].to_numpy(), self.params)
            metrics['large_n_max_deviation'] = float(np.max(np.abs(scan['p_e'].to_numpy() - reference)))
        if config.eraser.delta != 0:
            period = _safe_fit(lambda: fringe_period(t_m, scan['p_e'].to_numpy()), 'ramsey fringe fit')
            metrics['fringe_period'] = period
            metrics['expected_fringe_period'] = 2.0 * math.pi / abs(config.eraser.delta)
        return metrics

    def _run_validate(self) -> Dict[str, Any]:
        report = run_validation_suite(self.params, self.config.validation)
        self._emit(report, 'validate.csv')
        failed = report.loc[~report['passed'], 'name'].tolist()
        if failed:
            logger.error(f"failed checks: {', '.join(failed)}")
        return {
            'n_checks': int(len(report)),
            'n_passed': int(report['passed'].sum()),
            'failed': failed,
            'passed': not failed,
        }

    def _run_sweep(self) -> Dict[str, Any]:
        config = self.config
        parameter = config.get('sweep.parameter')
        integer = isinstance(DEFAULT_FLAT[parameter], int) and not isinstance(DEFAULT_FLAT[parameter], bool)
        rows = []
        for value in sweep_values(config):
            value = int(round(value)) if integer else value
            try:
                point = config.with_override(parameter, value)
                traj = self.propagate(point)
                metrics = self.decay_metrics(traj, point)
                for label in traj.labels:
                    key = str(label)
                    rows.append({
                        'parameter': parameter,
                        'value': value,
                        'branch': key,
                        'probe_prob_final': metrics[f"{key}.probe_prob_final"],
                        'mirror_prob_final': metrics[f"{key}.mirror_prob_final"],
                        'emitted_prob_final': metrics[f"{key}.emitted_prob_final"],
                        'decay_rate': metrics.get(f"{key}.decay_rate", math.nan),
                        'frequency': _safe_fit(
                            lambda: zero_crossing_frequency(traj.t_grid, traj.amplitude(label, 'A').real),
                            f"{parameter}={value} branch {key} frequency fit"),
                        'success': True,
                        'error': '',
                    })
            except QuantumMirrorError as e:
                logger.error(f"sweep point {parameter}={value} failed: {e}")
                rows.append({'parameter': parameter, 'value': value, 'branch': '', 'success': False, 'error': str(e)})

        frame = pd.DataFrame(rows, columns=[
            'parameter', 'value', 'branch', 'probe_prob_final', 'mirror_prob_final', 'emitted_prob_final',
            'decay_rate', 'frequency', 'success', 'error',
        ])
        self._emit(frame, 'sweep.csv')
        return {
            'parameter': parameter,
            'n_points': len(sweep_values(config)),
            'n_failed': int((~frame['success'].astype(bool)).sum()),
        }

    # ------------------------------------------------------------------
    # 报告
    # ------------------------------------------------------------------

    def _print_results(self, results: Dict[str, Any]) -> None:
        """
        打印运行结果

        Args:
            results: run() 的返回值
        """
        click.echo(f"\n{'=' * 60}")
        click.echo(f"场景结果 - {results['scenario']}")
        click.echo(f"{'=' * 60}")
        click.echo(f"配置: {self.config.source}")
        click.echo(f"配置哈希: {results['config_hash'][:16]}")
        click.echo(f"\n指标:")
        for key, value in results['metrics'].items():
            if isinstance(value, float):
                click.echo(f"  {key}: {value:.6g}")
            else:
                click.echo(f"  {key}: {value}")
        click.echo(f"\n输出文件:")
        for name in results['files']:
            click.echo(f"  {os.path.join(self.output_dir, name)}")
        status = '✅ 通过' if results['passed'] else '❌ 未通过'
        click.echo(f"\n状态: {status}")
        click.echo(f"{'=' * 60}\n")
