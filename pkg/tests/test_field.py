#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
强度图测试：光锥因果性、节点/腹点结构、插值
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dynamics.propagator import propagate
from field.intensity import (
    TOTAL, IntensityMode, default_x_grid, intensity_map, interpolate_amplitude,
)
from model.branches import Trajectory
from model.builders import build_system
from model.errors import HistoryTooShort, Unsupported
from model.geometry import Geometry, PhysicalParams


X_GRID = np.linspace(-6.0, 6.0, 1201)
T_GRID = np.linspace(0.0, 10.0, 201)


@pytest.fixture(scope='module')
def node_field(node_trajectory):
    return intensity_map(node_trajectory, x_grid=X_GRID, t_grid=T_GRID)


@pytest.fixture(scope='module')
def antinode_profile(antinode_trajectory):
    return intensity_map(antinode_trajectory, x_grid=X_GRID, t_grid=T_GRID).steady_state_profile('G')


def test_transparent_branch_respects_light_cone(node_field, params):
    outside = np.abs(X_GRID)[None, :] / params.v > T_GRID[:, None]
    assert np.any(outside)
    assert np.all(node_field.branch('Gp')[outside] == 0.0)


def test_transparent_branch_is_mirror_symmetric(node_trajectory):
    positive = np.linspace(0.05, 4.0, 80)
    x = np.concatenate((-positive[::-1], positive))
    values = intensity_map(node_trajectory, x_grid=x, t_grid=T_GRID).branch('Gp')
    assert_allclose(values, values[:, ::-1], rtol=1e-12, atol=1e-15)


def test_node_geometry_field_vanishes_at_probe(node_field):
    profile = node_field.steady_state_profile('G')
    center = int(np.argmin(np.abs(X_GRID)))
    assert abs(X_GRID[center]) <= 1e-12
    assert profile[center] / profile.max() <= 1e-3


def test_antinode_geometry_field_peaks_at_probe(antinode_profile):
    center = int(np.argmin(np.abs(X_GRID)))
    neighbours = max(antinode_profile[center - 1], antinode_profile[center + 1])
    assert neighbours / antinode_profile[center] <= 1.001
    quarter = int(np.argmin(np.abs(X_GRID - 0.25)))
    assert antinode_profile[quarter] / antinode_profile[center] <= 0.05


def test_total_is_weighted_sum(node_field):
    expected = 0.5 * node_field.branch('G') + 0.5 * node_field.branch('Gp')
    assert_allclose(node_field.total, expected, rtol=1e-12)
    assert np.all(node_field.values[TOTAL] >= 0.0)


def test_frame_columns(node_trajectory):
    field = intensity_map(node_trajectory, x_grid=[-1.0, 0.5], t_grid=[0.0, 1.0])
    frame = field.to_frame()
    assert list(frame.columns) == ['t', 'x', 'branch', 'intensity']
    assert set(frame['branch']) == {'G', 'Gp', TOTAL}
    assert len(frame) == 3 * 2 * 2


def test_window_longer_than_history(node_trajectory):
    with pytest.raises(HistoryTooShort):
        intensity_map(node_trajectory, x_grid=X_GRID, t_grid=np.linspace(0.0, 12.0, 10))


def test_per_atom_mode_needs_full_array(node_trajectory):
    with pytest.raises(Unsupported):
        intensity_map(node_trajectory, x_grid=X_GRID, t_grid=T_GRID, mode=IntensityMode.PER_ATOM_RETARDED)


def test_interpolation_hits_grid_values(node_trajectory):
    t = node_trajectory.t_grid[::97]
    values = interpolate_amplitude(node_trajectory, 'G', 'A', t)
    assert_allclose(values, node_trajectory.amplitude('G', 'A')[::97], rtol=0, atol=1e-12)
    with pytest.raises(HistoryTooShort):
        interpolate_amplitude(node_trajectory, 'G', 'A', [11.0])


def test_default_x_grid_spans_mirror(node_geometry):
    x = default_x_grid(node_geometry, 101)
    assert x[0] == pytest.approx(-6.0) and x[-1] == pytest.approx(6.0)


def test_global_phase_leaves_intensity_unchanged(node_system, node_trajectory):
    rotated = propagate(node_system.with_initial('G', {'A': np.exp(1.3j)}), node_trajectory.t_grid)
    x = np.linspace(-3.0, 3.0, 121)
    t = np.linspace(0.0, 10.0, 41)
    base = intensity_map(node_trajectory, x_grid=x, t_grid=t)
    turned = intensity_map(rotated, x_grid=x, t_grid=t)
    assert_allclose(turned.total, base.total, rtol=1e-10, atol=1e-14)


def test_interpolated_lone_atom_decay(node_trajectory, params):
    t = node_trajectory.t_grid
    between = t[:-1] + 0.37 * np.diff(t)
    values = interpolate_amplitude(node_trajectory, 'Gp', 'A', between)
    assert np.max(np.abs(np.abs(values) - np.exp(-0.5 * params.gamma * between))) <= 1e-6


def test_interpolation_is_linear(node_system, node_trajectory, antinode_trajectory):
    summed = Trajectory(node_trajectory.t_grid, node_system, {
        label: node_trajectory.amplitudes[label] + antinode_trajectory.amplitudes[label]
        for label in node_trajectory.labels
    })
    t = np.linspace(0.013, 9.9, 57)
    expected = (interpolate_amplitude(node_trajectory, 'G', 'A', t)
                + interpolate_amplitude(antinode_trajectory, 'G', 'A', t))
    assert_allclose(interpolate_amplitude(summed, 'G', 'A', t), expected, rtol=0, atol=1e-12)


def test_per_atom_and_no_delay_agree_for_compact_mirror():
    # γ·(镜子长度)/v ≈ 4.5e-4
    params = PhysicalParams(v=1.0e4)
    geom = Geometry.single_mirror(10, 1.5)
    traj = propagate(build_system(params, geom, collective=False), np.linspace(0.0, 5.0, 1001))
    # 只取镜子外侧，镜子内部两种模式的光锥划分本来就不同
    x = np.concatenate((np.linspace(-2.0, 1.4, 171), np.linspace(6.1, 8.0, 96)))
    t = np.linspace(0.0, 5.0, 51)
    per_atom = intensity_map(traj, x_grid=x, t_grid=t, mode=IntensityMode.PER_ATOM_RETARDED).total
    no_delay = intensity_map(traj, x_grid=x, t_grid=t, mode=IntensityMode.NO_DELAY_COLLECTIVE).total
    assert np.max(np.abs(per_atom - no_delay)) / np.max(per_atom) <= 0.02


def test_closed_heaviside_loses_node(node_trajectory):
    x = np.linspace(-1.0, 1.0, 201)
    closed = intensity_map(node_trajectory, x_grid=x, t_grid=T_GRID, heaviside_zero=1.0).steady_state_profile('G')
    center = int(np.argmin(np.abs(x)))
    assert closed[center] / closed.max() >= 0.05
