#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
量子擦除测试
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dynamics.propagator import propagate
from eraser.erasure import (
    EraserParams, fringe_visibility, large_n_p_e, mixture_baseline, outcome_probability, phase_sweep,
    post_erasure_probability, ramsey_scan, which_path_overlap,
)
from dynamics.fitting import fringe_period
from model.builders import build_cavity_collective
from model.errors import InvalidCase, Unsupported
from model.geometry import Geometry


def test_erasure_extremes():
    assert abs(float(post_erasure_probability(1.0, 1.0, 0.0)) - 1.0) <= 1e-15
    assert float(post_erasure_probability(1.0, 1.0, math.pi)) <= 1e-30


@pytest.mark.parametrize('delta_phi', [0.0, 0.7, math.pi / 2, math.pi, 5.0])
def test_large_n_formula_at_zero_time(delta_phi):
    assert float(large_n_p_e(1.5, 0.0, delta_phi)) == pytest.approx(0.5 * (1.0 + math.cos(delta_phi)), abs=1e-15)


def test_finite_n_matches_large_n(node_system):
    traj = propagate(node_system, np.linspace(0.0, 1.0, 201))
    finite = post_erasure_probability(traj.amplitude('G', 'A')[-1], traj.amplitude('Gp', 'A')[-1], 0.0)
    assert abs(float(finite) - float(large_n_p_e(1.5, 1.0, 0.0))) <= 0.02


def test_ramsey_fringe_period(node_system):
    delta = 10.0
    scan = ramsey_scan(node_system, EraserParams(delta=delta), np.linspace(0.0, 6.0, 601))
    assert list(scan.columns) == ['t_m', 'delta_phi', 'p_e', 'p_mixture', 'p_outcome', 'p_e_conditional']
    period = fringe_period(scan['t_m'].to_numpy(), scan['p_e'].to_numpy())
    assert period == pytest.approx(2.0 * math.pi / delta, rel=0.02)
    assert scan['delta_phi'].between(0.0, 2.0 * math.pi).all()


def test_ramsey_scan_starts_with_certain_outcome(node_system):
    scan = ramsey_scan(node_system, EraserParams(), np.linspace(0.0, 2.0, 21))
    assert scan['p_e'].iloc[0] == pytest.approx(1.0, abs=1e-15)
    assert scan['p_outcome'].iloc[0] == pytest.approx(1.0, abs=1e-12)
    assert scan['p_e_conditional'].iloc[0] == pytest.approx(1.0, abs=1e-12)
    assert (scan['p_outcome'] >= -1e-12).all() and (scan['p_outcome'] <= 1.0 + 1e-12).all()
    # 条件概率不超过1
    assert (scan['p_e_conditional'] <= 1.0 + 1e-9).all()


def test_ramsey_scan_out_of_phase_outcome_vanishes(node_system):
    scan = ramsey_scan(node_system, EraserParams(phi_m=math.pi), [0.0, 1.0])
    assert scan['p_outcome'].iloc[0] == pytest.approx(0.0, abs=1e-12)
    assert scan['p_e_conditional'].iloc[0] == 0.0


def test_which_path_overlap_bounded(node_system):
    t = np.linspace(0.0, 5.0, 51)
    overlap = which_path_overlap(node_system, t)
    assert overlap[0] == pytest.approx(1.0)
    assert np.all(np.abs(overlap) <= 1.0 + 1e-12)


def test_outcome_probability_without_overlap():
    p = outcome_probability(0.0, 0.0, 0.0)
    assert float(p) == pytest.approx(0.5)


def test_phase_sweep_averages_to_mixture():
    c_a, c_ap = 0.8 * np.exp(0.3j), 0.5
    sweep = phase_sweep(c_a, c_ap, n_phi=360)
    assert sweep['p_e'].mean() == pytest.approx(float(mixture_baseline(c_a, c_ap)), rel=1e-12)
    assert fringe_visibility(phase_sweep(1.0, 1.0)['p_e']) == pytest.approx(1.0)
    assert fringe_visibility(sweep['p_mixture']) == pytest.approx(0.0)


def test_eraser_params():
    with pytest.raises(InvalidCase):
        EraserParams(t_m=-1.0)
    params = EraserParams(phi_m=0.0, phi_s=1.0, delta=2.0)
    assert float(params.delta_phi(1.0)) == pytest.approx(2.0 * math.pi - 3.0)


def test_eraser_needs_single_mirror(params):
    system = build_cavity_collective(params, Geometry.cavity(10, 1.5))
    with pytest.raises(Unsupported):
        ramsey_scan(system, EraserParams(), [0.0, 1.0])


def test_erasure_is_two_pi_periodic(node_trajectory):
    c_a = node_trajectory.amplitude('G', 'A')[::50]
    c_ap = node_trajectory.amplitude('Gp', 'A')[::50]
    for phi in np.linspace(-3.0, 9.0, 13):
        assert_allclose(post_erasure_probability(c_a, c_ap, phi + 2.0 * math.pi),
                        post_erasure_probability(c_a, c_ap, phi), rtol=0, atol=1e-14)


@pytest.mark.parametrize('weights', [(1 / math.sqrt(2), 1 / math.sqrt(2)), (0.6, 0.8j)])
def test_opposite_outcomes_sum_to_mixture(node_trajectory, weights):
    c_a = node_trajectory.amplitude('G', 'A')[::50]
    c_ap = node_trajectory.amplitude('Gp', 'A')[::50]
    for phi in (0.0, 0.4, math.pi / 2, 2.5):
        both = (post_erasure_probability(c_a, c_ap, phi, weights)
                + post_erasure_probability(c_a, c_ap, phi + math.pi, weights))
        assert_allclose(both, 2.0 * mixture_baseline(c_a, c_ap, weights), rtol=0, atol=1e-14)
