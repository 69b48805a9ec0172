#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
model 包测试：参数、几何、分支标签和耦合矩阵
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dynamics.propagator import propagate
from model.branches import BranchLabel, MirrorState, Trajectory
from model.builders import (
    build_cavity_collective, build_full_array, build_single_mirror_collective, build_system,
    collective_projection, default_weights,
)
from model.errors import CollectiveInvalid, InvalidGeometry, NumericalFailure, Unsupported
from model.geometry import Geometry, MirrorDirection, MirrorSpec, PhysicalParams, ScenarioKind


def test_physical_params_natural_units(params):
    assert params.k0 == pytest.approx(2.0 * math.pi)
    assert 2.0 * math.pi * params.g0 ** 2 == pytest.approx(params.gamma)
    assert complex(params.phase(params.lambda0)) == pytest.approx(1.0)


@pytest.mark.parametrize('field_name', ['gamma', 'lambda0', 'v'])
def test_physical_params_reject_non_positive(field_name):
    with pytest.raises(InvalidGeometry, match=field_name):
        PhysicalParams(**{field_name: 0.0})


def test_branch_labels():
    assert [str(label) for label in BranchLabel.all_for(1)] == ['G', 'Gp']
    assert [str(label) for label in BranchLabel.all_for(2)] == ['GG', 'GGp', 'GpG', 'GpGp']
    label = BranchLabel.parse('GpG')
    assert label.tags == (MirrorState.GP, MirrorState.G)
    assert not label.reflective(0) and label.reflective(1)
    with pytest.raises(ValueError):
        BranchLabel.parse('GX')


def test_mirror_positions_extend_outward(params):
    geom = Geometry.cavity(3, 1.5)
    assert_allclose(geom.mirrors[0].positions(params), [-1.5, -2.0, -2.5])
    assert_allclose(geom.mirrors[1].positions(params), [1.5, 2.0, 2.5])
    assert geom.x1 == pytest.approx(1.5)


def test_asymmetric_cavity_unsupported():
    mirrors = (MirrorSpec(4, -1.5, MirrorDirection.MINUS_X), MirrorSpec(4, 1.75, MirrorDirection.PLUS_X))
    with pytest.raises(Unsupported):
        Geometry(ScenarioKind.CAVITY, mirrors)


def test_cavity_needs_two_mirrors():
    with pytest.raises(InvalidGeometry):
        Geometry(ScenarioKind.CAVITY, (MirrorSpec(4, 1.5),))


def test_coincident_positions_rejected(params):
    geom = Geometry.full_array(3, 0.0)
    with pytest.raises(InvalidGeometry, match='share position'):
        geom.validate(params)


def test_single_mirror_matrix_at_node(params, node_system):
    # e^{ik₀x₁} = -1 at x₁ = 3λ₀/2
    expected = np.array([[-50.0, 5.0], [5.0, -0.5]])
    assert_allclose(node_system.branch('G').matrix, expected, atol=1e-12)
    assert_allclose(node_system.branch('Gp').matrix, [[-0.5]])
    assert node_system.branch('G').slot_names == ('QM', 'A')


def test_branch_arrays_are_read_only(node_system):
    with pytest.raises(ValueError):
        node_system.branch('G').matrix[0, 0] = 0.0


def test_non_bragg_spacing_refuses_collective(params):
    geom = Geometry.single_mirror(10, 1.5, spacing=0.4)
    with pytest.raises(CollectiveInvalid):
        build_single_mirror_collective(params, geom)


def test_weights_must_be_normalized(params, node_geometry):
    with pytest.raises(InvalidGeometry, match='normalized'):
        build_single_mirror_collective(params, node_geometry, weights=(1.0, 1.0))


def test_default_weights():
    assert_allclose(default_weights(2), [1 / math.sqrt(2)] * 2)
    assert_allclose(default_weights(4), [0.5] * 4)


def test_cavity_matrix_symmetry_and_phases(params):
    geom = Geometry.cavity(100, 1.5, 0.1)
    system = build_cavity_collective(params, geom)
    gg = system.branch('GG')
    assert gg.slot_names == ('A', 'QM1', 'QM2')
    assert np.array_equal(gg.matrix, gg.matrix.T)
    assert gg.matrix[0, 1] == pytest.approx(-5.0 * complex(params.phase(1.6)))
    assert gg.matrix[0, 2] == pytest.approx(-5.0 * complex(params.phase(1.4)))
    assert gg.matrix[1, 2] == pytest.approx(-50.0 * complex(params.phase(3.0)))
    assert [b.dim for b in system.branches] == [3, 2, 2, 1]


def test_probe_outside_cavity_rejected(params):
    with pytest.raises(InvalidGeometry):
        build_cavity_collective(params, Geometry.cavity(10, 1.5, 1.6))


def test_collective_projection_matches_cavity_builder(params):
    n = 5
    geom = Geometry.cavity(n, 1.25, 0.05)
    qm1, qm2 = (m.positions(params) for m in geom.mirrors)
    full = build_full_array(params, np.concatenate((qm1, qm2)), 0.05, mirror_ids=[0] * n + [1] * n)
    groups = [[f"M{i + 1}" for i in range(n)], [f"M{n + i + 1}" for i in range(n)]]
    projected = collective_projection(full.branch('GG'), groups)
    assert_allclose(projected, build_cavity_collective(params, geom).branch('GG').matrix, atol=1e-12)


def test_full_array_branches_hold_reflective_atoms(params):
    system = build_full_array(params, [1.0, 1.5, -1.0, -1.5], 0.0, mirror_ids=[1, 1, 0, 0])
    assert [str(label) for label in system.labels] == ['GG', 'GGp', 'GpG', 'GpGp']
    assert system.branch('GG').dim == 5
    assert system.branch('GGp').slot_names == ('M3', 'M4', 'A')
    assert system.branch('GpGp').slot_names == ('A',)


def test_collective_matches_full_array_dynamics(params):
    geom = Geometry.single_mirror(20, 1.5)
    t = np.linspace(0.0, 5.0, 501)
    collective = propagate(build_single_mirror_collective(params, geom), t, ['G'])
    full = propagate(build_system(params, geom, collective=False), t, ['G'])
    assert_allclose(collective.amplitude('G', 'A'), full.amplitude('G', 'A'), atol=1e-10)


def test_with_initial_renormalizes(node_system):
    system = node_system.with_initial('G', {'QM': 1.0})
    assert_allclose(system.branch('G').init, [1 / math.sqrt(2), 1 / math.sqrt(2)])


def test_init_mirror_needs_collective_model(params, node_geometry):
    with pytest.raises(Unsupported):
        build_system(params, node_geometry, collective=False, init_mirror=0.5)


def test_trajectory_frame_and_summary(node_trajectory):
    frame = node_trajectory.to_frame()
    assert list(frame.columns) == ['t', 'branch', 'slot', 're', 'im', 'prob']
    assert set(frame['branch']) == {'G', 'Gp'}
    assert len(frame) == node_trajectory.t_grid.size * 3

    summary = node_trajectory.summary().set_index('branch')
    assert summary.loc['G', 'probe_prob_final'] > 0.9
    assert summary.loc['Gp', 'emitted_prob_final'] == pytest.approx(1.0 - math.exp(-10.0), abs=1e-12)


def test_norm_growth_detected(node_system):
    t = np.array([0.0, 1.0, 2.0])
    growing = {
        'G': np.array([[0.0, 0.5], [0.0, 0.6], [0.0, 0.7]], dtype=complex),
        'Gp': np.array([[1.0], [0.5], [0.2]], dtype=complex),
    }
    traj = Trajectory(t, node_system, growing)
    with pytest.raises(NumericalFailure) as info:
        traj.check_norm_monotone()
    assert info.value.branch == 'G'
    assert info.value.t == pytest.approx(1.0)


def test_single_mirror_matrix_quarter_wave(params, antinode_system):
    # e^{ik₀x₁} = i at x₁ = 5λ₀/4
    matrix = antinode_system.branch('G').matrix
    assert matrix[0, 1] == pytest.approx(-5.0j, abs=1e-12)
    assert matrix[1, 0] == pytest.approx(-5.0j, abs=1e-12)


@pytest.mark.parametrize('x1', [0.3, 1.25, 1.5, 2.71])
def test_single_atom_mirror_equals_full_array(params, x1):
    collective = build_single_mirror_collective(params, Geometry.single_mirror(1, x1)).branch('G')
    full = build_full_array(params, [x1], 0.0).branch('G')
    assert full.slot_names == ('M1', 'A')
    assert_allclose(collective.matrix, full.matrix, rtol=0, atol=1e-14)
    assert_allclose(np.sort_complex(np.linalg.eigvals(collective.matrix)),
                    np.sort_complex(np.linalg.eigvals(full.matrix)), atol=1e-12)


@pytest.mark.parametrize('x1, mirror_coupling, inter_mirror', [
    (1.5, 5.0, -50.0),
    (1.25, -5.0j, 50.0),
])
def test_cavity_matrix_with_centred_atom(params, x1, mirror_coupling, inter_mirror):
    gg = build_cavity_collective(params, Geometry.cavity(100, x1)).branch('GG').matrix
    assert gg[0, 1] == pytest.approx(mirror_coupling, abs=1e-12)
    assert gg[0, 2] == pytest.approx(mirror_coupling, abs=1e-12)
    assert gg[1, 2] == pytest.approx(inter_mirror, abs=1e-10)
    assert gg[1, 1] == pytest.approx(-50.0)
