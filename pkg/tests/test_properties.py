#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
随机几何上的性质测试：范数单调、极点展开等价、半群性质、平移 λ₀ 不变
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import load_geometry_seeds, random_positions
from dynamics.propagator import evolve_branch, pole_decomposition, propagate
from model.builders import build_full_array
from model.geometry import PhysicalParams


SEEDS = load_geometry_seeds()
PARAMS = PhysicalParams()
T_GRID = np.linspace(0.0, 6.0, 301)


def _system(seed, shift=0.0):
    return build_full_array(PARAMS, random_positions(seed) + shift, 0.0)


def test_corpus_size():
    assert len(SEEDS) == 50
    assert len(set(SEEDS)) == 50


@pytest.mark.parametrize('seed', SEEDS)
def test_norm_monotone(seed):
    traj = propagate(_system(seed), T_GRID)
    for label in traj.labels:
        assert np.all(np.diff(traj.population(label)) <= 1e-9)


@pytest.mark.parametrize('seed', SEEDS)
def test_pole_expansion_equivalence(seed):
    system = _system(seed)
    traj = propagate(system, T_GRID, ['G'])
    poles = pole_decomposition(system, 'G')
    if poles.degenerate:
        pytest.skip('degenerate poles')
    assert_allclose(poles.evaluate(T_GRID), traj.amplitudes[poles.label], rtol=0, atol=1e-9)


@pytest.mark.parametrize('seed', SEEDS)
def test_semigroup(seed):
    branch = _system(seed).branch('G')
    t1, t2 = 1.3, 2.1
    direct = evolve_branch(branch.matrix, branch.init, np.array([0.0, t1 + t2]))[-1]
    midway = evolve_branch(branch.matrix, branch.init, np.array([0.0, t1]))[-1]
    composed = evolve_branch(branch.matrix, midway, np.array([0.0, t2]))[-1]
    assert_allclose(composed, direct, rtol=0, atol=1e-10)


@pytest.mark.parametrize('seed', SEEDS)
def test_wavelength_translation_invariance(seed):
    base = propagate(_system(seed), T_GRID)
    shifted = propagate(_system(seed, shift=PARAMS.lambda0), T_GRID)
    for label in base.labels:
        assert_allclose(shifted.amplitudes[label], base.amplitudes[label], rtol=0, atol=1e-10)
