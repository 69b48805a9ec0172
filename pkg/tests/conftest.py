#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
共用测试夹具
"""

import json
import os
import sys

import numpy as np
import pytest
from loguru import logger

# 添加项目根目录到路径
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from dynamics.propagator import default_time_grid, propagate
from model.builders import build_cavity_collective, build_single_mirror_collective
from model.geometry import Geometry, PhysicalParams


N_ATOMS = 100
NODE_X1 = 1.5
ANTINODE_X1 = 1.25
DATA_DIR = os.path.join(os.path.dirname(__file__), 'data')


@pytest.fixture(scope='session')
def params():
    return PhysicalParams()


@pytest.fixture(scope='session')
def t_grid():
    return default_time_grid(10.0, 2000)


@pytest.fixture(scope='session')
def node_geometry():
    return Geometry.single_mirror(N_ATOMS, NODE_X1)


@pytest.fixture(scope='session')
def antinode_geometry():
    return Geometry.single_mirror(N_ATOMS, ANTINODE_X1)


@pytest.fixture(scope='session')
def node_system(params, node_geometry):
    return build_single_mirror_collective(params, node_geometry)


@pytest.fixture(scope='session')
def antinode_system(params, antinode_geometry):
    return build_single_mirror_collective(params, antinode_geometry)


@pytest.fixture(scope='session')
def node_trajectory(node_system, t_grid):
    return propagate(node_system, t_grid)


@pytest.fixture(scope='session')
def antinode_trajectory(antinode_system, t_grid):
    return propagate(antinode_system, t_grid)


@pytest.fixture(scope='session')
def cavity_antinode_trajectory(params, t_grid):
    return propagate(build_cavity_collective(params, Geometry.cavity(N_ATOMS, ANTINODE_X1)), t_grid, ['GG'])


@pytest.fixture(scope='session')
def cavity_node_trajectory(params, t_grid):
    return propagate(build_cavity_collective(params, Geometry.cavity(N_ATOMS, NODE_X1)), t_grid)


def load_geometry_seeds():
    with open(os.path.join(DATA_DIR, 'geometry_seeds.json'), 'r', encoding='utf-8') as f:
        return json.load(f)['seeds']


def random_positions(seed: int):
    """随机镜子原子位置（都在探测原子右侧，间距不一定是 λ₀/2）"""
    rng = np.random.default_rng(seed)
    n_atoms = int(rng.integers(2, 9))
    x1 = float(rng.uniform(0.3, 3.0))
    gaps = rng.uniform(0.15, 0.85, size=n_atoms - 1)
    return x1 + np.concatenate(([0.0], np.cumsum(gaps)))


@pytest.fixture(autouse=True)
def reset_logging():
    """命令行测试会把日志指向临时输出流，每个测试后恢复默认 stderr"""
    yield
    logger.remove()
    logger.add(sys.stderr, level='WARNING')
