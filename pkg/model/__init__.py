#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
model包
物理参数、几何结构、分支系统和耦合矩阵构造
"""

__version__ = '1.0.0'

from .errors import (
    QuantumMirrorError, ConfigError, InvalidGeometry, CollectiveInvalid, Unsupported,
    InvalidCase, InvalidTimeGrid, InvalidModeGrid, NumericalFailure, HistoryTooShort,
    OracleWindowExceeded, FitFailure, OutputError,
)
from .geometry import PhysicalParams, MirrorDirection, MirrorSpec, ScenarioKind, Geometry
from .branches import (
    MirrorState, BranchLabel, SlotKind, Slot, Branch, BranchSystem, Trajectory, as_label,
)
from .builders import (
    build_single_mirror_collective, build_cavity_collective, build_full_array, build_system,
    bragg_bright_mode, collective_projector, collective_projection, default_weights,
)

__all__ = [
    'QuantumMirrorError', 'ConfigError', 'InvalidGeometry', 'CollectiveInvalid', 'Unsupported',
    'InvalidCase', 'InvalidTimeGrid', 'InvalidModeGrid', 'NumericalFailure', 'HistoryTooShort',
    'OracleWindowExceeded', 'FitFailure', 'OutputError',
    'PhysicalParams', 'MirrorDirection', 'MirrorSpec', 'ScenarioKind', 'Geometry',
    'MirrorState', 'BranchLabel', 'SlotKind', 'Slot', 'Branch', 'BranchSystem', 'Trajectory', 'as_label',
    'build_single_mirror_collective', 'build_cavity_collective', 'build_full_array', 'build_system',
    'bragg_bright_mode', 'collective_projector', 'collective_projection', 'default_weights',
]
