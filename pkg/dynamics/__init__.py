#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
dynamics包
时间演化、极点展开、解析解和拟合工具
"""

__version__ = '1.0.0'

from .propagator import (
    propagate, pole_decomposition, PoleDecomposition, evolve_branch, check_time_grid,
    default_time_grid, refine_time_grid, EIG_COND_LIMIT, DEGENERACY_GAP,
)
from .closed_forms import (
    ClosedFormKind, open_waveguide, single_mirror_roots, printed_pole_formula,
    closed_form_single_mirror, large_n_single_mirror, large_n_single_mirror_mirror_amplitude,
    large_n_cavity, classify_cavity, cavity_standing_wave_allowed,
)
from .fitting import (
    zero_crossing_times, zero_crossing_frequency, decay_rate, envelope_decay_rate, fringe_period,
)

__all__ = [
    'propagate', 'pole_decomposition', 'PoleDecomposition', 'evolve_branch', 'check_time_grid',
    'default_time_grid', 'refine_time_grid', 'EIG_COND_LIMIT', 'DEGENERACY_GAP',
    'ClosedFormKind', 'open_waveguide', 'single_mirror_roots', 'printed_pole_formula',
    'closed_form_single_mirror', 'large_n_single_mirror', 'large_n_single_mirror_mirror_amplitude',
    'large_n_cavity', 'classify_cavity', 'cavity_standing_wave_allowed',
    'zero_crossing_times', 'zero_crossing_frequency', 'decay_rate', 'envelope_decay_rate', 'fringe_period',
]
