#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
eraser包
量子擦除概率与 Ramsey 扫描
"""

__version__ = '1.0.0'

from .erasure import (
    EraserParams, post_erasure_probability, large_n_p_e, mixture_baseline, fringe_visibility,
    which_path_overlap, outcome_probability, ramsey_scan, phase_sweep, wrap_phase,
    EQUAL_WEIGHTS, LABEL_G, LABEL_GP,
)

__all__ = [
    'EraserParams', 'post_erasure_probability', 'large_n_p_e', 'mixture_baseline', 'fringe_visibility',
    'which_path_overlap', 'outcome_probability', 'ramsey_scan', 'phase_sweep', 'wrap_phase',
    'EQUAL_WEIGHTS', 'LABEL_G', 'LABEL_GP',
]
