#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
oracle包
离散模式微观模拟和交叉验证
"""

__version__ = '1.0.0'

from .microscopic import (
    ModeGrid, MicroscopicResult, simulate_microscopic, intensity_from_modes, markov_reference,
    MAX_DIMENSION,
)
from .cross_checks import CheckResult, ValidationSettings, CrossCheckSuite, run_validation_suite

__all__ = [
    'ModeGrid', 'MicroscopicResult', 'simulate_microscopic', 'intensity_from_modes', 'markov_reference',
    'MAX_DIMENSION', 'CheckResult', 'ValidationSettings', 'CrossCheckSuite', 'run_validation_suite',
]
