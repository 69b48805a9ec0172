#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
field包
导模辐射场强度重建
"""

__version__ = '1.0.0'

from .intensity import (
    IntensityField, IntensityMode, AmplitudeInterpolator, interpolate_amplitude, intensity_map,
    default_x_grid, default_intensity_t_grid, TOTAL,
)

__all__ = [
    'IntensityField', 'IntensityMode', 'AmplitudeInterpolator', 'interpolate_amplitude', 'intensity_map',
    'default_x_grid', 'default_intensity_t_grid', 'TOTAL',
]
