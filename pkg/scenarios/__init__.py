#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
scenarios包
场景引擎
"""

__version__ = '1.0.0'

from .scenario_engine import ScenarioEngine

__all__ = ['ScenarioEngine']
