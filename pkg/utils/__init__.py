#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
utils包
配置加载、结果输出和日志配置
"""

from .config_loader import (
    ScenarioConfig, load_config, build_config, default_config, flatten, unflatten, sweep_values,
    DEFAULT_CONFIG, SCENARIOS,
)
from .result_writer import emit_csv, write_json, build_manifest, module_versions, FLOAT_FORMAT
from .log_setup import scenario_log, setup_logging

__all__ = [
    'ScenarioConfig', 'load_config', 'build_config', 'default_config', 'flatten', 'unflatten',
    'sweep_values', 'DEFAULT_CONFIG', 'SCENARIOS',
    'emit_csv', 'write_json', 'build_manifest', 'module_versions', 'FLOAT_FORMAT',
    'scenario_log', 'setup_logging',
]
