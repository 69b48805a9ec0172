#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
场景配置加载
JSON 配置按 section.key 展平，拒绝未知键，做类型检查并补全默认值，
最后构造领域对象以复核所有跨字段约束
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple
import copy
import hashlib
import json
import math
import re

from loguru import logger

from eraser.erasure import EraserParams
from model.errors import ConfigError, QuantumMirrorError
from model.geometry import Geometry, PhysicalParams, ScenarioKind
from oracle.cross_checks import ValidationSettings
from oracle.microscopic import ModeGrid


SCENARIOS = ('single-mirror', 'cavity', 'intensity', 'eraser', 'validate', 'sweep')
INTENSITY_MODES = ('no_delay_collective', 'per_atom_retarded')
LOG_LEVELS = ('TRACE', 'DEBUG', 'INFO', 'SUCCESS', 'WARNING', 'ERROR', 'CRITICAL')

# 默认配置（位置单位 λ₀，时间单位 1/γ）
DEFAULT_CONFIG: Dict[str, Any] = {
    'scenario': 'single-mirror',
    'physical': {
        'gamma': 1.0,
        'lambda0': 1.0,
        'v': 100.0,
    },
    'geometry': {
        'kind': 'single_mirror',
        'n_atoms': 100,
        'x1': 1.5,
        'x_a': 0.0,
        'spacing': 0.5,
        'collective': True,
    },
    'branches': {
        'weights': None,
        'init_mirror': [0.0, 0.0],
    },
    'time': {
        't_max': 10.0,
        'n_steps': 2000,
        'auto_refine': True,
    },
    'intensity': {
        'x_min': None,
        'x_max': None,
        'n_x': 800,
        't_max': 10.0,
        'n_t': 500,
        'mode': 'no_delay_collective',
        'heaviside_zero': 0.5,
    },
    'eraser': {
        'phi_m': 0.0,
        'phi_s': 0.0,
        'delta': 0.0,
        't_m_max': 6.0,
        'n_t_m': 600,
    },
    'sweep': {
        'parameter': 'geometry.x1',
        'start': 1.0,
        'stop': 2.0,
        'n': 11,
    },
    'oracle': {
        'include': True,
        'n_atoms': 10,
        'n_modes': 2000,
        'bandwidth': 100.0,
        'v': 1000.0,
        'rtol': 1e-10,
        'atol': 1e-12,
        't_max': 5.0,
        'n_steps': 101,
    },
    'output': {
        'dir': 'results',
        'format': 'csv',
    },
    'log': {
        'level': 'INFO',
        'file': True,
    },
}

# 默认值为 None 的键的类型
_NULLABLE_TYPES = {
    'branches.weights': list,
    'intensity.x_min': float,
    'intensity.x_max': float,
}


def flatten(config: Dict[str, Any]) -> Dict[str, Any]:
    """{'physical': {'v': 100}} -> {'physical.v': 100}"""
    flat = {}
    for section, body in config.items():
        if isinstance(body, dict):
            for key, value in body.items():
                flat[f"{section}.{key}"] = value
        else:
            flat[section] = body
    return flat


def unflatten(flat: Dict[str, Any]) -> Dict[str, Any]:
    nested: Dict[str, Any] = {}
    for dotted, value in flat.items():
        if '.' in dotted:
            section, key = dotted.split('.', 1)
            nested.setdefault(section, {})[key] = value
        else:
            nested[dotted] = value
    return nested


DEFAULT_FLAT = flatten(DEFAULT_CONFIG)


class _LineIndex:
    """在原始文本中查找 section/key 所在行"""

    def __init__(self, text: str):
        self.lines = text.splitlines()

    def _find(self, name: str, start: int = 0) -> Optional[int]:
        pattern = re.compile(r'"' + re.escape(name) + r'"\s*:')
        for i in range(start, len(self.lines)):
            if pattern.search(self.lines[i]):
                return i
        return None

    def line_of(self, dotted: str) -> int:
        parts = dotted.split('.', 1)
        section_line = self._find(parts[0])
        if section_line is None:
            return 1
        if len(parts) == 1:
            return section_line + 1
        key_line = self._find(parts[1], section_line)
        return (key_line if key_line is not None else section_line) + 1


def _expected_type(dotted: str):
    default = DEFAULT_FLAT[dotted]
    if default is None:
        return _NULLABLE_TYPES[dotted]
    return type(default)


def _coerce(dotted: str, value: Any) -> Any:
    """按默认值类型检查并转换，int 可以写作 float 的位置"""
    if value is None and DEFAULT_FLAT[dotted] is None:
        return None
    expected = _expected_type(dotted)
    if expected is bool:
        if not isinstance(value, bool):
            raise TypeError(f"{dotted} must be true/false, got {value!r}")
        return value
    if expected is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeError(f"{dotted} must be an integer, got {value!r}")
        return value
    if expected is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise TypeError(f"{dotted} must be a finite number, got {value!r}")
        return float(value)
    if expected is str:
        if not isinstance(value, str):
            raise TypeError(f"{dotted} must be a string, got {value!r}")
        return value
    if expected is list:
        if not isinstance(value, list):
            raise TypeError(f"{dotted} must be a list, got {value!r}")
        return value
    raise TypeError(f"{dotted}: unsupported type {expected}")


def _complex_pair(dotted: str, value: Any) -> complex:
    """[re, im] 或实数 -> complex"""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        return complex(value[0], value[1])
    raise TypeError(f"{dotted} entries must be numbers or [re, im] pairs, got {value!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    """
    校验后的场景配置

    Attributes:
        scenario: 场景名
        params: 物理参数
        geometry: 几何
        collective: 是否使用集体约化
        weights: 分支权重（None 为等权）
        init_mirror: 集体镜子态初始振幅
        values: 展平后的全部配置值
        source: 配置文件路径
    """

    scenario: str
    params: PhysicalParams
    geometry: Geometry
    collective: bool
    weights: Optional[Tuple[complex, ...]]
    init_mirror: complex
    eraser: EraserParams
    validation: ValidationSettings
    values: Dict[str, Any] = field(default_factory=dict)
    source: str = '<memory>'

    def get(self, dotted: str) -> Any:
        return self.values[dotted]

    @property
    def output_dir(self) -> str:
        return self.values['output.dir']

    def config_hash(self) -> str:
        """展平配置的 SHA-256（键排序，与文件格式无关）"""
        canonical = json.dumps(self.values, sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()

    def with_override(self, dotted: str, value: Any) -> 'ScenarioConfig':
        """替换单个键后重新校验（参数扫描用）"""
        if dotted not in DEFAULT_FLAT:
            raise ConfigError(f"unknown key {dotted!r}", self.source)
        values = dict(self.values)
        values[dotted] = value
        return build_config(values, self.source)


def build_config(values: Dict[str, Any], source: str = '<memory>', text: str = '') -> ScenarioConfig:
    """
    由展平的配置值构造 ScenarioConfig

    Raises:
        ConfigError: 未知键、类型错误或跨字段约束不满足（带行号）
    """
    lines = _LineIndex(text)
    merged = dict(DEFAULT_FLAT)
    for dotted, value in values.items():
        if dotted not in DEFAULT_FLAT:
            raise ConfigError(f"unknown key {dotted!r}", source, lines.line_of(dotted))
        try:
            merged[dotted] = _coerce(dotted, value)
        except TypeError as e:
            raise ConfigError(str(e), source, lines.line_of(dotted)) from None

    def fail(dotted: str, message: str):
        raise ConfigError(message, source, lines.line_of(dotted))

    if merged['scenario'] not in SCENARIOS:
        fail('scenario', f"scenario must be one of {', '.join(SCENARIOS)}, got {merged['scenario']!r}")
    if merged['intensity.mode'] not in INTENSITY_MODES:
        fail('intensity.mode', f"intensity.mode must be one of {', '.join(INTENSITY_MODES)}")
    if merged['output.format'] != 'csv':
        fail('output.format', f"output.format must be 'csv', got {merged['output.format']!r}")
    if merged['log.level'].upper() not in LOG_LEVELS:
        fail('log.level', f"log.level must be one of {', '.join(LOG_LEVELS)}")
    for dotted in ('time.n_steps', 'intensity.n_x', 'intensity.n_t', 'eraser.n_t_m', 'sweep.n', 'oracle.n_steps'):
        if merged[dotted] < 1:
            fail(dotted, f"{dotted} must be >= 1, got {merged[dotted]}")
    for dotted in ('time.t_max', 'intensity.t_max', 'eraser.t_m_max', 'oracle.t_max'):
        if not merged[dotted] > 0:
            fail(dotted, f"{dotted} must be > 0, got {merged[dotted]}")
    if not 0.0 <= merged['intensity.heaviside_zero'] <= 1.0:
        fail('intensity.heaviside_zero', "intensity.heaviside_zero must lie in [0, 1]")
    if merged['scenario'] == 'sweep' and merged['sweep.parameter'] not in DEFAULT_FLAT:
        fail('sweep.parameter', f"sweep.parameter {merged['sweep.parameter']!r} is not a config key")

    try:
        params = PhysicalParams(merged['physical.gamma'], merged['physical.lambda0'], merged['physical.v'])
    except QuantumMirrorError as e:
        raise ConfigError(str(e), source, lines.line_of('physical')) from None

    try:
        geometry = _geometry_from(merged, params)
        geometry.validate(params)
    except (QuantumMirrorError, ValueError) as e:
        raise ConfigError(str(e), source, lines.line_of('geometry')) from None

    if merged['geometry.collective'] and geometry.kind is not ScenarioKind.FULL_ARRAY:
        if not all(mirror.is_bragg(params) for mirror in geometry.mirrors):
            fail('geometry.spacing', f"geometry.spacing={merged['geometry.spacing']} is not lambda0/2, "
                                     f"set geometry.collective = false for arbitrary spacing")

    scenario = merged['scenario']
    if scenario == 'cavity' and geometry.kind is not ScenarioKind.CAVITY:
        fail('geometry.kind', "scenario 'cavity' needs geometry.kind = 'cavity'")
    if scenario in ('single-mirror', 'intensity', 'eraser') and geometry.kind is ScenarioKind.CAVITY:
        fail('geometry.kind', f"scenario {scenario!r} needs a single mirror geometry")

    n_branches = 4 if geometry.kind is ScenarioKind.CAVITY else 2
    weights = None
    try:
        if merged['branches.weights'] is not None:
            weights = tuple(_complex_pair('branches.weights', w) for w in merged['branches.weights'])
            if len(weights) != n_branches:
                raise TypeError(f"branches.weights needs {n_branches} entries, got {len(weights)}")
            total = sum(abs(w) ** 2 for w in weights)
            if abs(total - 1.0) > 1e-10:
                raise TypeError(f"branches.weights must satisfy sum |w|^2 = 1, got {total:.12g}")
        init_mirror = _complex_pair('branches.init_mirror', merged['branches.init_mirror'])
    except TypeError as e:
        raise ConfigError(str(e), source, lines.line_of('branches')) from None

    try:
        eraser = EraserParams(merged['eraser.phi_m'], merged['eraser.phi_s'], merged['eraser.delta'])
    except QuantumMirrorError as e:
        raise ConfigError(str(e), source, lines.line_of('eraser')) from None

    validation = ValidationSettings(
        n_atoms=merged['geometry.n_atoms'],
        include_oracle=merged['oracle.include'],
        oracle_atoms=merged['oracle.n_atoms'],
        oracle_modes=merged['oracle.n_modes'],
        oracle_bandwidth=merged['oracle.bandwidth'],
        oracle_v=merged['oracle.v'],
        oracle_t_max=merged['oracle.t_max'],
        oracle_steps=merged['oracle.n_steps'],
        rtol=merged['oracle.rtol'],
        atol=merged['oracle.atol'],
    )
    if validation.include_oracle:
        try:
            modes = ModeGrid(PhysicalParams(params.gamma, params.lambda0, validation.oracle_v),
                             validation.oracle_modes, validation.oracle_bandwidth)
            if validation.oracle_t_max > modes.recurrence_time:
                raise ConfigError(
                    f"oracle.t_max={validation.oracle_t_max} exceeds the recurrence time {modes.recurrence_time:.4g}",
                    source, lines.line_of('oracle.t_max'),
                )
        except ConfigError:
            raise
        except QuantumMirrorError as e:
            raise ConfigError(str(e), source, lines.line_of('oracle')) from None

    logger.debug(f"config {source}: scenario={scenario}, geometry={geometry.kind.value}")
    return ScenarioConfig(
        scenario=scenario,
        params=params,
        geometry=geometry,
        collective=merged['geometry.collective'],
        weights=weights,
        init_mirror=init_mirror,
        eraser=eraser,
        validation=validation,
        values=merged,
        source=source,
    )


def _geometry_from(merged: Dict[str, Any], params: PhysicalParams) -> Geometry:
    """配置中的位置以 λ₀ 为单位，这里换算为长度"""
    unit = params.lambda0
    n_atoms = merged['geometry.n_atoms']
    x1 = merged['geometry.x1'] * unit
    x_a = merged['geometry.x_a'] * unit
    spacing = merged['geometry.spacing'] * unit
    kind = ScenarioKind(merged['geometry.kind'])
    if kind is ScenarioKind.SINGLE_MIRROR:
        if x_a != 0.0:
            raise ValueError("single_mirror geometry keeps the probe at x_a = 0")
        return Geometry.single_mirror(n_atoms, x1, spacing)
    if kind is ScenarioKind.CAVITY:
        return Geometry.cavity(n_atoms, x1, x_a, spacing)
    return Geometry.full_array(n_atoms, x1, spacing, x_a)


def load_config(path: str) -> ScenarioConfig:
    """
    读取 JSON 配置文件

    Raises:
        ConfigError: 文件无法读取、JSON 语法错误或内容不合法
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e.strerror}", path, 1) from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", path, e.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object", path, 1)

    lines = _LineIndex(text)
    values: Dict[str, Any] = {}
    for section, body in raw.items():
        if section == 'scenario':
            values['scenario'] = body
            continue
        if section not in DEFAULT_CONFIG or not isinstance(DEFAULT_CONFIG[section], dict):
            raise ConfigError(f"unknown section {section!r}", path, lines.line_of(section))
        if not isinstance(body, dict):
            raise ConfigError(f"section {section!r} must be an object", path, lines.line_of(section))
        for key, value in body.items():
            values[f"{section}.{key}"] = value
    config = build_config(values, path, text)
    logger.info(f"loaded config {path} (scenario={config.scenario})")
    return config


def sweep_values(config: ScenarioConfig) -> List[float]:
    """sweep.start 到 sweep.stop 的 n 个等距值"""
    start, stop, n = config.get('sweep.start'), config.get('sweep.stop'), config.get('sweep.n')
    if n == 1:
        return [start]
    step = (stop - start) / (n - 1)
    return [start + i * step for i in range(n)]


def default_config() -> Dict[str, Any]:
    return copy.deepcopy(DEFAULT_CONFIG)
