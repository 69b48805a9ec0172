#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
结果输出
CSV（UTF-8、LF 换行、17 位有效数字）和运行清单 manifest.json
"""

from typing import Any, Dict, Iterable, Union
import importlib
import json
import os

import numpy as np
import pandas as pd
import scipy
from loguru import logger

from model.errors import OutputError


FLOAT_FORMAT = '%.17g'
PACKAGES = ('model', 'dynamics', 'field', 'eraser', 'oracle', 'scenarios')


def _as_frame(obj) -> pd.DataFrame:
    if isinstance(obj, pd.DataFrame):
        return obj
    if hasattr(obj, 'to_frame'):
        return obj.to_frame()
    raise TypeError(f"cannot write {type(obj).__name__} as CSV")


def emit_csv(obj, path: str) -> str:
    """
    写出 CSV

    Args:
        obj: Trajectory、IntensityField 或 DataFrame
        path: 输出文件路径

    Returns:
        写出的路径

    Raises:
        OutputError: 写文件失败
    """
    frame = _as_frame(obj)
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n', encoding='utf-8')
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e.strerror}") from None
    logger.info(f"wrote {path} ({len(frame)} rows)")
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def write_json(data: Dict[str, Any], path: str) -> str:
    """键排序、LF 换行的 JSON"""
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(_jsonable(data), f, ensure_ascii=False, indent=2, sort_keys=True)
            f.write('\n')
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e.strerror}") from None
    logger.info(f"wrote {path}")
    return path


def module_versions() -> Dict[str, str]:
    """各子包和数值库的版本"""
    versions = {}
    for name in PACKAGES:
        versions[name] = getattr(importlib.import_module(name), '__version__', 'unknown')
    versions['numpy'] = np.__version__
    versions['scipy'] = scipy.__version__
    versions['pandas'] = pd.__version__
    return versions


def build_manifest(config_hash: str, scenario: str, files: Iterable[str],
                   tolerances: Dict[str, Union[float, int]], source: str = '') -> Dict[str, Any]:
    """
    运行清单，不含时间戳，同一配置重复运行得到相同内容

    Args:
        config_hash: 展平配置的 SHA-256
        scenario: 场景名
        files: 输出文件名（相对输出目录）
        tolerances: 本次运行使用的数值容差
        source: 配置文件名
    """
    return {
        'config_hash': config_hash,
        'config_source': os.path.basename(source),
        'scenario': scenario,
        'files': sorted(files),
        'versions': module_versions(),
        'tolerances': dict(tolerances),
    }
