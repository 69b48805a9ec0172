#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
日志配置
stderr 输出，可选在输出目录写 run.log
"""

from contextlib import contextmanager
from typing import Iterator, Optional
import os
import sys

from loguru import logger


LOG_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function} - {message}"


def setup_logging(level: str = 'INFO', output_dir: Optional[str] = None, log_file: bool = True) -> None:
    """
    配置 loguru（整个进程只调用一次）

    Args:
        level: 日志级别
        output_dir: 输出目录，log_file 为 True 时在其中写 run.log
        log_file: 是否写日志文件
    """
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)
    if log_file and output_dir:
        os.makedirs(output_dir, exist_ok=True)
        logger.add(os.path.join(output_dir, 'run.log'), level='DEBUG', format=LOG_FORMAT,
                   encoding='utf-8', mode='w')


@contextmanager
def scenario_log(output_dir: str, name: str, log_file: bool = True) -> Iterator[None]:
    """
    批量运行时给单个场景挂一个 run.log

    只收录 logger.contextualize(scenario=name) 范围内的记录，其他线程的场景不会写进来；
    退出时移除该输出。
    """
    sink_id = None
    if log_file:
        os.makedirs(output_dir, exist_ok=True)
        sink_id = logger.add(os.path.join(output_dir, 'run.log'), level='DEBUG', format=LOG_FORMAT,
                             encoding='utf-8', mode='w',
                             filter=lambda record: record['extra'].get('scenario') == name)
    try:
        with logger.contextualize(scenario=name):
            yield
    finally:
        if sink_id is not None:
            logger.remove(sink_id)
