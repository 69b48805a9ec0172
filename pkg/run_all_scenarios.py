#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
批量运行 config/ 下的全部场景配置
每个配置写到 results/<配置名>/，最后汇总到 results/all_scenarios.csv
"""

import sys
import os
from pathlib import Path
from concurrent.futures import ThreadPoolExecutor, as_completed

import click
import pandas as pd
from loguru import logger

# 添加项目根目录到路径
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '.')))

from model.errors import QuantumMirrorError
from scenarios.scenario_engine import ScenarioEngine
from utils.config_loader import load_config
from utils.log_setup import scenario_log, setup_logging
from utils.result_writer import emit_csv


def run_single_scenario(config_file: Path, results_dir: Path) -> dict:
    """
    运行单个场景配置
    """
    name = config_file.stem
    try:
        logger.info(f"[{name}] start")
        config = load_config(str(config_file))
        out_dir = str(results_dir / name)
        with scenario_log(out_dir, name, log_file=bool(config.get('log.file'))):
            result = ScenarioEngine(config, out_dir, echo=False).run()
        logger.info(f"[{name}] done, {len(result['files'])} files")
        return {
            'config': name,
            'scenario': result['scenario'],
            'success': result['passed'],
            'files': len(result['files']),
            'error': '',
        }
    except (QuantumMirrorError, OSError) as e:
        logger.error(f"[{name}] failed: {e}")
        return {
            'config': name,
            'scenario': '',
            'success': False,
            'files': 0,
            'error': str(e),
        }


@click.command()
@click.option('--config-dir', default='config', show_default=True, type=click.Path(file_okay=False))
@click.option('--out', 'results_dir', default='results', show_default=True, type=click.Path(file_okay=False))
@click.option('--workers', default=4, show_default=True, type=int)
def main(config_dir: str, results_dir: str, workers: int):
    """并发运行全部场景"""
    setup_logging('INFO', log_file=False)
    click.echo("=" * 60)
    click.echo("批量运行场景配置")
    click.echo("=" * 60)

    config_files = sorted(Path(config_dir).glob('*.json'))
    if not config_files:
        click.echo(f"配置目录中没有 JSON 文件: {config_dir}")
        return
    click.echo(f"找到 {len(config_files)} 个配置")

    results = []
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {
            executor.submit(run_single_scenario, file, Path(results_dir)): file.stem
            for file in config_files
        }
        for future in as_completed(futures):
            results.append(future.result())

    # 结果按配置名排序，与完成顺序无关
    frame = pd.DataFrame(sorted(results, key=lambda r: r['config']))
    emit_csv(frame, os.path.join(results_dir, 'all_scenarios.csv'))

    failed = frame.loc[~frame['success'], 'config'].tolist()
    click.echo("\n" + "=" * 60)
    click.echo("运行完成")
    click.echo("=" * 60)
    click.echo(f"总数: {len(frame)}")
    click.echo(f"成功: {len(frame) - len(failed)}")
    click.echo(f"失败: {len(failed)}")
    if failed:
        click.echo(f"\n失败的配置: {', '.join(failed)}")
        sys.exit(1)


if __name__ == "__main__":
    main()
