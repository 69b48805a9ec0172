#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
量子镜模拟器命令行入口

用法:
    python main.py run config/single_mirror_node.json --out results/node
    python main.py validate config/validate.json
    python main.py sweep config/sweep_x1.json
"""

from typing import Optional
import sys

import click
from loguru import logger

from model.errors import OutputError, QuantumMirrorError
from scenarios.scenario_engine import ScenarioEngine
from utils.config_loader import ScenarioConfig, load_config
from utils.log_setup import setup_logging


EXIT_OK = 0
EXIT_CHECKS_FAILED = 3


def _execute(config_path: str, out: Optional[str], scenario: Optional[str], seedless: bool) -> int:
    """加载配置并运行，返回退出码"""
    setup_logging('INFO', log_file=False)
    try:
        config: ScenarioConfig = load_config(config_path)
        if scenario is not None and config.scenario != scenario:
            config = config.with_override('scenario', scenario)
        output_dir = out or config.output_dir
        setup_logging(config.get('log.level'), output_dir, config.get('log.file'))
        if seedless:
            # 所有计算都是确定性的，不使用随机数
            logger.info("seedless run: no random number generator is used")
        results = ScenarioEngine(config, output_dir).run()
    except QuantumMirrorError as e:
        logger.error(f"{type(e).__name__}: {e}")
        click.echo(f"❌ {e}", err=True)
        return e.exit_code
    except OSError as e:
        logger.error(f"output failure: {e}")
        click.echo(f"❌ {e}", err=True)
        return OutputError.exit_code
    if not results['passed']:
        click.echo(f"❌ {len(results['metrics'].get('failed', []))} check(s) failed", err=True)
        return EXIT_CHECKS_FAILED
    return EXIT_OK


def _common_options(func):
    func = click.option('--format', 'fmt', type=click.Choice(['csv']), default='csv', show_default=True,
                        help='输出格式')(func)
    func = click.option('--seedless', is_flag=True, help='声明本次运行不使用随机数')(func)
    func = click.option('--out', type=click.Path(file_okay=False), default=None,
                        help='输出目录（覆盖配置中的 output.dir）')(func)
    func = click.argument('config', type=click.Path(exists=True, dir_okay=False))(func)
    return func


@click.group()
def cli():
    """波导中原子镜子的自发辐射模拟"""


@cli.command()
@_common_options
def run(config: str, out: Optional[str], seedless: bool, fmt: str):
    """运行配置文件中指定的场景"""
    sys.exit(_execute(config, out, None, seedless))


@cli.command()
@_common_options
def validate(config: str, out: Optional[str], seedless: bool, fmt: str):
    """运行全部交叉验证"""
    sys.exit(_execute(config, out, 'validate', seedless))


@cli.command()
@_common_options
def sweep(config: str, out: Optional[str], seedless: bool, fmt: str):
    """按 sweep 段扫描一个配置参数"""
    sys.exit(_execute(config, out, 'sweep', seedless))


if __name__ == "__main__":
    cli()
