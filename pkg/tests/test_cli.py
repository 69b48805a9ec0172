#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令行测试
"""

import json
import os
from pathlib import Path

import pandas as pd
import pytest
from click.testing import CliRunner

from main import cli


SINGLE_MIRROR = {
    'scenario': 'single-mirror',
    'geometry': {'kind': 'single_mirror', 'n_atoms': 100, 'x1': 1.5},
    'time': {'t_max': 10.0, 'n_steps': 1000},
    'log': {'level': 'WARNING', 'file': False},
}


def _config(tmp_path, body, name='config.json'):
    path = tmp_path / name
    path.write_text(json.dumps(body, indent=2), encoding='utf-8')
    return str(path)


def _invoke(*args):
    return CliRunner().invoke(cli, list(args))


def test_run_single_mirror(tmp_path):
    out = tmp_path / 'out'
    result = _invoke('run', _config(tmp_path, SINGLE_MIRROR), '--out', str(out), '--seedless')
    assert result.exit_code == 0, result.output

    with open(out / 'decay.csv', encoding='utf-8') as f:
        assert f.readline() == 't,branch,slot,re,im,prob\n'
    decay = pd.read_csv(out / 'decay.csv')
    probe = decay[(decay['branch'] == 'G') & (decay['slot'] == 'A')]
    assert probe['prob'].iloc[-1] >= 0.9

    summary = json.load(open(out / 'summary.json', encoding='utf-8'))
    assert summary['G.closed_form_max_deviation'] <= 1e-9
    manifest = json.load(open(out / 'manifest.json', encoding='utf-8'))
    assert 'decay.csv' in manifest['files']
    assert manifest['tolerances']['norm_monotone_tol'] == pytest.approx(1e-9)


def test_rerun_is_byte_identical(tmp_path):
    config = _config(tmp_path, SINGLE_MIRROR)
    first, second = tmp_path / 'a', tmp_path / 'b'
    assert _invoke('run', config, '--out', str(first)).exit_code == 0
    assert _invoke('run', config, '--out', str(second)).exit_code == 0
    for name in ('decay.csv', 'summary.csv', 'summary.json', 'manifest.json'):
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_cavity_antinode_frequency(tmp_path):
    body = {
        'scenario': 'cavity',
        'geometry': {'kind': 'cavity', 'n_atoms': 100, 'x1': 1.25, 'x_a': 0.0},
        'log': {'level': 'WARNING', 'file': False},
    }
    out = tmp_path / 'out'
    assert _invoke('run', _config(tmp_path, body), '--out', str(out)).exit_code == 0
    summary = json.load(open(out / 'summary.json', encoding='utf-8'))
    assert summary['cavity_case'] == 'cavity_antinode'
    assert summary['standing_wave_allowed'] is True
    assert summary['GG.frequency'] == pytest.approx(7.071, rel=0.05)


def test_short_cavity_flagged(tmp_path):
    body = {
        'scenario': 'cavity',
        'geometry': {'kind': 'cavity', 'n_atoms': 20, 'x1': 0.2},
        'time': {'t_max': 2.0, 'n_steps': 201},
        'log': {'level': 'WARNING', 'file': False},
    }
    out = tmp_path / 'out'
    assert _invoke('run', _config(tmp_path, body), '--out', str(out)).exit_code == 0
    summary = json.load(open(out / 'summary.json', encoding='utf-8'))
    assert summary['standing_wave_allowed'] is False
    assert summary['cavity_case'] == 'none'


def test_intensity_scenario(tmp_path):
    body = dict(SINGLE_MIRROR, scenario='intensity',
                intensity={'x_min': -2.0, 'x_max': 2.0, 'n_x': 41, 't_max': 10.0, 'n_t': 21})
    out = tmp_path / 'out'
    assert _invoke('run', _config(tmp_path, body), '--out', str(out)).exit_code == 0
    with open(out / 'intensity.csv', encoding='utf-8') as f:
        assert f.readline() == 't,x,branch,intensity\n'
    assert len(pd.read_csv(out / 'intensity.csv')) == 3 * 41 * 21


def test_eraser_scenario(tmp_path):
    body = dict(SINGLE_MIRROR, scenario='eraser',
                eraser={'delta': 10.0, 't_m_max': 6.0, 'n_t_m': 601})
    out = tmp_path / 'out'
    assert _invoke('run', _config(tmp_path, body), '--out', str(out)).exit_code == 0
    scan = pd.read_csv(out / 'eraser.csv')
    assert scan['p_e'].iloc[0] == pytest.approx(1.0, abs=1e-15)
    assert os.path.exists(out / 'phase_sweep.csv')


def test_sweep_records_failures(tmp_path):
    body = dict(SINGLE_MIRROR, sweep={'parameter': 'geometry.n_atoms', 'start': 0.0, 'stop': 20.0, 'n': 3},
                time={'t_max': 2.0, 'n_steps': 201})
    out = tmp_path / 'out'
    assert _invoke('sweep', _config(tmp_path, body), '--out', str(out)).exit_code == 0
    sweep = pd.read_csv(out / 'sweep.csv', keep_default_na=False)
    failed = sweep[~sweep["success"]]
    assert list(failed['value']) == [0]
    assert set(sweep.loc[sweep["success"], "value"]) == {10, 20}


def test_config_error_exit_code(tmp_path):
    body = dict(SINGLE_MIRROR, geometry={'kind': 'single_mirror', 'n_atoms': 100, 'x1': 1.5, 'colour': 'red'})
    result = _invoke('run', _config(tmp_path, body), '--out', str(tmp_path / 'out'))
    assert result.exit_code == 2
    assert 'geometry.colour' in result.output


def test_missing_config_exit_code(tmp_path):
    assert _invoke('run', str(tmp_path / 'missing.json')).exit_code == 2


def test_output_error_exit_code(tmp_path):
    blocker = tmp_path / 'blocker'
    blocker.write_text('', encoding='utf-8')
    result = _invoke('run', _config(tmp_path, SINGLE_MIRROR), '--out', str(blocker / 'out'))
    assert result.exit_code == 4


@pytest.mark.slow
def test_validate_without_oracle(tmp_path):
    body = dict(SINGLE_MIRROR, oracle={'include': False})
    out = tmp_path / 'out'
    result = _invoke('validate', _config(tmp_path, body), '--out', str(out))
    assert result.exit_code == 0, result.output
    report = pd.read_csv(out / 'validate.csv')
    assert report['passed'].all()


def test_batch_writes_per_scenario_log(tmp_path):
    from loguru import logger
    from run_all_scenarios import run_single_scenario

    body = dict(SINGLE_MIRROR, time={'t_max': 2.0, 'n_steps': 201}, log={'level': 'WARNING', 'file': True})
    quiet = dict(body, log={'level': 'WARNING', 'file': False})
    results = tmp_path / 'results'
    row = run_single_scenario(Path(_config(tmp_path, body, 'logged.json')), results)
    assert row['success'], row['error']
    run_single_scenario(Path(_config(tmp_path, quiet, 'quiet.json')), results)

    text = (results / 'logged' / 'run.log').read_text(encoding='utf-8')
    assert 'scenario single-mirror' in text
    assert 'quiet' not in text
    assert not (results / 'quiet' / 'run.log').exists()

    # 场景结束后文件输出已经移除
    with logger.contextualize(scenario='logged'):
        logger.warning('after the batch item')
    assert 'after the batch item' not in (results / 'logged' / 'run.log').read_text(encoding='utf-8')
