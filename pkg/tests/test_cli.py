"""In-process and subprocess tests of the command-line frontend."""

import json
import os
import subprocess
import sys

import pytest

import main


def _lines(out):
    return [dict(token.split('=', 1) for token in line.split()) for line in out.strip().splitlines()]


def _fields(out):
    merged = {}
    for line in _lines(out):
        merged.update(line)
    return merged


def test_run_uniform_three_spins(tmp_path, capsys):
    code = main.main(['run', '--kind', 'uniform', '--n', '3', '--d-mhz', '1',
                      '--tau-max-ns', '150', '--out', str(tmp_path)])
    assert code == 0
    fields = _fields(capsys.readouterr().out)
    assert float(fields['sigma_min']) == pytest.approx(0.440, abs=0.005)
    assert float(fields['tau_min']) == pytest.approx(89, abs=1)
    assert float(fields['theta_min']) == pytest.approx(51, abs=1)
    assert float(fields['sigma_0']) == pytest.approx(0.57735, abs=1e-5)
    assert 'note' not in fields
    assert (tmp_path / 'timeseries.csv').exists()
    assert (tmp_path / 'summary.json').exists()
    assert (tmp_path / f"ellipse_tau{fields['tau_min']}.csv").exists()


def test_run_without_coupling_reports_no_squeezing(tmp_path, capsys):
    code = main.main(['run', '--kind', 'uniform', '--n', '3', '--d-mhz', '0',
                      '--tau-max-ns', '50', '--tau-step-ns', '5', '--out', str(tmp_path)])
    assert code == 0
    fields = _fields(capsys.readouterr().out)
    assert fields['sigma_min'] == fields['sigma_0'] == '0.57735'
    assert fields['note'] == 'no_squeezing'


def test_flags_override_config_file(tmp_path, capsys):
    config = tmp_path / 'scenario.json'
    config.write_text(json.dumps({'kind': 'uniform', 'n': 3, 'd_mhz': 1.0,
                                  'tau_end_ns': 650, 'out_dir': str(tmp_path / 'from_file')}))
    code = main.main(['run', '--config', str(config), '--tau-max-ns', '40', '--tau-step-ns', '10',
                      '--out', str(tmp_path / 'from_flag')])
    assert code == 0
    capsys.readouterr()
    with open(tmp_path / 'from_flag' / 'summary.json', encoding='utf-8') as f:
        summary = json.load(f)
    assert summary['grid_tau_end_ns'] == 40.0
    assert not (tmp_path / 'from_file').exists()


def test_config_errors_exit_one(tmp_path, capsys):
    assert main.main(['run', '--kind', 'uniform', '--n', '3', '--out', str(tmp_path)]) == 1
    assert 'd_mhz' in capsys.readouterr().err
    assert main.main(['run', '--config', str(tmp_path / 'missing.json')]) == 1
    assert main.main(['run', '--kind', 'pentagon']) == 1


def test_numerical_failure_exits_two(tmp_path, capsys):
    # <J_x> of two spins vanishes exactly at 3 d tau / 4 = pi / 2
    config = tmp_path / 'node.json'
    config.write_text(json.dumps({'kind': 'uniform', 'n': 2, 'd_mhz': 1.0,
                                  'tau_start_ns': 1000.0 / 3, 'tau_end_ns': 1000.0 / 3,
                                  'out_dir': str(tmp_path)}))
    assert main.main(['run', '--config', str(config)]) == 2
    assert 'numerical error' in capsys.readouterr().err


def test_couple_benchmark(capsys):
    assert main.main(['couple', '--position', '0', '0', '0', '--position', '0', '0', '1']) == 0
    fields = _fields(capsys.readouterr().out)
    assert fields['n_spins'] == '2'
    assert float(fields['d_1_2_mhz']) == pytest.approx(26.0, abs=0.5)
    assert fields['row_1'].split(',')[0] == '0'


def test_couple_two_nanometres_and_magic_angle(capsys):
    main.main(['couple', '--position', '0', '0', '0', '--position', '0', '0', '2'])
    assert float(_fields(capsys.readouterr().out)['d_1_2_mhz']) == pytest.approx(3.25, abs=0.01)
    main.main(['couple', '--position', '0', '0', '0', '--position', str(2 ** 0.5), '0', '1'])
    assert _fields(capsys.readouterr().out)['d_1_2_mhz'] == '0'


def test_couple_coincident_positions_exit_one(capsys):
    assert main.main(['couple', '--position', '0', '0', '0', '--position', '0', '0', '0']) == 1
    assert 'share a position' in capsys.readouterr().err


def test_couple_gamma_count_must_match(capsys):
    assert main.main(['couple', '--position', '0', '0', '0', '--position', '0', '0', '1',
                      '--gamma', '28', '14', '7']) == 1


def test_table1_guards_spin_count(capsys):
    assert main.main(['table1', '--n-max', '13']) == 1
    assert main.main(['table1', '--n-max', '1']) == 1


def test_table1_small(tmp_path, capsys):
    code = main.main(['table1', '--n-max', '3', '--tau-max-ns', '120', '--out', str(tmp_path)])
    assert code == 0
    rows = _lines(capsys.readouterr().out)
    assert [row['n'] for row in rows] == ['2', '3']
    three = rows[1]
    assert float(three['j']) == 1.5
    assert float(three['sigma_min']) == pytest.approx(0.440, abs=0.005)
    assert float(three['ratio']) == pytest.approx(0.440 / 0.57735, abs=0.01)
    assert (tmp_path / 'table1.csv').exists()


def test_entropy_command(tmp_path, capsys):
    code = main.main(['entropy', '--kind', 'uniform', '--n', '3', '--d-mhz', '1',
                      '--tau-max-ns', '400', '--out', str(tmp_path)])
    assert code == 0
    fields = _fields(capsys.readouterr().out)
    assert float(fields['max_entropy']) == pytest.approx(0.693, abs=0.01)
    assert fields['plateau_tau_ns'] != 'none'
    assert float(fields['plateau_tau_ns']) <= 336
    assert os.path.exists(fields['file'])


def test_verbose_flag_is_accepted(tmp_path, capsys):
    assert main.main(['-v', 'couple', '--position', '0', '0', '0', '--position', '1', '0', '0']) == 0


def test_cli_smoke_subprocess(tmp_path):
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    cmd = [sys.executable, 'main.py', 'run', '--kind', 'uniform', '--n', '2', '--d-mhz', '1',
           '--tau-max-ns', '20', '--out', str(tmp_path)]
    result = subprocess.run(cmd, check=True, cwd=root, capture_output=True, text=True)
    assert 'sigma_min=' in result.stdout
    assert (tmp_path / 'timeseries.csv').exists()
