import json

import pytest

from app import build_parser, main

PAIR = ['--n', '2', '--x', '0.3', '-0.2', '--y', '0.4', '-0.4']


def report(capsys):
    return json.loads(capsys.readouterr().out)


def test_parser_lists_every_command():
    help_text = build_parser().format_help()
    for command in ("eval", "verify", "scan", "lemma", "bounds"):
        assert command in help_text


def test_eval_single_particle(capsys):
    # alpha = 2 pi at unit periods, so E_1(0.5, 2) = exp(2 pi i) = 1
    assert main(['eval', '--n', '1', '--x', '0.5', '--y', '2.0']) == 0
    result = report(capsys)
    assert result['value_re'] == pytest.approx(1.0)
    assert result['value_im'] == pytest.approx(0.0, abs=1e-12)
    assert result['error_estimate'] == 0.0


def test_eval_two_particles_routes_agree(capsys):
    assert main(['eval', *PAIR]) == 0
    direct = report(capsys)
    assert main(['eval', *PAIR, '--representation', 'residue']) == 0
    shifted = report(capsys)
    assert shifted['value_re'] == pytest.approx(direct['value_re'], abs=1e-6)
    assert shifted['value_im'] == pytest.approx(direct['value_im'], abs=1e-6)


def test_eval_writes_output_file(tmp_path):
    path = tmp_path / "value.json"
    assert main(['--output', str(path), 'eval', '--function', 'J', *PAIR]) == 0
    assert set(json.loads(path.read_text())) == {'value_re', 'value_im', 'error_estimate', 'evaluations'}


def test_coupling_outside_strip_is_a_precondition_failure(caplog):
    assert main(['eval', *PAIR, '--b', '2.1']) == 2
    assert "S_a" in caplog.text


def test_positions_outside_domain():
    config_args = ['eval', '--n', '2', '--x', '0', '1.8j', '--y', '1', '-1']
    assert main(config_args) == 2


def test_usage_errors():
    assert main([]) == 1
    assert main(['verify', '--suite', 'everything']) == 1
    assert main(['eval', '--n', '2']) == 1
    assert main(['eval', '--n', '3', '--x', '0.1', '0.2', '--y', '1', '0', '-1']) == 1
    assert main(['eval', *PAIR, '--tol', '5']) == 1


def test_config_file(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({'x': [0.25], 'y': [2.0], 'function': 'E'}))
    assert main(['--config', str(path), 'eval']) == 0
    # exp(2 pi i * 0.5) = -1
    assert report(capsys)['value_re'] == pytest.approx(-1.0)


def test_verify_suite_with_csv(tmp_path, capsys):
    path = tmp_path / "checks.csv"
    assert main(['--csv', str(path), 'verify', '--suite', 'kernels', '--seed', '11']) == 0
    result = report(capsys)
    assert result['pass'] and result['seed'] == 11
    lines = path.read_bytes().split(b"\r\n")
    assert lines[0] == b"name,measured,threshold,pass,suite"
    assert len([line for line in lines[1:] if line]) == len(result['checks'])


def test_lemma_two_particles(tmp_path, capsys):
    path = tmp_path / "terms.csv"
    assert main(['--csv', str(path), 'lemma', *PAIR, '--compare']) == 0
    result = report(capsys)
    assert result['terms'] == 2
    assert result['r'] == pytest.approx(0.75)
    assert result['pole_clearance'] == pytest.approx(0.25)
    assert result['relative_gap'] < 1e-6
    assert path.read_text().startswith("term,L,nu,")


def test_lemma_needs_two_particles():
    assert main(['lemma', '--n', '1']) == 1


def test_lemma_bad_shift():
    assert main(['lemma', *PAIR, '--shift', '1.5']) == 2


def test_bounds_single_claim(tmp_path, capsys):
    path = tmp_path / "samples.csv"
    assert main(['--csv', str(path), 'bounds', '--claim', 'u_asymptotics']) == 0
    result = report(capsys)
    assert [fit['claim'] for fit in result['fits']] == ['u_asymptotics']
    assert "ratio" in path.read_text().splitlines()[0]


def test_bounds_unknown_claim():
    assert main(['bounds', '--claim', 'no_such_claim']) == 1


def test_bounds_growth(capsys):
    assert main(['bounds', '--claim', 'polynomial_growth']) == 0
    assert len(report(capsys)['fits']) == 3


def test_scan_rejects_decreasing_window():
    assert main(['scan', *PAIR, '--t', '1.0', '0.5', '2.0']) == 1


@pytest.mark.slow
def test_scan_two_particles(tmp_path, capsys):
    path = tmp_path / "scan.csv"
    argv = ['--csv', str(path), 'scan', '--n', '2', '--x', '0.3', '-0.3', '--representation', 'direct',
            '--t', *[str(0.25 * k) for k in range(1, 13)]]
    assert main(argv) == 0
    result = report(capsys)
    assert result['pass']
    assert result['samples'] == 12
    assert path.read_text().startswith("t,d_N,")
