"""Tests for the qpolar command line."""

import csv
import json
from pathlib import Path

import pytest

from qpolar.cli import CSV_COLUMNS, main


@pytest.fixture
def erasure_spec(tmp_path: Path) -> Path:
    out = tmp_path / 'erasure.json'
    assert main(['construct', '--channel', 'erasure:p=0.25', '--n', '256',
                 '--method', 'exact-bec', '--out', str(out)]) == 0
    return out


def test_construct_writes_spec(erasure_spec: Path) -> None:
    """Test the JSON document written by construct."""
    data = json.loads(erasure_spec.read_text())
    assert data['n'] == 256
    assert data['index_base'] == 0
    assert 0.0 <= data['net_rate'] < 0.5
    assert sum(data['sizes'].values()) == 256
    assert data['config']['method'] == 'exact-bec'
    assert 'threads' not in data['config']
    assert erasure_spec.read_bytes().endswith(b'\n')


def test_construct_noiseless_channel(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    """Test that a noiseless channel puts every index in Q."""
    out = tmp_path / 'clean.json'
    assert main(['construct', '--channel', 'depolarizing:q=0', '--n', '16',
                 '--method', 'fprime-bound', '--out', str(out)]) == 0
    data = json.loads(out.read_text())
    assert data['sizes'] == {'q': 16, 'a': 0, 'p': 0, 'e': 0}
    assert data['net_rate'] == 1.0
    assert '|Q|=16' in capsys.readouterr().out


def test_construct_for_target_rate(tmp_path: Path) -> None:
    """Test that --rate replaces the epsilon cutoff and is recorded."""
    out = tmp_path / 'rated.json'
    assert main(['construct', '--channel', 'erasure:p=0.25', '--n', '256', '--method', 'exact-bec',
                 '--rate', '0.125', '--out', str(out)]) == 0
    data = json.loads(out.read_text())
    assert data['net_rate'] >= 0.125
    assert data['method']['target_rate'] == 0.125
    assert data['config']['rate'] == 0.125
    assert 0.0 < data['epsilon'] < 1.0


@pytest.mark.parametrize("argv", [
    ['construct', '--n', '16', '--out', 'x.json'],
    ['construct', '--channel', 'amplitude-damping:g=0.1', '--n', '16', '--out', 'x.json'],
    ['construct', '--channel', 'depolarizing:q=1.5', '--n', '16', '--out', 'x.json'],
    ['construct', '--channel', 'depolarizing:q=0.1', '--n', '12', '--out', 'x.json'],
    ['construct', '--channel', 'depolarizing:q=0.1', '--n', '16', '--epsilon', '0', '--out', 'x.json'],
    ['simulate', '--spec', 'x.json', '--trials', '0'],
    ['threshold', '--family', 'amplitude-damping'],
    ['threshold', '--family', 'depolarizing', '--tol', '-1'],
    ['threshold', '--family', 'depolarizing', '--tol', 'nan'],
    ['threshold', '--family', 'depolarizing', '--tol', '0'],
    ['construct', '--channel', 'depolarizing:q=0.1', '--n', '16', '--epsilon', 'nan', '--out', 'x.json'],
    ['construct', '--channel', 'depolarizing:q=0.1', '--n', '16', '--rate', '1.5', '--out', 'x.json'],
    ['construct', '--channel', 'depolarizing:q=0.1', '--n', '16', '--sigmas', '-1', '--out', 'x.json'],
], ids=["missing-channel", "unknown-kind", "bad-probability", "bad-length", "bad-epsilon",
        "zero-trials", "unknown-family", "negative-tol", "nan-tol", "zero-tol", "nan-epsilon",
        "bad-rate", "negative-sigmas"])
def test_invalid_arguments_exit_2(argv: list[str]) -> None:
    """Test that argument errors exit with status 2."""
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    assert excinfo.value.code == 2


def test_simulate_is_byte_identical_across_threads(erasure_spec: Path, tmp_path: Path) -> None:
    """Test that reruns with different thread counts write identical bytes."""
    out = tmp_path / 'report.json'
    payloads = []
    for threads in ('1', '3'):
        assert main(['simulate', '--spec', str(erasure_spec), '--trials', '300', '--seed', '7',
                     '--threads', threads, '--out', str(out)]) == 0
        payloads.append(out.read_bytes())
    assert payloads[0] == payloads[1]
    report = json.loads(payloads[0])
    assert report['trials'] == 300
    assert report['seed'] == 7
    assert report['config']['seed'] == 7


def test_simulate_writes_csv(erasure_spec: Path, tmp_path: Path) -> None:
    """Test the CSV columns of simulate."""
    table = tmp_path / 'rows.csv'
    assert main(['simulate', '--spec', str(erasure_spec), '--trials', '50',
                 '--out', str(tmp_path / 'r.json'), '--csv', str(table)]) == 0
    with table.open(newline='') as f:
        reader = csv.DictReader(f)
        rows = list(reader)
    assert reader.fieldnames == CSV_COLUMNS
    assert len(rows) == 1
    assert float(rows[0]['channel_param']) == 0.25
    assert int(rows[0]['trials']) == 50


def test_simulate_channel_mismatch(erasure_spec: Path, capsys: pytest.CaptureFixture) -> None:
    """Test that a mismatching channel fails with status 1."""
    assert main(['simulate', '--spec', str(erasure_spec), '--channel', 'erasure:p=0.3',
                 '--trials', '10']) == 1
    assert 'constructed for' in capsys.readouterr().err


def test_simulate_missing_spec(tmp_path: Path) -> None:
    """Test that an unreadable spec file fails with status 1."""
    assert main(['simulate', '--spec', str(tmp_path / 'missing.json')]) == 1


def test_threshold_command(tmp_path: Path) -> None:
    """Test the threshold document."""
    out = tmp_path / 'threshold.json'
    assert main(['threshold', '--family', 'depolarizing', '--tol', '1e-9', '--out', str(out)]) == 0
    data = json.loads(out.read_text())
    assert data['family'] == 'depolarizing'
    assert data['tol'] == 1e-9
    assert data['assistance_threshold'] == pytest.approx(0.1205, abs=5e-4)
    assert data['coherent_zero'] == pytest.approx(0.1893, abs=5e-4)


def test_sweep_rows(tmp_path: Path) -> None:
    """Test one CSV row per block length and noise level."""
    table = tmp_path / 'sweep.csv'
    assert main(['sweep', '--family', 'depolarizing', '--params', '0.02,0.05', '--n', '8', '16',
                 '--method', 'fprime-bound', '--trials', '20', '--csv', str(table),
                 '--cache-dir', str(tmp_path / 'cache')]) == 0
    with table.open(newline='') as f:
        rows = list(csv.DictReader(f))
    assert [(int(r['n']), float(r['channel_param'])) for r in rows] == [
        (8, 0.02), (8, 0.05), (16, 0.02), (16, 0.05)]
    assert all(int(r['trials']) == 20 for r in rows)
