"""
Test suite for the spinwright command line

Educational Focus: Commands are driven through click's CliRunner; reports
are read back from ``--report`` files so stderr tables never interfere.
"""

import json

import numpy as np
import pytest
import sys
from pathlib import Path
from click.testing import CliRunner
from scipy.spatial.transform import Rotation

# Add project root to Python path for proper imports
project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from src.cli.main import cli
from src.cli.rho_spec import parse_rho_spec, RhoSpecError
from src.cli.run_config import RunConfig
from src.mesh.obj_io import load_obj, save_obj
from src.mesh.generators import icosphere, ellipsoid, torus
from src.bonnet.congruence import congruence_check


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def sphere_file(tmp_path):
    path = tmp_path / "s.obj"
    save_obj(icosphere(2), path, precision=17)
    return path


def run(runner, args, tmp_path, name="report.json"):
    report = tmp_path / name
    result = runner.invoke(cli, [*args, '--report', str(report)])
    data = json.loads(report.read_text()) if report.exists() else None
    return result, data


# === GENERATE ===

def test_generate_icosphere(runner, tmp_path):
    out = tmp_path / "s.obj"
    result, data = run(runner, ['generate', 'icosphere', '--level', '3', '-o', str(out)], tmp_path)
    assert result.exit_code == 0, result.output
    assert load_obj(out).n_vertices == 642
    assert data['result']['n_vertices'] == 642
    assert data['schema'] == 1
    assert data['version'] == '0.1.0'
    assert data['run_config']['params'] == {'kind': 'icosphere', 'level': 3}


def test_generate_torus(runner, tmp_path):
    out = tmp_path / "t.obj"
    result, data = run(runner, ['generate', 'torus', '--R', '2', '--r', '1', '--nu', '32', '--nv', '16',
                                '-o', str(out)], tmp_path)
    assert result.exit_code == 0, result.output
    assert data['result']['euler_characteristic'] == 0
    assert load_obj(out).genus == 1


@pytest.mark.parametrize("args", [
    ['icosphere', '--level', '99'],
    ['torus', '--level', '3'],
    ['ellipsoid', '--a', '-1'],
])
def test_generate_rejects_bad_parameters(runner, tmp_path, args):
    result = runner.invoke(cli, ['generate', *args, '-o', str(tmp_path / "x.obj")])
    assert result.exit_code == 2
    assert not (tmp_path / "x.obj").exists()


# === TRANSFORM ===

def test_identity_transform(runner, tmp_path, sphere_file):
    out = tmp_path / "s2.obj"
    result, data = run(runner, ['transform', str(sphere_file), '--rho', 'const:0', '-o', str(out)], tmp_path)
    assert result.exit_code == 0, result.output
    assert data['result']['halfdensity_l2_error'] <= 1e-3
    assert data['run_config']['params']['rho'] == 'const:0'
    assert congruence_check(load_obj(sphere_file), load_obj(out)).congruent


def test_constant_change_reports_removed_mean(runner, tmp_path, sphere_file):
    result, data = run(runner, ['transform', str(sphere_file), '--rho', 'const:0.2'], tmp_path)
    assert result.exit_code == 0, result.output
    assert data['result']['rho_mean_removed'] > 0.0
    assert data['result']['immersive'] is True


def test_transform_missing_input(runner, tmp_path):
    result = runner.invoke(cli, ['transform', str(tmp_path / "nope.obj"), '--rho', 'const:0'])
    assert result.exit_code == 2


def test_transform_bad_rho(runner, tmp_path, sphere_file):
    result = runner.invoke(cli, ['transform', str(sphere_file), '--rho', 'lobe:0,0:0.2:0.3'])
    assert result.exit_code == 2


def test_transform_rho_file(runner, tmp_path, sphere_file):
    values = tmp_path / "rho.txt"
    np.savetxt(values, np.zeros(icosphere(2).n_vertices))
    result, data = run(runner, ['transform', str(sphere_file), '--rho', str(values)], tmp_path)
    assert result.exit_code == 0, result.output
    assert data['result']['halfdensity_l2_error'] <= 1e-3


def test_transform_is_byte_for_byte_deterministic(runner, tmp_path, sphere_file):
    out, report = tmp_path / "lobe.obj", tmp_path / "lobe.json"
    args = ['transform', str(sphere_file), '--rho', 'lobe:0,0,1:0.3:0.3', '-o', str(out),
            '--report', str(report), '--seed', '3']
    runs = []
    for _ in range(2):
        result = runner.invoke(cli, args)
        assert result.exit_code == 0, result.output
        runs.append((out.read_bytes(), report.read_bytes()))
    assert runs[0] == runs[1]
    assert b'"closedness_ratio"' in runs[0][1]


# === DIAGNOSE / COMPARE / KERNEL ===

def test_diagnose_torus(runner, tmp_path):
    path = tmp_path / "t.obj"
    save_obj(torus(2.0, 1.0, 32, 16), path, precision=17)
    result, data = run(runner, ['diagnose', str(path)], tmp_path)
    assert result.exit_code == 0, result.output
    assert data['result']['euler_characteristic'] == 0
    assert data['result']['cluster_count'] == 0
    assert data['result']['index_sum'] == 0.0
    assert abs(data['result']['gauss_bonnet_defect']) <= 1e-9


def test_diagnose_ellipsoid_umbilics(runner, tmp_path):
    path = tmp_path / "e.obj"
    save_obj(ellipsoid(1.0, 1.2, 1.5, level=4), path, precision=17)
    result, data = run(runner, ['diagnose', str(path), '--umbilic-tol', '0.1'], tmp_path)
    assert result.exit_code == 0, result.output
    singular = [c for c in data['result']['clusters'] if c['index']]
    assert len(singular) == 4
    assert all(c['index'] == 0.5 for c in singular)
    assert data['result']['index_sum'] == 2.0
    assert data['result']['euler_characteristic'] == 2


def test_diagnose_is_deterministic(runner, tmp_path, sphere_file):
    _, first = run(runner, ['diagnose', str(sphere_file)], tmp_path, "a.json")
    _, second = run(runner, ['diagnose', str(sphere_file)], tmp_path, "b.json")
    first['run_config']['report'] = second['run_config']['report'] = None
    assert first == second


def test_compare_rotated_copy(runner, tmp_path, sphere_file):
    rotated = tmp_path / "r.obj"
    R = Rotation.from_rotvec([0.1, 0.5, -0.2]).as_matrix()
    save_obj(load_obj(sphere_file).transformed(R, [1.0, 0.0, 0.0]), rotated, precision=17)
    result, data = run(runner, ['compare', str(sphere_file), str(rotated)], tmp_path)
    assert result.exit_code == 0, result.output
    assert data['result']['congruent'] is True
    assert data['result']['distortion_max'] <= 1e-8
    assert data['result']['bonnet_mates'] is False
    assert data['result']['halfspace']['in_halfspace'] in (True, False)


def test_compare_mismatched_meshes(runner, tmp_path, sphere_file):
    other = tmp_path / "o.obj"
    save_obj(icosphere(1), other)
    result = runner.invoke(cli, ['compare', str(sphere_file), str(other)])
    assert result.exit_code == 2


def test_kernel_of_own_potential(runner, tmp_path, sphere_file):
    result, data = run(runner, ['kernel', str(sphere_file), '--rho', 'own'], tmp_path)
    assert result.exit_code == 0, result.output
    assert data['result']['kernel_count'] >= 1
    assert data['result']['spectral_gap_ratio'] >= 10.0


def test_kernel_of_shifted_potential(runner, tmp_path, sphere_file):
    result, data = run(runner, ['kernel', str(sphere_file), '--rho', 'own+0.5', '--count', '4'], tmp_path)
    assert result.exit_code == 0, result.output
    assert data['result']['kernel_count'] == 0
    magnitudes = data['result']['eigenvalue_magnitudes']
    assert len(magnitudes) == 4
    assert magnitudes == sorted(magnitudes)
    # the constant spinor has |lambda| = 0.5 exactly and bounds the minimum
    assert magnitudes[0] <= 0.5 + 1e-9
    assert magnitudes[0] >= 0.4


def test_negative_tolerance_rejected(runner, sphere_file):
    result = runner.invoke(cli, ['kernel', str(sphere_file), '--zero-tol', '-1'])
    assert result.exit_code == 2


# === RHO SPECS AND RUN CONFIG ===

def test_parse_rho_specs():
    assert parse_rho_spec('const:0.2').constant == 0.2
    lobe = parse_rho_spec('lobe:0,0,1:0.2:0.3')
    assert (lobe.kind, lobe.axis, lobe.amplitude, lobe.width) == ('lobe', (0.0, 0.0, 1.0), 0.2, 0.3)
    assert parse_rho_spec('own').kind == 'own'
    assert parse_rho_spec('own+1.5').constant == 1.5
    assert parse_rho_spec('values.txt').kind == 'file'


@pytest.mark.parametrize("text", ['const:abc', 'lobe:0,0,1:0.2', 'lobe:0,0,0:0.2:0.3', 'own+x', ''])
def test_malformed_rho_specs(text):
    with pytest.raises(RhoSpecError):
        parse_rho_spec(text)


def test_run_config_round_trip():
    config = RunConfig('kernel', inputs=['a.obj'], zero_tol=0.05, count=4)
    data = json.loads(json.dumps(config.to_dict()))
    assert data['zero_tol'] == 0.05
    assert data['seed'] == 0
    with pytest.raises(ValueError):
        RunConfig('kernel', count=0)


def test_version_reports_configured_name(runner):
    result = runner.invoke(cli, ['--version'])
    assert result.exit_code == 0
    assert result.output.strip() == 'spinwright, version 0.1.0'
