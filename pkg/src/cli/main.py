"""
CLI Module - Spinwright Command Line

Educational Focus: A thin front end over the library. Each subcommand
builds a RunConfig, runs one pipeline and writes a JSON report (sorted keys,
schema-versioned, with the run configuration embedded) to ``--report`` or
stdout. A short rich table goes to stderr for people.

Exit codes:
    0  analysis finished (verdicts live in the JSON, not in the exit code)
    2  bad input: unreadable files, malformed meshes or parameters
    3  transform finished but the spinor was not immersive (mesh still written)

Usage:
    python -m src.cli generate icosphere --level 3 -o s.obj
    python -m src.cli transform s.obj --rho lobe:0,0,1:0.2:0.3 -o s2.obj --report r.json
    python -m src.cli diagnose s.obj
    python -m src.cli compare s.obj s2.obj
    python -m src.cli kernel s.obj --rho own
"""

from functools import wraps
from pathlib import Path
from typing import Any, Dict, Optional
import json
import logging
import math
import sys

import click
import numpy as np
from rich.console import Console
from rich.table import Table

project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

try:
    from src.utils.logger_factory import get_component_logger, log_system_info
    from src.utils.settings import get_setting
    logger = get_component_logger('cli')
except ImportError:
    logger = logging.getLogger(__name__)

    def log_system_info():
        pass

    def get_setting(section, path, default):
        return default

from src.mesh.obj_io import load_obj, save_obj
from src.mesh.generators import generate_test_mesh
from src.mesh.curvature import (
    curvature_report, hopf_differential, mean_curvature_half_density, dihedral_half_density, gauss_bonnet_defect
)
from src.dirac.dirac_operator import assemble_dirac, kernel_dimension
from src.integrate.spin_transform import spin_transform
from src.bonnet.foliation import find_umbilics, umbilic_clusters
from src.bonnet.shape_distortion import bonnet_pair_check
from src.bonnet.congruence import congruence_check
from src.bonnet.gauss_map import gauss_map_halfspace_test
from src.cli.run_config import RunConfig, report_envelope
from src.cli.rho_spec import parse_rho_spec

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_NOT_IMMERSIVE = 3

console = Console(stderr=True)


# === REPORT PLUMBING ===

def _clean(value: Any) -> Any:
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value


def write_report(config: RunConfig, result: Dict[str, Any]) -> None:
    text = json.dumps(_clean(report_envelope(config, result)), sort_keys=True, indent=2)
    if config.report:
        Path(config.report).write_text(text + "\n", encoding='utf-8')
        logger.info(f"Wrote {config.subcommand} report to {config.report}")
    else:
        click.echo(text)


def show_summary(title: str, rows: Dict[str, Any]) -> None:
    table = Table(title=title)
    table.add_column("quantity", style="cyan")
    table.add_column("value", justify="right")
    for key, value in rows.items():
        if isinstance(value, float):
            value = f"{value:.4g}"
        table.add_row(key, str(value))
    console.print(table)


def handle_errors(command):
    """Map bad input to exit code 2 with a one-line message on stderr."""
    @wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (ValueError, OSError, RuntimeError) as e:
            logger.error(f"{command.__name__} failed: {type(e).__name__}: {e}")
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_BAD_INPUT)
    return wrapper


# === COMMANDS ===

@click.group(name='spinwright')
@click.version_option(version=str(get_setting('application', 'core.version', '0.1.0')),
                      prog_name=str(get_setting('application', 'core.name', 'spinwright')))
def cli():
    """Spin transformations and Bonnet diagnostics for closed triangle meshes."""
    log_system_info()


@cli.command()
@click.argument('kind', type=click.Choice(['icosphere', 'ellipsoid', 'torus', 'box']))
@click.option('-o', '--output', required=True, type=click.Path(dir_okay=False), help='OBJ file to write.')
@click.option('--report', type=click.Path(dir_okay=False), help='JSON report path (default: stdout).')
@click.option('--level', type=int, help='Subdivision level (icosphere, ellipsoid).')
@click.option('--a', 'a', type=float, help='Ellipsoid semi-axis along x.')
@click.option('--b', 'b', type=float, help='Ellipsoid semi-axis along y.')
@click.option('--c', 'c', type=float, help='Ellipsoid semi-axis along z.')
@click.option('--R', 'major', type=float, help='Torus major radius.')
@click.option('--r', 'minor', type=float, help='Torus tube radius.')
@click.option('--nu', type=int, help='Torus samples around the axis.')
@click.option('--nv', type=int, help='Torus samples around the tube.')
@click.option('--size', type=float, help='Box edge length.')
@click.option('--n', 'cells', type=int, help='Box cells per side.')
@handle_errors
def generate(kind, output, report, level, a, b, c, major, minor, nu, nv, size, cells):
    """Write an analytic test mesh as OBJ."""
    given = {'level': level, 'a': a, 'b': b, 'c': c, 'R': major, 'r': minor,
             'nu': nu, 'nv': nv, 'size': size, 'n': cells}
    params = {k: v for k, v in given.items() if v is not None}
    config = RunConfig('generate', output=output, report=report, params={'kind': kind, **params})
    mesh = generate_test_mesh(kind, **params)
    save_obj(mesh, output)
    result = {
        'n_vertices': mesh.n_vertices,
        'n_faces': mesh.n_faces,
        'euler_characteristic': mesh.euler_characteristic,
        'genus': mesh.genus,
    }
    write_report(config, result)
    show_summary(f"generate {kind}", result)


@cli.command()
@click.argument('mesh_path', type=click.Path(dir_okay=False))
@click.option('--rho', 'rho_text', required=True, help='const:<c>, lobe:<x>,<y>,<z>:<amp>:<width>, own, own+<c> or a file.')
@click.option('-o', '--output', type=click.Path(dir_okay=False), help='OBJ file for the transformed mesh.')
@click.option('--report', type=click.Path(dir_okay=False), help='JSON report path (default: stdout).')
@click.option('--seed', default=0, show_default=True, type=int)
@click.option('--tol', type=float, help='Eigen-residual target of the spinor solve.')
@handle_errors
def transform(mesh_path, rho_text, output, report, seed, tol):
    """Change the mean-curvature half-density of a mesh by rho, conformally."""
    config = RunConfig('transform', inputs=[mesh_path], output=output, report=report, seed=seed, tol=tol,
                       params={'rho': rho_text})
    spec = parse_rho_spec(rho_text)
    mesh = load_obj(mesh_path)
    new, transform_report = spin_transform(mesh, spec.change(mesh), tol=tol, seed=seed)
    if output:
        save_obj(new, output)
    result = transform_report.to_dict()
    write_report(config, result)
    show_summary("transform", {k: v for k, v in result.items() if k != 'periods'})
    if not transform_report.immersive:
        logger.warning("Transformed spinor is not immersive; the mesh was written anyway")
        click.echo("Warning: spinor is not immersive", err=True)
        sys.exit(EXIT_NOT_IMMERSIVE)


@cli.command()
@click.argument('mesh_path', type=click.Path(dir_okay=False))
@click.option('--report', type=click.Path(dir_okay=False), help='JSON report path (default: stdout).')
@click.option('--umbilic-tol', type=float, help='Relative principal-curvature gap counted as umbilic.')
@handle_errors
def diagnose(mesh_path, report, umbilic_tol):
    """Curvature, Hopf differential and umbilic indices of one mesh."""
    config = RunConfig('diagnose', inputs=[mesh_path], report=report, umbilic_tol=umbilic_tol)
    mesh = load_obj(mesh_path)
    curvature = curvature_report(mesh)
    q = hopf_differential(mesh)
    umbilics = find_umbilics(curvature, umbilic_tol)
    summary = umbilic_clusters(mesh, q, umbilics)
    cotan = mean_curvature_half_density(mesh).values
    dihedral = dihedral_half_density(mesh).values

    result = {
        'n_vertices': mesh.n_vertices,
        'n_faces': mesh.n_faces,
        'euler_characteristic': mesh.euler_characteristic,
        'genus': mesh.genus,
        'gauss_bonnet_defect': gauss_bonnet_defect(mesh),
        'curvature': curvature.summary(),
        'halfdensity_estimator_gap': float(np.linalg.norm(cotan - dihedral) / np.linalg.norm(dihedral)),
        'hopf': {
            'max': float(q.magnitude.max() * mesh.bounding_radius),
            'mean': float(q.magnitude.mean() * mesh.bounding_radius),
        },
        'umbilic_count': len(umbilics),
        'umbilics': umbilics,
        **summary.to_dict(),
    }
    write_report(config, result)
    show_summary("diagnose", {
        'vertices': mesh.n_vertices,
        'chi': mesh.euler_characteristic,
        'umbilic vertices': len(umbilics),
        'clusters': len(summary.clusters),
        'index sum': summary.index_sum,
    })


@cli.command()
@click.argument('first_path', type=click.Path(dir_okay=False))
@click.argument('second_path', type=click.Path(dir_okay=False))
@click.option('--report', type=click.Path(dir_okay=False), help='JSON report path (default: stdout).')
@click.option('--iso-tol', type=float, help='Relative edge-length tolerance of the isometry check.')
@click.option('--allow-reflection', is_flag=True, help='Accept orientation-reversing motions.')
@handle_errors
def compare(first_path, second_path, report, iso_tol, allow_reflection):
    """Isometry, shape distortion, congruence and Gauss-map tests for a pair."""
    config = RunConfig('compare', inputs=[first_path, second_path], report=report, iso_tol=iso_tol,
                       allow_reflection=allow_reflection)
    m1, m2 = load_obj(first_path), load_obj(second_path)
    pair = bonnet_pair_check(m1, m2, iso_tol=iso_tol, allow_reflection=allow_reflection)
    motion = congruence_check(m1, m2, allow_reflection).motion
    halfspace = gauss_map_halfspace_test(m1.normal_field(), m2.normal_field())

    result = {
        **pair.to_dict(),
        'motion': {
            'rotation': motion.rotation,
            'translation': motion.translation,
            'reflection': motion.reflection,
        },
        'halfspace': halfspace.to_dict(),
    }
    write_report(config, result)
    show_summary("compare", {
        'isometric': pair.isometric,
        'congruent': pair.congruent,
        'bonnet mates': pair.bonnet_mates,
        'max |D20|': pair.distortion_max,
        'half-space': halfspace.in_halfspace,
    })


@cli.command()
@click.argument('mesh_path', type=click.Path(dir_okay=False))
@click.option('--rho', 'rho_text', default='own', show_default=True, help='Potential: own, own+<c>, const:<c>, lobe:... or a file.')
@click.option('--report', type=click.Path(dir_okay=False), help='JSON report path (default: stdout).')
@click.option('--zero-tol', type=float, help='Dirac eigenvalue magnitudes at or below this count as kernel.')
@click.option('--count', type=int, help='Number of eigenvalues to compute.')
@click.option('--seed', default=0, show_default=True, type=int)
@click.option('--tol', type=float, help='Eigen-residual target.')
@handle_errors
def kernel(mesh_path, rho_text, report, zero_tol, count, seed, tol):
    """Low spectrum and kernel dimension of D - U."""
    config = RunConfig('kernel', inputs=[mesh_path], report=report, seed=seed, tol=tol, zero_tol=zero_tol,
                       count=count, params={'rho': rho_text})
    spec = parse_rho_spec(rho_text)
    mesh = load_obj(mesh_path)
    asm = assemble_dirac(mesh, spec.potential(mesh))
    dimension, magnitudes = kernel_dimension(asm, zero_tol=zero_tol, count=count, tol=tol, seed=seed)
    gap: Optional[float] = None
    if 0 < dimension < len(magnitudes):
        # an exact kernel vector sits at rounding level
        gap = magnitudes[dimension] / max(magnitudes[dimension - 1], 1e-12)

    result = {'kernel_count': dimension, 'eigenvalue_magnitudes': magnitudes, 'spectral_gap_ratio': gap}
    write_report(config, result)
    show_summary("kernel", {'kernel count': dimension, 'smallest': magnitudes[0],
                            'gap ratio': 'n/a' if gap is None else gap})


if __name__ == "__main__":
    cli()
