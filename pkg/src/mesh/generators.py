"""
Mesh Module - Test Surface Generators

Educational Focus: Analytic surfaces with known curvature are the oracles of
every numerical check:

- icosphere(level): subdivided icosahedron on the unit sphere, 10 * 4^level + 2
  vertices, with vertices exactly at the poles (0, 0, +-1)
- ellipsoid(a, b, c, level): icosphere coordinates scaled per axis
- torus(R, r, nu, nv): regular nu x nv grid on the torus of revolution
- box(size, n): closed cube surface with n x n cells per side; its faces are
  exactly flat, which gives exact planar charts for diagnostics

All faces are oriented counter-clockwise seen from outside.
"""

from pathlib import Path
from typing import Any
import logging
import sys

import numpy as np

project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

try:
    from src.utils.logger_factory import get_component_logger
    from src.utils.settings import get_setting
    logger = get_component_logger('mesh')
except ImportError:
    logger = logging.getLogger(__name__)

    def get_setting(section, path, default):
        return default

from src.mesh.trimesh import TriMesh


class ParameterRangeError(ValueError):
    """Generator parameters outside their supported range."""


def _range_error(message: str):
    logger.error(message)
    raise ParameterRangeError(message)


def _icosahedron():
    z = 1.0 / np.sqrt(5.0)
    r = 2.0 / np.sqrt(5.0)
    k = np.arange(5)
    upper = np.stack([r * np.cos(2 * np.pi * k / 5), r * np.sin(2 * np.pi * k / 5), np.full(5, z)], axis=1)
    lower = np.stack([r * np.cos(2 * np.pi * k / 5 + np.pi / 5), r * np.sin(2 * np.pi * k / 5 + np.pi / 5),
                      np.full(5, -z)], axis=1)
    vertices = np.vstack([[0.0, 0.0, 1.0], upper, lower, [0.0, 0.0, -1.0]])
    u = 1 + k
    u_next = 1 + (k + 1) % 5
    l = 6 + k
    l_next = 6 + (k + 1) % 5
    faces = np.vstack([
        np.stack([np.zeros(5, dtype=int), u, u_next], axis=1),
        np.stack([u, l, u_next], axis=1),
        np.stack([u_next, l, l_next], axis=1),
        np.stack([np.full(5, 11), l_next, l], axis=1),
    ])
    return vertices, faces


def _subdivide(vertices: np.ndarray, faces: np.ndarray):
    """Split every triangle into four through its edge midpoints."""
    n = vertices.shape[0]
    pairs = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    keys = np.minimum(pairs[:, 0], pairs[:, 1]) * n + np.maximum(pairs[:, 0], pairs[:, 1])
    unique_keys, inverse = np.unique(keys, return_inverse=True)
    midpoints = 0.5 * (vertices[unique_keys // n] + vertices[unique_keys % n])
    F = faces.shape[0]
    ab, bc, ca = (n + inverse[j * F:(j + 1) * F] for j in range(3))
    a, b, c = faces[:, 0], faces[:, 1], faces[:, 2]
    new_faces = np.vstack([
        np.stack([a, ab, ca], axis=1),
        np.stack([b, bc, ab], axis=1),
        np.stack([c, ca, bc], axis=1),
        np.stack([ab, bc, ca], axis=1),
    ])
    return np.vstack([vertices, midpoints]), new_faces


def _check_level(level: int):
    max_level = int(get_setting('mesh', 'generators.max_icosphere_level', 7))
    if int(level) != level or not 0 <= level <= max_level:
        _range_error(f"icosphere level must be an integer in [0, {max_level}], got {level}")


def icosphere(level: int = 3) -> TriMesh:
    """
    Unit icosphere.

    Example:
        >>> icosphere(0).n_vertices, icosphere(0).n_faces
        (12, 20)
    """
    _check_level(level)
    vertices, faces = _icosahedron()
    for _ in range(int(level)):
        vertices, faces = _subdivide(vertices, faces)
        vertices = vertices / np.linalg.norm(vertices, axis=1)[:, None]
    logger.debug(f"Generated icosphere level {level}: {vertices.shape[0]} vertices")
    return TriMesh(vertices, faces)


def ellipsoid(a: float = 1.0, b: float = 1.0, c: float = 1.0, level: int = 3) -> TriMesh:
    """Ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 sampled on icosphere vertices."""
    if min(a, b, c) <= 0:
        _range_error(f"ellipsoid semi-axes must be positive, got ({a}, {b}, {c})")
    sphere = icosphere(level)
    return sphere.with_vertices(sphere.vertices * np.array([a, b, c], dtype=float))


def torus(R: float = 2.0, r: float = 1.0, nu: int = 32, nv: int = 16) -> TriMesh:
    """
    Torus of revolution around the z-axis with major radius R and tube radius r.
    """
    min_res = int(get_setting('mesh', 'generators.min_torus_resolution', 3))
    if int(nu) != nu or int(nv) != nv or nu < min_res or nv < min_res:
        _range_error(f"torus resolution must be integers >= {min_res}, got nu={nu}, nv={nv}")
    if not 0 < r < R:
        _range_error(f"torus radii must satisfy 0 < r < R, got R={R}, r={r}")
    nu, nv = int(nu), int(nv)
    u = 2 * np.pi * np.arange(nu) / nu
    v = 2 * np.pi * np.arange(nv) / nv
    U, V = np.meshgrid(u, v, indexing='ij')
    ring = R + r * np.cos(V)
    vertices = np.stack([ring * np.cos(U), ring * np.sin(U), r * np.sin(V)], axis=-1).reshape(-1, 3)

    i, j = np.meshgrid(np.arange(nu), np.arange(nv), indexing='ij')
    i, j = i.reshape(-1), j.reshape(-1)
    p00 = i * nv + j
    p10 = ((i + 1) % nu) * nv + j
    p11 = ((i + 1) % nu) * nv + (j + 1) % nv
    p01 = i * nv + (j + 1) % nv
    faces = np.vstack([np.stack([p00, p10, p11], axis=1), np.stack([p00, p11, p01], axis=1)])
    logger.debug(f"Generated torus R={R} r={r} ({nu} x {nv})")
    return TriMesh(vertices, faces)


# (normal, t1, t2) with t1 x t2 = normal
_BOX_SIDES = [
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((-1, 0, 0), (0, 0, 1), (0, 1, 0)),
    ((0, 1, 0), (0, 0, 1), (1, 0, 0)),
    ((0, -1, 0), (1, 0, 0), (0, 0, 1)),
    ((0, 0, 1), (1, 0, 0), (0, 1, 0)),
    ((0, 0, -1), (0, 1, 0), (1, 0, 0)),
]


def box(size: float = 2.0, n: int = 8) -> TriMesh:
    """
    Closed cube surface centred at the origin with n x n cells per side.

    Duplicate corner and edge vertices of the six sides are welded, giving
    6 n^2 + 2 vertices.
    """
    if int(n) != n or n < 1:
        _range_error(f"box resolution must be a positive integer, got {n}")
    if size <= 0:
        _range_error(f"box size must be positive, got {size}")
    n = int(n)
    s = np.linspace(0.0, 1.0, n + 1)
    A, B = np.meshgrid(s, s, indexing='ij')
    A, B = A.reshape(-1), B.reshape(-1)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    i, j = i.reshape(-1), j.reshape(-1)
    p00 = i * (n + 1) + j
    p10 = (i + 1) * (n + 1) + j
    p11 = (i + 1) * (n + 1) + j + 1
    p01 = i * (n + 1) + j + 1
    side_faces = np.vstack([np.stack([p00, p10, p11], axis=1), np.stack([p00, p11, p01], axis=1)])

    points, faces = [], []
    for side, (normal, t1, t2) in enumerate(_BOX_SIDES):
        normal, t1, t2 = (np.array(x, dtype=float) for x in (normal, t1, t2))
        pts = 0.5 * size * normal + size * ((A - 0.5)[:, None] * t1 + (B - 0.5)[:, None] * t2)
        points.append(pts)
        faces.append(side_faces + side * (n + 1) ** 2)
    points = np.vstack(points)
    faces = np.vstack(faces)

    rounded = np.round(points / size, 9)
    unique_points, inverse = np.unique(rounded, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    vertices = unique_points * size
    logger.debug(f"Generated box size={size} n={n}: {vertices.shape[0]} vertices")
    return TriMesh(vertices, inverse[faces])


GENERATORS = {
    'icosphere': icosphere,
    'ellipsoid': ellipsoid,
    'torus': torus,
    'box': box,
}


def generate_test_mesh(kind: str, **params: Any) -> TriMesh:
    """
    Dispatch to a named generator.

    Args:
        kind: 'icosphere', 'ellipsoid', 'torus' or 'box'
        **params: keyword arguments of the generator

    Raises:
        ParameterRangeError: unknown kind or out-of-range parameters
    """
    if kind not in GENERATORS:
        _range_error(f"unknown mesh kind '{kind}', expected one of {sorted(GENERATORS)}")
    try:
        return GENERATORS[kind](**params)
    except TypeError as e:
        _range_error(f"bad parameters for {kind}: {e}")
