"""
Test suite for foliation indices and umbilic detection

Educational Focus: Synthetic z^n dz^2 fields on a flat patch have index
-n/2 exactly. On a fine ellipsoid the four umbilics of the Hopf differential
each carry +1/2 and add up to the Euler characteristic.
"""

import numpy as np
import pytest
import sys
from pathlib import Path

# Add project root to Python path for proper imports
project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from src.bonnet.foliation import foliation_index, find_umbilics, umbilic_clusters, UndefinedIndexError
from src.bonnet.shape_distortion import face_field_from_chart
from src.mesh.curvature import QuadDiffField, curvature_report, hopf_differential
from src.mesh.generators import icosphere, ellipsoid, torus, box


@pytest.fixture(scope="module")
def flat_top():
    mesh = box(2.0, 8)
    center = int(np.argmin(np.linalg.norm(mesh.vertices - [0.0, 0.0, 1.0], axis=1)))
    return mesh, center


@pytest.mark.parametrize("order", [1, 2, 3])
def test_power_field_index(flat_top, order):
    mesh, center = flat_top
    q = face_field_from_chart(mesh, center, lambda z: z ** order)
    index = foliation_index(mesh, q, center)
    assert index == -order / 2
    assert float(2 * index).is_integer()


def test_constant_field_has_index_zero(flat_top):
    mesh, center = flat_top
    q = face_field_from_chart(mesh, center, lambda z: np.full_like(z, 1.0 - 0.5j))
    assert foliation_index(mesh, q, center) == 0.0


def test_conjugate_field_has_positive_index(flat_top):
    mesh, center = flat_top
    q = face_field_from_chart(mesh, center, np.conj)
    assert foliation_index(mesh, q, center) == 0.5


def test_vanishing_field_has_no_index(flat_top):
    mesh, center = flat_top
    with pytest.raises(UndefinedIndexError):
        foliation_index(mesh, QuadDiffField(np.zeros(mesh.n_faces), mesh.identity), center)


def test_round_sphere_is_totally_umbilic():
    sphere = icosphere(3)
    umbilics = find_umbilics(curvature_report(sphere), tol=0.1)
    assert umbilics == list(range(sphere.n_vertices))
    summary = umbilic_clusters(sphere, hopf_differential(sphere), umbilics)
    assert len(summary.clusters) == 1
    assert summary.clusters[0].index is None
    assert not summary.consistent


def test_ellipsoid_has_four_umbilics():
    mesh = ellipsoid(1.0, 1.2, 1.5, level=4)
    umbilics = find_umbilics(curvature_report(mesh), tol=0.1)
    summary = umbilic_clusters(mesh, hopf_differential(mesh), umbilics)
    singular = [c for c in summary.clusters if c.index]
    assert len(singular) == 4
    assert all(c.index == 0.5 for c in singular)
    assert summary.index_sum == 2.0
    assert summary.index_sum == mesh.euler_characteristic
    centres = np.array([mesh.vertices[c.vertices].mean(axis=0) for c in singular])
    assert np.allclose(centres[:, 1], 0.0, atol=0.15)


def test_torus_has_no_umbilics():
    mesh = torus(2.0, 1.0, 32, 16)
    q = hopf_differential(mesh)
    assert q.magnitude.min() > 0.0
    umbilics = find_umbilics(curvature_report(mesh), tol=0.1)
    summary = umbilic_clusters(mesh, q, umbilics)
    assert umbilics == []
    assert summary.index_sum == 0.0
    assert summary.consistent
    assert summary.to_dict()['cluster_count'] == 0
