"""
Test suite for TriMesh construction, validation and connectivity queries
"""

import logging

import numpy as np
import pytest
import sys
from pathlib import Path

# Add project root to Python path for proper imports
project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from src.mesh.trimesh import (
    TriMesh, NormalField, MeshError, NonManifoldError, OpenBoundaryError,
    OrientationError, DegenerateFaceError
)
from src.mesh.generators import icosphere, torus

TET_VERTICES = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
TET_FACES = np.array([[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]])


@pytest.fixture
def tetrahedron():
    return TriMesh(TET_VERTICES, TET_FACES)


# === COUNTS AND TOPOLOGY ===

def test_tetrahedron_counts(tetrahedron):
    assert (tetrahedron.n_vertices, tetrahedron.n_edges, tetrahedron.n_faces) == (4, 6, 4)
    assert tetrahedron.euler_characteristic == 2
    assert tetrahedron.genus == 0


def test_faces_point_outward(tetrahedron):
    centroids = tetrahedron.vertices[tetrahedron.faces].mean(axis=1)
    assert np.all(np.sum(centroids * tetrahedron.face_normals, axis=1) > 0)


def test_twins_are_opposite(tetrahedron):
    twin = tetrahedron.he_twin
    assert np.array_equal(twin[twin], np.arange(12))
    assert np.array_equal(tetrahedron.he_tail[twin], tetrahedron.he_head)


def test_one_ring_is_counter_clockwise():
    sphere = icosphere(0)
    assert sphere.one_ring(0) == [1, 2, 3, 4, 5]
    assert len(sphere.vertex_faces(0)) == 5


def test_torus_genus():
    assert torus(2, 1, 12, 8).genus == 1


def test_identity_changes_with_geometry(tetrahedron):
    assert tetrahedron.identity == TriMesh(TET_VERTICES, TET_FACES).identity
    assert tetrahedron.identity != tetrahedron.scaled(2.0).identity


# === GEOMETRY ===

def test_vertex_areas_sum_to_total(tetrahedron):
    assert tetrahedron.vertex_areas.sum() == pytest.approx(tetrahedron.total_area)


def test_sphere_vertex_normals_are_radial():
    sphere = icosphere(2)
    assert np.allclose(sphere.vertex_normals, sphere.vertices, atol=1e-12)
    assert isinstance(sphere.normal_field(), NormalField)


def test_cotan_laplacian_annihilates_constants(tetrahedron):
    L = tetrahedron.cotan_laplacian()
    assert np.allclose(L @ np.ones(4), 0.0, atol=1e-14)
    assert np.allclose((L - L.T).toarray(), 0.0)


def test_transformed_preserves_edge_lengths(tetrahedron):
    angle = 0.3
    R = np.array([[np.cos(angle), -np.sin(angle), 0], [np.sin(angle), np.cos(angle), 0], [0, 0, 1]])
    moved = tetrahedron.transformed(R, [1.0, 2.0, 3.0])
    assert np.allclose(moved.edge_lengths, tetrahedron.edge_lengths, atol=1e-14)


def test_normal_field_rejects_non_unit():
    with pytest.raises(ValueError):
        NormalField(np.array([[0.0, 0.0, 2.0]]))


def test_normal_field_errors_are_logged(caplog):
    mesh_logger = logging.getLogger('spinwright.mesh')
    mesh_logger.addHandler(caplog.handler)
    try:
        with pytest.raises(ValueError):
            NormalField(np.zeros((2, 2)))
    finally:
        mesh_logger.removeHandler(caplog.handler)
    assert any(r.levelno == logging.ERROR and "shape (n, 3)" in r.getMessage() for r in caplog.records)


# === VALIDATION ===

def test_edge_shared_by_three_faces_is_non_manifold():
    vertices = np.vstack([TET_VERTICES, [[2.0, 0.0, 0.0]]])
    faces = np.vstack([TET_FACES, [[0, 1, 4]]])
    with pytest.raises(NonManifoldError):
        TriMesh(vertices, faces)


def test_missing_face_is_open_boundary():
    with pytest.raises(OpenBoundaryError):
        TriMesh(TET_VERTICES, TET_FACES[:3])


def test_flipped_face_is_inconsistently_oriented():
    faces = TET_FACES.copy()
    faces[0] = [0, 2, 1]
    with pytest.raises(OrientationError):
        TriMesh(TET_VERTICES, faces)


def test_collinear_face_is_degenerate():
    vertices = TET_VERTICES.copy()
    vertices[3] = 0.5 * (vertices[0] + vertices[1])
    with pytest.raises(DegenerateFaceError):
        TriMesh(vertices, TET_FACES)


def test_repeated_vertex_in_face():
    faces = TET_FACES.copy()
    faces[0] = [0, 0, 2]
    with pytest.raises(MeshError):
        TriMesh(TET_VERTICES, faces)


def test_two_tetrahedra_sharing_a_vertex_are_non_manifold():
    second = TET_VERTICES + np.array([2.0, 2.0, 2.0])
    vertices = np.vstack([TET_VERTICES, second[1:]])
    faces = np.vstack([TET_FACES, np.where(TET_FACES == 0, 0, TET_FACES + 3)])
    with pytest.raises(NonManifoldError):
        TriMesh(vertices, faces)


def test_errors_are_value_errors():
    assert issubclass(NonManifoldError, ValueError)
