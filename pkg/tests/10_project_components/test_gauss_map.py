"""
Test suite for the Gauss-map half-space test
"""

import numpy as np
import pytest
import sys
from pathlib import Path

# Add project root to Python path for proper imports
project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from src.bonnet.gauss_map import gauss_map_halfspace_test
from src.bonnet.congruence import ConnectivityMismatchError
from src.mesh.generators import icosphere

TETRA_DIRECTIONS = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / np.sqrt(3.0)


def test_equal_normal_fields_lie_in_halfspace():
    sphere = icosphere(2)
    inside, witness = gauss_map_halfspace_test(sphere.normal_field(), sphere.normal_field())
    assert inside
    assert np.linalg.norm(witness) == pytest.approx(1.0)


def test_tetrahedron_differences_surround_origin():
    result = gauss_map_halfspace_test(TETRA_DIRECTIONS, np.zeros((4, 3)))
    assert not result.in_halfspace
    assert result.witness is None
    assert result.margin < 0.0


def test_upper_hemisphere_witness_points_up():
    d = np.array([[0.3, 0.3, 1.0], [-0.3, 0.3, 1.0], [0.3, -0.3, 1.0], [-0.3, -0.3, 1.0]])
    inside, witness = gauss_map_halfspace_test(d, np.zeros_like(d))
    assert inside
    assert np.allclose(witness, [0.0, 0.0, 1.0], atol=1e-9)
    assert np.all(d @ witness >= 0.0)


def test_opposite_pair_lies_in_closed_halfspace():
    d = np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    result = gauss_map_halfspace_test(d, np.zeros_like(d))
    assert result.in_halfspace
    assert abs(result.witness[0]) <= 1e-9
    assert result.margin == pytest.approx(0.0, abs=1e-12)


def test_size_mismatch_rejected():
    with pytest.raises(ConnectivityMismatchError):
        gauss_map_halfspace_test(np.zeros((3, 3)), np.zeros((4, 3)))
