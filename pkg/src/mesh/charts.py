"""
Mesh Module - Local Orthonormal Charts

Educational Focus: Quadratic differentials are stored as one complex number
per face, which only means something relative to a chart. Two kinds of chart
are used:

- face chart: x-axis along the face's first halfedge, y = N_f x x
- vertex chart: tangent plane of the vertex normal, x-axis from the
  coordinate axis least aligned with the normal

Both are deterministic functions of the geometry, so values are reproducible
bit-for-bit. A weight-2 quantity q dz^2 written in a chart rotated by phi
picks up a factor exp(-2 i phi).
"""

from typing import Tuple

import numpy as np


def tangent_frames(normals: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Orthonormal tangent pairs (t1, t2) with t1 x t2 = n for (m, 3) unit normals.
    """
    normals = np.atleast_2d(np.asarray(normals, dtype=float))
    axis_index = np.argmin(np.abs(normals), axis=1)
    axes = np.eye(3)[axis_index]
    t1 = axes - np.sum(axes * normals, axis=1)[:, None] * normals
    t1 /= np.linalg.norm(t1, axis=1)[:, None]
    t2 = np.cross(normals, t1)
    return t1, t2


def face_frames(mesh) -> Tuple[np.ndarray, np.ndarray]:
    """Per-face chart axes: x along faces[f, 0] -> faces[f, 1], y = N_f x x."""
    first = mesh.vertices[mesh.faces[:, 1]] - mesh.vertices[mesh.faces[:, 0]]
    x_axis = first / np.linalg.norm(first, axis=1)[:, None]
    y_axis = np.cross(mesh.face_normals, x_axis)
    return x_axis, y_axis


def angles_in_chart(directions: np.ndarray, normal: np.ndarray, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    """
    Angle of each 3D direction after projection into the chart (normal, t1, t2).

    Args:
        directions: (m, 3) vectors, e.g. face x-axes
        normal, t1, t2: the chart's unit normal and tangent axes
    """
    directions = np.atleast_2d(directions)
    projected = directions - np.outer(directions @ normal, normal)
    return np.arctan2(projected @ t2, projected @ t1)


def planar_coordinates(points: np.ndarray, origin: np.ndarray, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    """Complex coordinate z = u + i v of points projected into a tangent chart."""
    d = np.atleast_2d(points) - origin
    return d @ t1 + 1j * (d @ t2)


def to_chart(q: np.ndarray, chart_angles: np.ndarray) -> np.ndarray:
    """Re-express face-chart values in a chart where the face x-axes sit at ``chart_angles``."""
    return q * np.exp(-2j * chart_angles)


def from_chart(q: np.ndarray, chart_angles: np.ndarray) -> np.ndarray:
    """Inverse of ``to_chart``."""
    return q * np.exp(2j * chart_angles)
