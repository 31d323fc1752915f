"""
Bonnet Module - Shape Distortion of Isometric Pairs

Educational Focus: For two isometric immersions of the same mesh the
difference of second fundamental forms D = II_1 - II_2 is a symmetric form on
the shared intrinsic geometry. Its trace-free (2,0) part is stored per face as
a quadratic differential q = p - i s in the face chart. When the two mean
curvatures agree the trace vanishes and q is holomorphic, which
``holomorphicity_residual`` measures with a local linear fit.

Face charts of isometric meshes agree intrinsically: the chart x-axis runs
along the first halfedge of the face, so corresponding triangles have the
same planar coordinates and the two shape operators can be subtracted
entry by entry.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, Optional
import logging
import sys

import numpy as np

project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

try:
    from src.utils.logger_factory import get_component_logger
    from src.utils.settings import get_setting
    logger = get_component_logger('bonnet')
except ImportError:
    logger = logging.getLogger(__name__)

    def get_setting(section, path, default):
        return default

from src.mesh.trimesh import TriMesh
from src.mesh.charts import tangent_frames, face_frames, angles_in_chart, planar_coordinates, to_chart, from_chart
from src.mesh.curvature import QuadDiffField, face_shape_operators, mean_curvature_half_density
from src.bonnet.congruence import ConnectivityMismatchError, congruence_check


class IsometryViolationError(ValueError):
    """
    Corresponding edge lengths differ by more than the isometry tolerance.

    Attributes:
        worst_edge: (i, j) vertex pair of the worst edge
        relative_error: its relative length difference
    """

    def __init__(self, message: str, worst_edge=None, relative_error: float = float('nan')):
        super().__init__(message)
        self.worst_edge = worst_edge
        self.relative_error = relative_error


def _check_connectivity(m1: TriMesh, m2: TriMesh):
    if m1.n_vertices != m2.n_vertices or not np.array_equal(m1.faces, m2.faces):
        error_msg = f"Meshes do not share connectivity: {m1!r} vs {m2!r}"
        logger.error(error_msg)
        raise ConnectivityMismatchError(error_msg)


def check_isometry(m1: TriMesh, m2: TriMesh, iso_tol: Optional[float] = None) -> float:
    """
    Largest relative edge-length difference between two meshes.

    Args:
        iso_tol: allowed relative difference (config ``bonnet.core.iso_tol``;
            loosen it for separately generated meshes)

    Returns:
        float: the worst relative edge-length difference

    Raises:
        ConnectivityMismatchError: faces differ
        IsometryViolationError: the worst difference exceeds ``iso_tol``
    """
    _check_connectivity(m1, m2)
    if iso_tol is None:
        iso_tol = float(get_setting('bonnet', 'core.iso_tol', 1e-6))
    relative = np.abs(m1.edge_lengths - m2.edge_lengths) / m1.edge_lengths
    worst = int(np.argmax(relative))
    worst_error = float(relative[worst])
    if worst_error > iso_tol:
        edge = tuple(int(v) for v in m1.edges[worst])
        error_msg = (f"Meshes are not isometric: edge {edge} differs by {worst_error:.3e} "
                     f"relative (iso_tol {iso_tol:.1e})")
        logger.error(error_msg)
        raise IsometryViolationError(error_msg, worst_edge=edge, relative_error=worst_error)
    return worst_error


def shape_distortion(m1: TriMesh, m2: TriMesh, iso_tol: Optional[float] = None) -> QuadDiffField:
    """
    Trace-free part of II_1 - II_2 per face, with the trace kept alongside.

    Args:
        m1, m2: isometric meshes with identical faces
        iso_tol: relative edge-length tolerance of the isometry check

    Returns:
        QuadDiffField: (2,0) part in the shared face charts; ``trace`` holds
        tr(D) per face (zero when the mean curvatures agree)

    Raises:
        ConnectivityMismatchError, IsometryViolationError

    Example:
        >>> q = shape_distortion(sphere, sphere.transformed(R, t))
        >>> q.magnitude.max() < 1e-8
        True
    """
    check_isometry(m1, m2, iso_tol)
    D = face_shape_operators(m1) - face_shape_operators(m2)
    q = 0.5 * (D[:, 0] - D[:, 2]) - 1j * D[:, 1]
    trace = D[:, 0] + D[:, 2]
    logger.debug(f"Shape distortion {m1!r} vs {m2!r}: max|D20|={np.abs(q).max():.3e}, "
                 f"max|tr D|={np.abs(trace).max():.3e}")
    return QuadDiffField(q, m1.identity, trace=trace)


# === HOLOMORPHICITY ===

def _vertex_chart(m: TriMesh, vertex: int):
    normal = m.vertex_normals[vertex]
    t1, t2 = tangent_frames(normal)
    return normal, t1[0], t2[0]


def _ring_samples(m: TriMesh, q: np.ndarray, faces, origin, normal, t1, t2):
    """Face values transported into a vertex chart, with centroid coordinates."""
    faces = np.asarray(faces)
    x_axis, _ = face_frames(m)
    angles = angles_in_chart(x_axis[faces], normal, t1, t2)
    centroids = m.vertices[m.faces[faces]].mean(axis=1)
    return to_chart(q[faces], angles), planar_coordinates(centroids, origin, t1, t2)


def holomorphicity_residual(m: TriMesh, q: QuadDiffField, vertices: Optional[Iterable[int]] = None) -> float:
    """
    Discrete d-bar residual of a face quadratic differential.

    Around each vertex the one-ring face values are moved into the vertex
    chart and fitted with a + b z (area weights). The residual is the total
    fit error over the total deviation from the ring means, so constants and
    linear functions of z score 0 while conj(z) scores about 0.87
    on a regular flat ring.

    Args:
        m: mesh carrying ``q``
        q: per-face values
        vertices: optional subset of centre vertices (default: all)

    Returns:
        float: the normalized RMS residual (0 for a locally constant field)
    """
    values = q.values if isinstance(q, QuadDiffField) else np.asarray(q, dtype=complex)
    centres = range(m.n_vertices) if vertices is None else [int(v) for v in vertices]
    areas = m.face_areas
    fit_error = 0.0
    spread = 0.0
    scale = 0.0
    for v in centres:
        faces = m.vertex_faces(v)
        normal, t1, t2 = _vertex_chart(m, v)
        samples, z = _ring_samples(m, values, faces, m.vertices[v], normal, t1, t2)
        w = areas[faces]
        sqrt_w = np.sqrt(w)
        design = np.stack([np.ones_like(z), z], axis=1) * sqrt_w[:, None]
        coeffs, *_ = np.linalg.lstsq(design, samples * sqrt_w, rcond=None)
        fit_error += float(np.sum(np.abs(design @ coeffs - samples * sqrt_w) ** 2))
        mean = np.sum(w * samples) / w.sum()
        spread += float(np.sum(w * np.abs(samples - mean) ** 2))
        scale += float(np.sum(w * np.abs(samples) ** 2))
    if spread <= 1e-24 * scale:
        return 0.0
    residual = float(np.sqrt(fit_error / spread))
    logger.debug(f"Holomorphicity residual on {m!r}: {residual:.3e}")
    return residual


def face_field_from_chart(m: TriMesh, center_vertex: int, fn: Callable[[np.ndarray], np.ndarray]) -> QuadDiffField:
    """
    Sample q(z) dz^2, given in the tangent chart at ``center_vertex``, into face charts.

    Args:
        m: mesh
        center_vertex: vertex whose chart is the origin of z
        fn: vectorised complex function of the face-centroid coordinate z

    Example:
        >>> q = face_field_from_chart(mesh, top, lambda z: z ** 2)
    """
    normal, t1, t2 = _vertex_chart(m, center_vertex)
    x_axis, _ = face_frames(m)
    angles = angles_in_chart(x_axis, normal, t1, t2)
    centroids = m.vertices[m.faces].mean(axis=1)
    z = planar_coordinates(centroids, m.vertices[center_vertex], t1, t2)
    chart_values = np.asarray(fn(z), dtype=complex) * np.ones(m.n_faces)
    return QuadDiffField(from_chart(chart_values, angles), m.identity)


# === BONNET PAIRS ===

@dataclass
class BonnetPairReport:
    """
    Verdict on a pair of immersions with shared connectivity.

    ``bonnet_mates`` holds when the pair is isometric, induces the same
    mean-curvature half-density and is not congruent.
    """
    isometric: bool
    isometry_error: float
    same_mean_curvature: bool
    halfdensity_discrepancy: float
    congruent: bool
    congruence_rms: float
    distortion_max: float
    trace_max: float
    holomorphicity: float

    @property
    def bonnet_mates(self) -> bool:
        return self.isometric and self.same_mean_curvature and not self.congruent

    def to_dict(self) -> Dict:
        return {
            'isometric': bool(self.isometric),
            'isometry_error': float(self.isometry_error),
            'same_mean_curvature': bool(self.same_mean_curvature),
            'halfdensity_discrepancy': float(self.halfdensity_discrepancy),
            'congruent': bool(self.congruent),
            'congruence_rms': float(self.congruence_rms),
            'distortion_max': float(self.distortion_max),
            'trace_max': float(self.trace_max),
            'holomorphicity': float(self.holomorphicity),
            'bonnet_mates': bool(self.bonnet_mates),
        }


def bonnet_pair_check(m1: TriMesh, m2: TriMesh, iso_tol: Optional[float] = None,
                      halfdensity_tol: Optional[float] = None,
                      allow_reflection: bool = False) -> BonnetPairReport:
    """
    Decide whether two immersions of the same mesh are Bonnet mates.

    Non-isometric pairs are reported (``isometric`` false, distortion NaN)
    rather than raised.

    Raises:
        ConnectivityMismatchError: faces differ
    """
    if halfdensity_tol is None:
        halfdensity_tol = float(get_setting('bonnet', 'core.halfdensity_tol', 1e-6))
    _check_connectivity(m1, m2)

    U1 = mean_curvature_half_density(m1).values
    U2 = mean_curvature_half_density(m2).values
    discrepancy = float(np.max(np.abs(U1 - U2)) / max(np.max(np.abs(U1)), 1e-300))
    congruent, _, rms = congruence_check(m1, m2, allow_reflection)

    try:
        iso_error = check_isometry(m1, m2, iso_tol)
        isometric = True
    except IsometryViolationError as e:
        logger.info(f"Pair is not isometric: {e}")
        iso_error, isometric = e.relative_error, False

    distortion_max = trace_max = holomorphicity = float('nan')
    if isometric:
        q = shape_distortion(m1, m2, iso_tol)
        scale = m1.bounding_radius
        distortion_max = float(q.magnitude.max() * scale)
        trace_max = float(np.abs(q.trace).max() * scale)
        holomorphicity = holomorphicity_residual(m1, q)

    report = BonnetPairReport(
        isometric=isometric,
        isometry_error=float(iso_error),
        same_mean_curvature=discrepancy <= halfdensity_tol,
        halfdensity_discrepancy=discrepancy,
        congruent=bool(congruent),
        congruence_rms=float(rms),
        distortion_max=distortion_max,
        trace_max=trace_max,
        holomorphicity=holomorphicity,
    )
    logger.info(f"Bonnet pair check: mates={report.bonnet_mates}, congruent={report.congruent}, "
                f"isometric={report.isometric}")
    return report
