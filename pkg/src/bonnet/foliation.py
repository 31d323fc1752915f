"""
Bonnet Module - Foliation Indices and Umbilics

Educational Focus: The horizontal foliation of a quadratic differential q dz^2
is singular where q vanishes. Its index is read off a loop around the
singular point: the argument of q (moved into one chart) turns by 2 pi W
along the loop, and the line field it defines turns by -pi W, giving the
index -W/2. A zero of order n of a holomorphic q has index -n/2.

Convention: index(z^n dz^2) = -n/2. Umbilics of the Hopf differential on an
ellipsoid behave like conj(z) and carry index +1/2; the four of them add up
to the Euler characteristic 2.

Discrete umbilics smear over patches, so detected umbilic vertices are
clustered and each cluster is indexed on the band of faces surrounding it.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional
import logging
import sys

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

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
from src.mesh.charts import tangent_frames, face_frames, angles_in_chart, planar_coordinates, to_chart
from src.mesh.curvature import CurvatureReport, QuadDiffField


class UndefinedIndexError(ValueError):
    """The loop around a point is empty or q vanishes on it."""


def _band_faces(m: TriMesh, core: np.ndarray) -> np.ndarray:
    """Faces touching the neighbours of ``core`` without touching ``core`` itself."""
    in_core = np.zeros(m.n_vertices, dtype=bool)
    in_core[core] = True
    neighbours = np.asarray(m.adjacency[core].sum(axis=0)).reshape(-1) > 0
    neighbours &= ~in_core
    touches_core = in_core[m.faces].any(axis=1)
    touches_ring = neighbours[m.faces].any(axis=1)
    return np.nonzero(touches_ring & ~touches_core)[0]


def _loop_winding(m: TriMesh, values: np.ndarray, core: np.ndarray) -> float:
    """Total turning of arg(q) around ``core``, in units of full turns."""
    band = _band_faces(m, core)
    if band.size == 0:
        error_msg = f"No loop around {core.size} core vertices: the index is undefined"
        logger.error(error_msg)
        raise UndefinedIndexError(error_msg)
    peak = np.abs(values).max() if values.size else 0.0
    if peak == 0.0 or np.any(np.abs(values[band]) <= 1e-12 * peak):
        error_msg = f"q vanishes on the loop around vertices {core[:5].tolist()}: the index is undefined"
        logger.error(error_msg)
        raise UndefinedIndexError(error_msg)

    normal = m.vertex_normals[core].sum(axis=0)
    normal /= np.linalg.norm(normal)
    t1, t2 = tangent_frames(normal)
    t1, t2 = t1[0], t2[0]
    origin = m.vertices[core].mean(axis=0)

    x_axis, _ = face_frames(m)
    samples = to_chart(values[band], angles_in_chart(x_axis[band], normal, t1, t2))
    centroids = m.vertices[m.faces[band]].mean(axis=1)
    order = np.argsort(np.angle(planar_coordinates(centroids, origin, t1, t2)), kind='stable')
    args = np.angle(samples[order])
    steps = np.diff(np.append(args, args[0]))
    steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
    return float(steps.sum() / (2.0 * np.pi))


def _index_from_winding(turns: float, where: str) -> float:
    nearest = round(turns)
    if abs(turns - nearest) > 0.25:
        logger.warning(f"Winding {turns:.3f} around {where} is far from an integer")
    return -0.5 * nearest + 0.0


def foliation_index(m: TriMesh, q: QuadDiffField, vertex: int) -> float:
    """
    Index of the horizontal foliation of q at ``vertex``; always a half-integer.

    Args:
        m: mesh carrying q
        q: per-face quadratic differential
        vertex: centre of the loop

    Returns:
        float: -W/2 for a winding W of arg(q) around the vertex

    Raises:
        UndefinedIndexError: q vanishes on the loop

    Example:
        >>> foliation_index(mesh, face_field_from_chart(mesh, v, lambda z: z), v)
        -0.5
    """
    values = q.values if isinstance(q, QuadDiffField) else np.asarray(q, dtype=complex)
    turns = _loop_winding(m, values, np.array([int(vertex)]))
    return _index_from_winding(turns, f"vertex {vertex}")


def find_umbilics(report: CurvatureReport, tol: Optional[float] = None) -> List[int]:
    """
    Vertices where the principal curvatures nearly coincide.

    A vertex is umbilic when |k1 - k2| <= tol (|k1| + |k2| + floor), with
    floor = ``mesh.curvature.floor_ratio`` / scale so that flat regions are
    not all flagged.

    Args:
        report: curvature report of the mesh
        tol: relative tolerance (config ``bonnet.core.umbilic_tol``)
    """
    if tol is None:
        tol = float(get_setting('bonnet', 'core.umbilic_tol', 0.1))
    floor = float(get_setting('mesh', 'curvature.floor_ratio', 1e-3)) / report.scale
    k1, k2 = report.kappa1, report.kappa2
    mask = np.abs(k1 - k2) <= tol * (np.abs(k1) + np.abs(k2) + floor)
    umbilics = np.nonzero(mask)[0].tolist()
    logger.info(f"Found {len(umbilics)} umbilic vertices (tol {tol})")
    return umbilics


@dataclass
class UmbilicCluster:
    """Connected patch of umbilic vertices; ``index`` is None when no loop surrounds it."""
    vertices: List[int]
    index: Optional[float]

    def to_dict(self) -> Dict:
        return {'vertices': [int(v) for v in self.vertices], 'index': self.index}


@dataclass
class UmbilicSummary:
    """Clusters with their index sum, compared against the Euler characteristic."""
    clusters: List[UmbilicCluster]
    euler_characteristic: int
    index_sum: float = field(init=False)

    def __post_init__(self):
        self.index_sum = float(sum(c.index for c in self.clusters if c.index is not None))

    @property
    def undefined(self) -> int:
        return sum(1 for c in self.clusters if c.index is None)

    @property
    def consistent(self) -> bool:
        """Poincare-Hopf: index sum equals chi when every index is defined."""
        return self.undefined == 0 and self.index_sum == float(self.euler_characteristic)

    def to_dict(self) -> Dict:
        return {
            'clusters': [c.to_dict() for c in self.clusters],
            'cluster_count': len(self.clusters),
            'index_sum': self.index_sum,
            'euler_characteristic': int(self.euler_characteristic),
            'consistent': bool(self.consistent),
        }


def _cluster_cores(m: TriMesh, umbilics: np.ndarray) -> List[np.ndarray]:
    """Group umbilics within graph distance 2 and fill in the vertices bridging them."""
    A = m.adjacency
    sub = A[umbilics][:, umbilics]
    through = A[:, umbilics]
    linked = sub + (through.T @ through)
    n_clusters, labels = csgraph.connected_components(sp.csr_matrix(linked), directed=False)
    members = [umbilics[labels == c] for c in range(n_clusters)]

    cores = []
    for group in members:
        touching = np.asarray(A[:, group].sum(axis=1)).reshape(-1)
        bridges = np.nonzero(touching >= 2)[0]
        cores.append(np.union1d(group, bridges))
    cores.sort(key=lambda c: int(c[0]))
    return cores


def umbilic_clusters(m: TriMesh, q: QuadDiffField, umbilics: Iterable[int]) -> UmbilicSummary:
    """
    Cluster umbilic vertices and index each cluster on its surrounding loop.

    Args:
        m: mesh
        q: Hopf differential (or any face quadratic differential) of m
        umbilics: vertex indices from ``find_umbilics``

    Returns:
        UmbilicSummary: clusters, index sum and the Poincare-Hopf verdict
    """
    umbilics = np.unique(np.asarray(list(umbilics), dtype=np.int64))
    values = q.values if isinstance(q, QuadDiffField) else np.asarray(q, dtype=complex)
    clusters = []
    if umbilics.size:
        for core in _cluster_cores(m, umbilics):
            try:
                turns = _loop_winding(m, values, core)
                index = _index_from_winding(turns, f"cluster at vertex {int(core[0])}")
            except UndefinedIndexError as e:
                logger.warning(f"Cluster of {core.size} vertices has no index: {e}")
                index = None
            clusters.append(UmbilicCluster(np.intersect1d(core, umbilics).tolist(), index))
    summary = UmbilicSummary(clusters, m.euler_characteristic)
    logger.info(f"Umbilic clusters on {m!r}: {len(clusters)} clusters, index sum {summary.index_sum}, "
                f"chi {m.euler_characteristic}")
    return summary
