"""
Integrate Module - Spinor One-Forms and Their Least-Squares Integration

Educational Focus: A spinor psi turns every edge vector e_ij into a new edge
vector conj(psi) e psi. With linear interpolation of psi along the edge the
edge integral becomes

    omega(ij) = 1/3 conj(psi_i) e psi_i
              + 1/6 (conj(psi_i) e psi_j + conj(psi_j) e psi_i)
              + 1/3 conj(psi_j) e psi_j

which is exact for constant spinors. When psi solves the Dirac equation the
one-form is closed and integrates to new vertex positions; otherwise the
least-squares positions are returned together with how far omega was from
being exact.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple, Union
import logging
import sys

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse import csgraph

project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

try:
    from src.utils.logger_factory import get_component_logger
    from src.utils.settings import get_setting
    logger = get_component_logger('integrate')
except ImportError:
    logger = logging.getLogger(__name__)

    def get_setting(section, path, default):
        return default

from src.quatnum.quaternion import qmul, qconj, imag
from src.mesh.trimesh import TriMesh
from src.mesh.charts import face_frames
from src.dirac.dirac_operator import SpinorField


class SingularSystemError(RuntimeError):
    """The integration system has more than the translation null space."""


class OneFormMeshMismatchError(ValueError):
    """A one-form (or a mesh pair) does not share the expected mesh."""


@dataclass(frozen=True)
class EdgeOneForm:
    """
    One imaginary quaternion per undirected edge, oriented from the lower
    to the higher vertex index (``TriMesh.edges``).

    Storing one value per edge makes antisymmetry exact:
    omega(ji) is read as -omega(ij).
    """
    values: np.ndarray
    mesh_id: str

    def __post_init__(self):
        object.__setattr__(self, 'values', np.asarray(self.values, dtype=float).reshape(-1, 4))

    def __len__(self) -> int:
        return self.values.shape[0]

    def check_mesh(self, m: TriMesh):
        if self.mesh_id != m.identity or len(self) != m.n_edges:
            error_msg = f"One-form of mesh {self.mesh_id} ({len(self)} edges) used on {m!r} ({m.identity})"
            logger.error(error_msg)
            raise OneFormMeshMismatchError(error_msg)

    def halfedge_values(self, m: TriMesh) -> np.ndarray:
        """(3F, 4) value along every halfedge, negated against the stored orientation."""
        self.check_mesh(m)
        sign = np.where(m.he_tail < m.he_head, 1.0, -1.0)
        return self.values[m.he_edge] * sign[:, None]

    @property
    def vectors(self) -> np.ndarray:
        """Imaginary parts as (E, 3) vectors."""
        return self.values[:, 1:]


def exact_one_form(m: TriMesh) -> EdgeOneForm:
    """d of the vertex positions: omega(ij) = x_j - x_i."""
    i, j = m.edges[:, 0], m.edges[:, 1]
    return EdgeOneForm(imag(m.vertices[j] - m.vertices[i]), m.identity)


def spinor_one_form(m: TriMesh, psi: Union[SpinorField, np.ndarray]) -> EdgeOneForm:
    """
    Edge integrals of conj(psi) dF psi.

    Args:
        m: the mesh psi lives on
        psi: SpinorField (checked against ``m``) or an (n, 4) array

    Raises:
        SpinorMeshMismatchError: psi was solved on another mesh

    Example:
        >>> ones = np.tile([1.0, 0, 0, 0], (m.n_vertices, 1))
        >>> np.allclose(spinor_one_form(m, ones).vectors, exact_one_form(m).vectors)
        True
    """
    if isinstance(psi, SpinorField):
        psi.check_mesh(m)
        values = psi.values
    else:
        values = np.asarray(psi, dtype=float)
    i, j = m.edges[:, 0], m.edges[:, 1]
    e = imag(m.vertices[j] - m.vertices[i])
    pi, pj = values[i], values[j]
    ci, cj = qconj(pi), qconj(pj)
    omega = (qmul(ci, qmul(e, pi)) / 3.0
             + (qmul(ci, qmul(e, pj)) + qmul(cj, qmul(e, pi))) / 6.0
             + qmul(cj, qmul(e, pj)) / 3.0)
    return EdgeOneForm(omega, m.identity)


# === INTEGRATION ===

def integration_weights(m: TriMesh) -> np.ndarray:
    """Cotan weights clamped below at a fraction of their mean magnitude (config ``integrate.core.weight_floor_ratio``)."""
    w = m.cotan_weights
    floor = float(get_setting('integrate', 'core.weight_floor_ratio', 1e-6)) * float(np.abs(w).mean())
    return np.maximum(w, floor)


def _barycentric_weights(m: TriMesh, positions: np.ndarray) -> np.ndarray:
    p0, p1, p2 = (positions[m.faces[:, k]] for k in range(3))
    areas = 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)
    weights = np.bincount(m.faces.reshape(-1), weights=np.repeat(areas / 3.0, 3), minlength=m.n_vertices)
    return weights if weights.sum() > 0.0 else np.ones(m.n_vertices)


def integrate_one_form(m: TriMesh, omega: EdgeOneForm) -> Tuple[np.ndarray, float]:
    """
    Positions F minimizing sum_e w_e |F_j - F_i - omega(ij)|^2.

    The translation gauge is fixed by putting the area-weighted centroid of
    the result at the origin.

    Args:
        m: mesh supplying connectivity and cotan weights
        omega: one-form on ``m``

    Returns:
        Tuple[np.ndarray, float]: (n, 3) positions and the weighted RMS of
        F_j - F_i - omega(ij) (length units). Positions are returned as an
        array because a degenerate one-form (omega = 0) has no valid mesh.

    Raises:
        OneFormMeshMismatchError: omega lives on another mesh
        SingularSystemError: the mesh is disconnected
    """
    omega.check_mesh(m)
    n_components, _ = csgraph.connected_components(m.adjacency, directed=False)
    if n_components != 1:
        error_msg = f"Integration system is singular: mesh has {n_components} connected components"
        logger.error(error_msg)
        raise SingularSystemError(error_msg)

    logger.debug(f"Integrating one-form on {m!r}")
    w = integration_weights(m)
    L = m.cotan_laplacian(w).tocsc()
    i, j = m.edges[:, 0], m.edges[:, 1]
    flux = w[:, None] * omega.vectors
    rhs = np.zeros((m.n_vertices, 3))
    np.add.at(rhs, i, -flux)
    np.add.at(rhs, j, flux)

    # pin vertex 0; the reduced Laplacian of a connected mesh is positive definite
    positions = np.zeros((m.n_vertices, 3))
    positions[1:] = spla.splu(L[1:, 1:].tocsc()).solve(rhs[1:])
    weights = _barycentric_weights(m, positions)
    positions -= (positions * weights[:, None]).sum(axis=0) / weights.sum()

    r = positions[j] - positions[i] - omega.vectors
    residual = float(np.sqrt(np.sum(w * np.sum(r * r, axis=1)) / w.sum()))
    logger.info(f"One-form integrated on {m!r}: exactness residual {residual:.3e}")
    return positions, residual


# === DIAGNOSTICS ===

def closedness_residual(m: TriMesh, omega: EdgeOneForm) -> np.ndarray:
    """Per-face |omega(ab) + omega(bc) + omega(ca)|, zero for a closed one-form."""
    around = omega.halfedge_values(m).reshape(-1, 3, 4).sum(axis=1)
    return np.linalg.norm(around[:, 1:], axis=1)


def homology_generators(m: TriMesh) -> Tuple[np.ndarray, np.ndarray, List[int]]:
    """
    Tree-cotree decomposition.

    Returns:
        Tuple: BFS order of the primal spanning tree, predecessor per vertex,
        and the 2g edges in neither the primal tree nor the dual tree
    """
    order, pred = csgraph.breadth_first_order(m.adjacency, 0, directed=False, return_predecessors=True)
    n = m.n_vertices
    keys = m.edges[:, 0] * n + m.edges[:, 1]
    child = order[1:]
    parent = pred[child]
    tree_keys = np.minimum(parent, child) * n + np.maximum(parent, child)
    in_tree = np.zeros(m.n_edges, dtype=bool)
    in_tree[np.searchsorted(keys, tree_keys)] = True

    _, rep = np.unique(m.he_edge, return_index=True)
    f1, f2 = m.he_face[rep], m.he_face[m.he_twin[rep]]
    cotree = np.nonzero(~in_tree)[0]
    dual = sp.csr_matrix((np.ones(2 * cotree.size), (np.concatenate([f1[cotree], f2[cotree]]),
                                                      np.concatenate([f2[cotree], f1[cotree]]))),
                         shape=(m.n_faces, m.n_faces))
    pair_edge: Dict[Tuple[int, int], int] = {}
    for e in cotree:
        pair_edge.setdefault((min(f1[e], f2[e]), max(f1[e], f2[e])), int(e))
    face_order, face_pred = csgraph.breadth_first_order(dual, 0, directed=False, return_predecessors=True)
    in_dual = set()
    for f in face_order[1:]:
        g = face_pred[f]
        in_dual.add(pair_edge[(min(f, g), max(f, g))])
    generators = [int(e) for e in cotree if int(e) not in in_dual]
    if len(generators) != 2 * m.genus:
        logger.warning(f"Tree-cotree found {len(generators)} generators, expected {2 * m.genus}")
    return order, pred, generators


def period_residuals(m: TriMesh, omega: EdgeOneForm) -> List[np.ndarray]:
    """
    Sum of omega around each homology generator loop (2g loops, empty on a sphere).

    Each loop closes one leftover edge through the primal spanning tree. A
    nonzero period means omega has a harmonic part the least-squares
    integration discards.
    """
    omega.check_mesh(m)
    order, pred, generators = homology_generators(m)
    n = m.n_vertices
    keys = m.edges[:, 0] * n + m.edges[:, 1]

    def signed(a: int, b: int) -> np.ndarray:
        value = omega.vectors[np.searchsorted(keys, min(a, b) * n + max(a, b))]
        return value if a < b else -value

    potential = np.zeros((n, 3))
    for v in order[1:]:
        potential[v] = potential[pred[v]] + signed(int(pred[v]), int(v))
    periods = []
    for e in generators:
        a, b = int(m.edges[e, 0]), int(m.edges[e, 1])
        periods.append(potential[a] + omega.vectors[e] - potential[b])
    return periods


def quasi_conformal_distortion(m_old: TriMesh, m_new: TriMesh) -> np.ndarray:
    """
    Per-face ratio sigma1 / sigma2 of the linear map between corresponding triangles.

    1 for a similarity; larger values measure the conformal defect.

    Raises:
        OneFormMeshMismatchError: the meshes do not share connectivity
    """
    if m_old.faces.shape != m_new.faces.shape or not np.array_equal(m_old.faces, m_new.faces):
        error_msg = f"Quasi-conformal distortion needs shared connectivity: {m_old!r} vs {m_new!r}"
        logger.error(error_msg)
        raise OneFormMeshMismatchError(error_msg)

    def local_edges(m: TriMesh) -> np.ndarray:
        x_axis, y_axis = face_frames(m)
        p0, p1, p2 = (m.vertices[m.faces[:, k]] for k in range(3))
        cols = []
        for e in (p1 - p0, p2 - p0):
            cols.append(np.stack([np.sum(e * x_axis, axis=1), np.sum(e * y_axis, axis=1)], axis=1))
        return np.stack(cols, axis=2)

    J = local_edges(m_new) @ np.linalg.inv(local_edges(m_old))
    sigma = np.linalg.svd(J, compute_uv=False)
    return sigma[:, 0] / sigma[:, 1]
