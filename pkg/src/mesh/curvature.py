"""
Mesh Module - Discrete Curvature Measurements

Educational Focus: Two independent mean-curvature estimators are provided so
they can check each other:

- cotan estimator: |sum_j w_ij (x_i - x_j)| / (2 A_i), sign from the normal
- dihedral estimator: integrated mean curvature theta_e |e| / 2 per edge,
  spread over faces and then vertices

The mean-curvature half-density U = H sqrt(A) is scale invariant: H scales
as 1/s and sqrt(A) as s.

Sign convention: H > 0 on a sphere with outward normals. Shape operators are
the differential of the Gauss map, dN = S dx, so principal curvatures of a
sphere of radius r are +1/r.

The Hopf differential is stored per face as q = p - i s, where
[[p, s], [s, -p]] is the trace-free part of the face shape operator written in
the face chart; |q| = |k1 - k2| / 2.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional
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

from src.mesh.trimesh import TriMesh, MeshError
from src.mesh.charts import tangent_frames, face_frames


class RankDeficientFitError(MeshError):
    """Too few (or collinear) neighbours to fit a local quadratic."""


@dataclass(frozen=True)
class HalfDensityField:
    """
    One real sample per vertex of a half-density (e.g. U = H sqrt(A)).

    Attributes:
        values: (n,) finite samples
        mesh_id: identity token of the mesh the samples live on
    """
    values: np.ndarray
    mesh_id: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(values)):
            error_msg = "HalfDensityField samples must be finite"
            logger.error(error_msg)
            raise ValueError(error_msg)
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return self.values.shape[0]

    def with_values(self, values) -> 'HalfDensityField':
        return HalfDensityField(values, self.mesh_id)


@dataclass
class CurvatureReport:
    """
    Per-vertex curvature estimates with their internal consistency residuals.

    Attributes:
        H: cotan mean curvature (1/length)
        K: angle-defect Gauss curvature, defect / A (1/length^2)
        kappa1, kappa2: principal curvatures from the quadratic fit, kappa1 >= kappa2
        area: barycentric dual areas
        scale: bounding radius of the mesh (length)
        product_residual: |kappa1 kappa2 - K|
        mean_residual: |(kappa1 + kappa2) / 2 - H|
    """
    H: np.ndarray
    K: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    area: np.ndarray
    scale: float
    product_residual: np.ndarray = field(init=False)
    mean_residual: np.ndarray = field(init=False)

    def __post_init__(self):
        self.product_residual = np.abs(self.kappa1 * self.kappa2 - self.K)
        self.mean_residual = np.abs(0.5 * (self.kappa1 + self.kappa2) - self.H)

    def summary(self) -> Dict[str, float]:
        """Scale-free RMS residuals (curvatures multiplied by the mesh scale)."""
        w = self.area / self.area.sum()
        return {
            'product_rms': float(np.sqrt(np.sum(w * self.product_residual ** 2)) * self.scale ** 2),
            'mean_rms': float(np.sqrt(np.sum(w * self.mean_residual ** 2)) * self.scale),
            'kappa1_max': float(self.kappa1.max()),
            'kappa2_min': float(self.kappa2.min()),
        }


@dataclass(frozen=True)
class QuadDiffField:
    """
    Per-face complex value of a quadratic differential q dz^2 in the face chart.

    Attributes:
        values: (F,) complex, in the chart of ``charts.face_frames``
        mesh_id: identity token of the mesh
        trace: optional (F,) trace of the underlying symmetric form
    """
    values: np.ndarray
    mesh_id: str
    trace: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, 'values', np.asarray(self.values, dtype=complex).reshape(-1))

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def __len__(self) -> int:
        return self.values.shape[0]


# === MEAN CURVATURE ===

def mean_curvature_normals(m: TriMesh) -> np.ndarray:
    """Integrated mean-curvature normal per vertex, sum_j w_ij (x_i - x_j)."""
    return m.cotan_laplacian() @ m.vertices


def cotan_mean_curvature(m: TriMesh) -> np.ndarray:
    """Signed cotan mean curvature H_i, positive where the surface bends away from its normal."""
    hn = mean_curvature_normals(m)
    sign = np.where(np.sum(hn * m.vertex_normals, axis=1) >= 0.0, 1.0, -1.0)
    return sign * np.linalg.norm(hn, axis=1) / (2.0 * m.vertex_areas)


def mean_curvature_half_density(m: TriMesh) -> HalfDensityField:
    """
    U_i = H_i sqrt(A_i) from the cotan estimator and barycentric areas.

    Example:
        >>> U = mean_curvature_half_density(icosphere(3))
        >>> np.allclose(U.values, np.sqrt(icosphere(3).vertex_areas), rtol=0.05)
        True
    """
    H = cotan_mean_curvature(m)
    return HalfDensityField(H * np.sqrt(m.vertex_areas), m.identity)


def dihedral_angles(m: TriMesh) -> np.ndarray:
    """
    Signed dihedral angle per undirected edge, positive where the surface is convex.

    theta_e = atan2((n1 x n2) . e_hat, n1 . n2) with e_hat the edge direction
    as seen from its first face.
    """
    _, rep = np.unique(m.he_edge, return_index=True)
    f1 = m.he_face[rep]
    f2 = m.he_face[m.he_twin[rep]]
    e_hat = m.halfedge_vectors[rep] / m.edge_lengths[:, None]
    n1, n2 = m.face_normals[f1], m.face_normals[f2]
    return np.arctan2(np.sum(np.cross(n1, n2) * e_hat, axis=1), np.sum(n1 * n2, axis=1))


def dihedral_face_mean_curvature(m: TriMesh) -> np.ndarray:
    """Face mean curvature: half of every edge's integrated H theta|e|/2, over the face area."""
    integrated = dihedral_angles(m) * m.edge_lengths
    per_face = integrated[m.he_edge].reshape(-1, 3).sum(axis=1)
    return per_face / (4.0 * m.face_areas)


def dihedral_half_density(m: TriMesh) -> HalfDensityField:
    """
    Second mean-curvature half-density estimate built from dihedral angles.

    Educational Note: This estimator shares no formula with the cotan one,
    which makes it a useful cross-check and the natural potential of the
    face-based Dirac operator.
    """
    H_face = dihedral_face_mean_curvature(m)
    weighted = np.bincount(m.faces.reshape(-1), weights=np.repeat(H_face * m.face_areas, 3),
                           minlength=m.n_vertices)
    H_vertex = weighted / (3.0 * m.vertex_areas)
    return HalfDensityField(H_vertex * np.sqrt(m.vertex_areas), m.identity)


def normalized_sqrt_area(m: TriMesh) -> np.ndarray:
    """sqrt(A_i) after rescaling the mesh to the area of the unit sphere."""
    return np.sqrt(m.vertex_areas * (4.0 * np.pi / m.total_area))


# === GAUSS CURVATURE ===

def angle_defects(m: TriMesh) -> np.ndarray:
    """Integrated Gauss curvature 2 pi - sum of corner angles, per vertex."""
    sums = np.bincount(m.faces.reshape(-1), weights=m.corner_angles.reshape(-1), minlength=m.n_vertices)
    return 2.0 * np.pi - sums


def gauss_bonnet_defect(m: TriMesh) -> float:
    """sum of angle defects - 2 pi chi; zero up to rounding on every closed mesh."""
    return float(angle_defects(m).sum() - 2.0 * np.pi * m.euler_characteristic)


# === PRINCIPAL CURVATURES ===

def _fit_neighbourhood(m: TriMesh, vertex: int) -> List[int]:
    ring = m.one_ring(vertex)
    if len(ring) >= 5:
        return ring
    second = set(ring)
    for v in ring:
        second.update(m.one_ring(v))
    second.discard(vertex)
    return sorted(second)


def _quadratic_fit(m: TriMesh, vertex: int, normal: np.ndarray, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    """
    Fit h(u, v) = (a u^2 + 2 b u v + c v^2) / 2 (+ d u + e v) over the neighbourhood.

    Returns:
        np.ndarray: the 2x2 Hessian [[a, b], [b, c]]
    """
    neighbours = _fit_neighbourhood(m, vertex)
    d = m.vertices[neighbours] - m.vertices[vertex]
    u, v, h = d @ t1, d @ t2, d @ normal
    columns = [0.5 * u * u, u * v, 0.5 * v * v]
    if len(neighbours) >= 5:
        columns += [u, v]
    design = np.stack(columns, axis=1)
    coeffs, _, rank, _ = np.linalg.lstsq(design, h, rcond=None)
    if rank < design.shape[1]:
        error = RankDeficientFitError(
            f"quadratic fit at vertex {vertex} is rank deficient ({rank} < {design.shape[1]})"
        )
        logger.error(str(error))
        raise error
    a, b, c = coeffs[:3]
    return np.array([[a, b], [b, c]])


def principal_curvatures(m: TriMesh) -> np.ndarray:
    """
    (n, 2) principal curvatures, column 0 >= column 1, from local quadratic fits.

    Educational Note: The surface bends away from an outward normal on a
    convex shape, so the fitted height has negative Hessian there; the shape
    operator is minus the Hessian.
    """
    normals = m.vertex_normals
    t1s, t2s = tangent_frames(normals)
    kappas = np.empty((m.n_vertices, 2))
    for i in range(m.n_vertices):
        hessian = _quadratic_fit(m, i, normals[i], t1s[i], t2s[i])
        kappas[i] = np.sort(np.linalg.eigvalsh(-hessian))[::-1]
    return kappas


def curvature_report(m: TriMesh) -> CurvatureReport:
    """
    Per-vertex curvature estimates with consistency residuals.

    Raises:
        RankDeficientFitError: a vertex neighbourhood cannot support the fit
    """
    kappas = principal_curvatures(m)
    report = CurvatureReport(
        H=cotan_mean_curvature(m),
        K=angle_defects(m) / m.vertex_areas,
        kappa1=kappas[:, 0],
        kappa2=kappas[:, 1],
        area=m.vertex_areas,
        scale=m.bounding_radius
    )
    logger.info(f"Curvature report for {m!r}: {report.summary()}")
    return report


# === FACE SHAPE OPERATORS AND HOPF DIFFERENTIAL ===

def face_shape_operators(m: TriMesh, normals: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Per-face symmetric shape operator in the face chart, as (F, 3) = (s11, s12, s22).

    Educational Note: Across each edge the change of vertex normal satisfies
    dN = S dx. Three edges give six equations for three unknowns, solved in
    the least-squares sense face by face.
    """
    N = m.vertex_normals if normals is None else normals
    x_axis, y_axis = face_frames(m)
    F = m.n_faces
    AtA = np.zeros((F, 3, 3))
    Atb = np.zeros((F, 3))
    for k in range(3):
        a, b = m.faces[:, (k + 1) % 3], m.faces[:, (k + 2) % 3]
        e = m.vertices[b] - m.vertices[a]
        dn = N[b] - N[a]
        ex, ey = np.sum(e * x_axis, axis=1), np.sum(e * y_axis, axis=1)
        nx, ny = np.sum(dn * x_axis, axis=1), np.sum(dn * y_axis, axis=1)
        rows = [(np.stack([ex, ey, np.zeros(F)], axis=1), nx),
                (np.stack([np.zeros(F), ex, ey], axis=1), ny)]
        for row, rhs in rows:
            AtA += row[:, :, None] * row[:, None, :]
            Atb += row * rhs[:, None]
    return np.linalg.solve(AtA, Atb[:, :, None])[:, :, 0]


def hopf_differential(m: TriMesh, normals: Optional[np.ndarray] = None) -> QuadDiffField:
    """
    Trace-free part of the face second fundamental form as q = p - i s.

    |q_f| is independent of the chart and approximately |k1 - k2| / 2.

    Example:
        >>> q = hopf_differential(icosphere(4))
        >>> q.magnitude.max() < 0.05
        True
    """
    S = face_shape_operators(m, normals)
    p = 0.5 * (S[:, 0] - S[:, 2])
    s = S[:, 1]
    field_values = p - 1j * s
    logger.debug(f"Hopf differential on {m!r}: max |q| = {np.abs(field_values).max():.3e}")
    return QuadDiffField(field_values, m.identity, trace=S[:, 0] + S[:, 2])
