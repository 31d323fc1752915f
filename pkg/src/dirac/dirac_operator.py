"""
Dirac Module - Quaternionic Dirac Operator with a Half-Density Potential

Educational Focus: A spinor psi (one quaternion per vertex) generates the
half-density U when (D - U) psi = 0. On a triangle mesh the extrinsic Dirac
operator is constant per face:

    (D psi)_f = -1/(2 A_f) * sum_k e_k psi_k

with e_k the edge opposite corner k, oriented counter-clockwise, acting by
left multiplication. This operator annihilates constant spinors, so it only
sees the *change* of curvature. The surface's own mean curvature is supplied
by the dihedral half-density, and the potential enters through

    rho_i = (U_i - U_own_i) / sqrt(A_i)      (curvature units)

averaged onto faces. Instead of the first-order operator itself we assemble
its hermitian normal form

    E = sum_f A_f (D_f - rho_f avg_f)^* (D_f - rho_f avg_f)

whose kernel is the kernel of D - U. Per face and ordered corner pair (i, j):

    E_ij += -e_i e_j / (4 A_f) + rho_f (e_j - e_i) / 6 + A_f rho_f^2 / 9

Spinors are solved in the normalized mass W = A / sum(A). An eigenvalue mu of
E is a squared Dirac eigenvalue times the total area, so the Dirac eigenvalue
is reported as the magnitude

    |lambda| = sqrt(mu / 4 pi)

of D - U after scaling the mesh to the area of the unit sphere. It is scale
invariant; the constant spinor of the round sphere with potential own + c has
|lambda| = c. The sign of lambda does not survive the normal form.

Because D annihilates constants, curvature is read back from D acting on the
Gauss map instead: D N = -2 H N face by face.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union
import logging
import sys

import numpy as np

project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

try:
    from src.utils.logger_factory import get_component_logger
    from src.utils.settings import get_setting
    logger = get_component_logger('dirac')
except ImportError:
    logger = logging.getLogger(__name__)

    def get_setting(section, path, default):
        return default

from src.quatnum.quaternion import qmul, qconj, qnorm2, imag
from src.quatnum.sparse_operator import QuatSparseOperator, DimensionMismatchError
from src.quatnum.eigensolver import EigenPair, low_spectrum
from src.mesh.trimesh import TriMesh
from src.mesh.curvature import HalfDensityField, dihedral_half_density


class SpinorMeshMismatchError(ValueError):
    """A spinor (or field) was used with a mesh it was not computed on."""


@dataclass(frozen=True)
class SpinorField:
    """
    One quaternion per vertex, tied to the mesh it was solved on.

    Attributes:
        values: (n, 4) spinor samples, normalized so sum_i A_i |psi_i|^2 = sum_i A_i
        mesh_id: identity token of the mesh
    """
    values: np.ndarray
    mesh_id: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != 4:
            error_msg = f"SpinorField values must have shape (n, 4), got {values.shape}"
            logger.error(error_msg)
            raise DimensionMismatchError(error_msg)
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def magnitudes(self) -> np.ndarray:
        return np.sqrt(qnorm2(self.values))

    @property
    def immersive(self) -> bool:
        """True when min |psi| >= ratio * mean |psi| (config ``dirac.core.immersive_ratio``)."""
        ratio = float(get_setting('dirac', 'core.immersive_ratio', 1e-6))
        mags = self.magnitudes
        return bool(mags.min() >= ratio * mags.mean())

    @property
    def conformal_factor(self) -> np.ndarray:
        """|psi_i|^2: the factor by which the spinor stretches edge lengths at vertex i."""
        return qnorm2(self.values)

    def right_mul(self, alpha) -> 'SpinorField':
        return SpinorField(qmul(self.values, np.asarray(alpha, dtype=float)), self.mesh_id)

    def check_mesh(self, m: TriMesh):
        if self.mesh_id != m.identity or len(self) != m.n_vertices:
            error_msg = f"Spinor of mesh {self.mesh_id} ({len(self)} values) used on {m!r} ({m.identity})"
            logger.error(error_msg)
            raise SpinorMeshMismatchError(error_msg)


@dataclass(frozen=True)
class DiracAssembly:
    """
    Assembled Dirac problem on one mesh.

    Attributes:
        mesh: the TriMesh the operator lives on
        operator: hermitian normal form E of D - U
        mass: normalized vertex areas A / sum(A)
        potential: the half-density U baked into the operator
        own: the mesh's own (dihedral) mean-curvature half-density
        rho_vertex: (U - own) / sqrt(A), curvature change per vertex
        rho_face: rho averaged over each face's corners
    """
    mesh: TriMesh
    operator: QuatSparseOperator
    mass: np.ndarray
    potential: HalfDensityField
    own: HalfDensityField
    rho_vertex: np.ndarray
    rho_face: np.ndarray

    @property
    def n(self) -> int:
        return self.operator.n


@dataclass
class DiracSolution:
    """
    Smallest-magnitude eigenpair, gauge fixed.

    ``eigenvalue`` is |lambda| of D - U in the unit-sphere area gauge;
    ``normal_value`` is the raw eigenvalue mu of the normal form E, which
    ``residual`` refers to: ||W^-1 E psi - mu psi||_W <= tol ||psi||_W.
    """
    spinor: SpinorField
    eigenvalue: float
    residual: float
    imag_part: float
    normal_value: float

    def __iter__(self):
        # allows ``spinor, eigenvalue, residual = solve_dirac(asm)``
        return iter((self.spinor, self.eigenvalue, self.residual))

    @property
    def immersive(self) -> bool:
        return self.spinor.immersive


# === ASSEMBLY ===

def _opposite_edges(m: TriMesh) -> np.ndarray:
    """(F, 3, 4) edge opposite each corner, counter-clockwise, as imaginary quaternions."""
    x, f = m.vertices, m.faces
    return imag(np.stack([x[f[:, (k + 2) % 3]] - x[f[:, (k + 1) % 3]] for k in range(3)], axis=1))


def _as_half_density(m: TriMesh, U: Union[HalfDensityField, np.ndarray, float]) -> HalfDensityField:
    if isinstance(U, HalfDensityField):
        field = U
    else:
        values = np.asarray(U, dtype=float)
        if values.ndim == 0:
            values = np.full(m.n_vertices, float(values))
        field = HalfDensityField(values, m.identity)
    if len(field) != m.n_vertices:
        error_msg = f"Potential has {len(field)} samples for a mesh with {m.n_vertices} vertices"
        logger.error(error_msg)
        raise DimensionMismatchError(error_msg)
    return field


def _normal_form(m: TriMesh, rho_face: np.ndarray) -> QuatSparseOperator:
    e = _opposite_edges(m)
    A = m.face_areas
    rows, cols, values = [], [], []
    for i in range(3):
        for j in range(3):
            value = qmul(e[:, i], e[:, j]) * (-0.25 / A)[:, None]
            value += (rho_face / 6.0)[:, None] * (e[:, j] - e[:, i])
            value[:, 0] += A * rho_face ** 2 / 9.0
            rows.append(m.faces[:, i])
            cols.append(m.faces[:, j])
            values.append(value)
    return QuatSparseOperator.hermitian(m.n_vertices, np.concatenate(rows), np.concatenate(cols),
                                        np.concatenate(values))


def assemble_dirac(m: TriMesh, U: Union[HalfDensityField, np.ndarray, float]) -> DiracAssembly:
    """
    Assemble the normal form of D - U on ``m``.

    Args:
        m: closed TriMesh
        U: target half-density per vertex (a HalfDensityField, an array or a constant)

    Returns:
        DiracAssembly: hermitian operator, mass and potentials

    Raises:
        DimensionMismatchError: U does not have one sample per vertex

    Example:
        >>> sphere = icosphere(3)
        >>> asm = assemble_dirac(sphere, dihedral_half_density(sphere))
        >>> asm.operator.is_self_adjoint
        True
    """
    U = _as_half_density(m, U)
    logger.debug(f"Assembling Dirac operator on {m!r}")
    own = dihedral_half_density(m)
    rho_vertex = (U.values - own.values) / np.sqrt(m.vertex_areas)
    rho_face = rho_vertex[m.faces].mean(axis=1)
    operator = _normal_form(m, rho_face)
    mass = m.vertex_areas / m.total_area
    logger.info(f"Dirac operator on {m!r}: nnz={operator.nnz}, max|rho|={np.abs(rho_vertex).max():.3e}")
    return DiracAssembly(m, operator, mass, U, own, rho_vertex, rho_face)


def _face_dirac(m: TriMesh, values: np.ndarray) -> np.ndarray:
    """(D psi)_f = -1/(2 A_f) sum_k e_k psi_k for (n, 4) vertex values."""
    return qmul(_opposite_edges(m), values[m.faces]).sum(axis=1) * (-0.5 / m.face_areas)[:, None]


def _lump(m: TriMesh, face_values: np.ndarray) -> np.ndarray:
    """Spread face values to corners with weight A_f / 3, per unit vertex area."""
    weighted = face_values * (m.face_areas / 3.0).reshape((-1,) + (1,) * (face_values.ndim - 1))
    lumped = np.zeros((m.n_vertices,) + face_values.shape[1:])
    for k in range(3):
        np.add.at(lumped, m.faces[:, k], weighted)
    return lumped / m.vertex_areas.reshape((-1,) + (1,) * (face_values.ndim - 1))


def face_dirac_defect(asm: DiracAssembly, psi: Union[SpinorField, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-face (D - U) psi and the face average of psi.

    The normal form is sum_f A_f |r_f|^2 for these face values r_f, and the
    one-form of psi fails to close on face f by exactly 2 A_f |Im(conj(avg_f) r_f)|.

    Returns:
        Tuple[np.ndarray, np.ndarray]: (F, 4) defects r_f and (F, 4) averages

    Raises:
        SpinorMeshMismatchError: psi was solved on another mesh
        DimensionMismatchError: psi does not have one quaternion per vertex
    """
    m = asm.mesh
    if isinstance(psi, SpinorField):
        psi.check_mesh(m)
        values = psi.values
    else:
        values = np.asarray(psi, dtype=float)
    if values.shape != (m.n_vertices, 4):
        error_msg = f"Spinor of shape {values.shape} applied on {m!r}"
        logger.error(error_msg)
        raise DimensionMismatchError(error_msg)
    average = values[m.faces].mean(axis=1)
    return _face_dirac(m, values) - asm.rho_face[:, None] * average, average


def apply_dirac(asm: DiracAssembly, psi: Union[SpinorField, np.ndarray]) -> np.ndarray:
    """
    First-order (D - U) psi, evaluated per face and lumped to vertices.

    Each face value -1/(2 A_f) sum_k e_k psi_k - rho_f avg_f(psi) is spread to
    its corners with weight A_f / 3 and divided by the vertex area.

    Returns:
        np.ndarray: (n, 4) values in curvature units
    """
    defect, _ = face_dirac_defect(asm, psi)
    return _lump(asm.mesh, defect)


def read_potential(asm: DiracAssembly) -> HalfDensityField:
    """
    Mean-curvature half-density read off the Dirac operator of the mesh.

    D annihilates the constant spinor, so the curvature is taken from its
    action on the Gauss map: per face D N = -2 H N, and H_f = -(D N)_f . N_f / 2
    is lumped to vertices and put in the sqrt(A) gauge. Exact on meshes
    inscribed in a sphere; independent of the potential baked into ``asm``.
    """
    m = asm.mesh
    dn = _face_dirac(m, imag(m.vertex_normals))
    h_face = -0.5 * np.sum(dn[:, 1:] * m.face_normals, axis=1)
    return HalfDensityField(_lump(m, h_face) * np.sqrt(m.vertex_areas), m.identity)


def dirac_magnitude(normal_value: float) -> float:
    """|lambda| of D - U in the unit-sphere area gauge, from an eigenvalue of the normal form."""
    return float(np.sqrt(max(float(normal_value), 0.0) / (4.0 * np.pi)))


# === SOLVES ===

def gauge_fix(values: np.ndarray) -> np.ndarray:
    """
    Right-multiply by a unit quaternion so that psi_0 is a positive real.

    Falls back to the largest sample when psi_0 vanishes.
    """
    mags = np.sqrt(qnorm2(values))
    anchor = 0 if mags[0] > 1e-12 * mags.max() else int(np.argmax(mags))
    alpha = qconj(values[anchor]) / mags[anchor]
    fixed = qmul(values, alpha)
    fixed[anchor, 1:] = 0.0
    return fixed


def low_dirac_spectrum(asm: DiracAssembly, k: Optional[int] = None, tol: Optional[float] = None,
                       seed: Optional[int] = None, max_iter: Optional[int] = None) -> List[EigenPair]:
    """The k smallest eigenpairs of the normal form (config ``dirac.core.spectrum_count``)."""
    if k is None:
        k = int(get_setting('dirac', 'core.spectrum_count', 8))
    k = min(int(k), asm.n)
    if tol is None:
        tol = float(get_setting('dirac', 'solver.tol', 1e-10))
    pairs = low_spectrum(asm.operator, asm.mass, k=k, tol=tol, max_iter=max_iter, seed=seed)
    logger.debug(f"Low Dirac spectrum: {[round(p.value, 8) for p in pairs]}")
    return pairs


def solve_dirac(asm: DiracAssembly, tol: Optional[float] = None, seed: Optional[int] = None,
                initial=None, max_iter: Optional[int] = None) -> DiracSolution:
    """
    Smallest-magnitude spinor of D - U in the area-weighted inner product.

    Args:
        asm: assembled operator
        tol: eigen-residual target (config ``dirac.solver.tol``)
        seed: seed of the eigensolver's starting block
        initial: optional (n, 4) starting spinor
        max_iter: eigensolver iteration cap

    Returns:
        DiracSolution: gauge-fixed spinor with |lambda|, normal-form eigenvalue and residual.
        A vanishing spinor is flagged (``immersive`` False) and logged, not raised.

    Raises:
        ConvergenceError: the eigensolver failed
    """
    if tol is None:
        tol = float(get_setting('dirac', 'solver.tol', 1e-10))
    pair = low_spectrum(asm.operator, asm.mass, k=1, tol=tol, max_iter=max_iter, seed=seed,
                        initial=initial)[0]
    spinor = SpinorField(gauge_fix(pair.vector), asm.mesh.identity)
    solution = DiracSolution(spinor, dirac_magnitude(pair.value), pair.residual, pair.imag_part, pair.value)
    if not spinor.immersive:
        mags = spinor.magnitudes
        logger.warning(f"Dirac spinor nearly vanishes at vertex {int(np.argmin(mags))} "
                       f"(min |psi| = {mags.min():.3e}, mean {mags.mean():.3e}); "
                       f"the transformed mesh may degenerate")
    logger.info(f"Dirac spinor on {asm.mesh!r}: |lambda|={solution.eigenvalue:.3e}, normal-form value={pair.value:.3e}, "
                f"residual={pair.residual:.2e}")
    return solution


def kernel_dimension(asm: DiracAssembly, zero_tol: Optional[float] = None, count: Optional[int] = None,
                     tol: Optional[float] = None, seed: Optional[int] = None) -> Tuple[int, List[float]]:
    """
    Quaternionic dimension of the numerical kernel of D - U.

    Counts Dirac eigenvalue magnitudes |lambda| <= zero_tol among the ``count``
    smallest (config ``dirac.core.zero_tol`` and ``dirac.core.spectrum_count``).

    Returns:
        Tuple[int, List[float]]: the count and the magnitudes |lambda| it was
        taken from, ascending, so callers can judge the spectral gap
    """
    if zero_tol is None:
        zero_tol = float(get_setting('dirac', 'core.zero_tol', 5e-2))
    if zero_tol < 0.0:
        error_msg = f"zero_tol must be non-negative, got {zero_tol}"
        logger.error(error_msg)
        raise ValueError(error_msg)
    values = sorted(dirac_magnitude(p.value) for p in low_dirac_spectrum(asm, k=count, tol=tol, seed=seed))
    dimension = int(sum(v <= zero_tol for v in values))
    logger.info(f"Kernel dimension {dimension} at zero_tol={zero_tol:.1e} from {len(values)} magnitudes")
    return dimension, values


if __name__ == "__main__":
    from src.mesh.generators import icosphere

    print("🌀 Dirac operator demo")
    sphere = icosphere(2)
    asm = assemble_dirac(sphere, dihedral_half_density(sphere))
    solution = solve_dirac(asm)
    print(f"   own potential: |lambda| {solution.eigenvalue:.2e}, immersive={solution.immersive}")
    dim, values = kernel_dimension(asm, count=4)
    print(f"   kernel dimension {dim}, spectrum {[round(v, 4) for v in values]}")
    shifted = assemble_dirac(sphere, dihedral_half_density(sphere).values + 0.5 * np.sqrt(sphere.vertex_areas))
    print(f"   curvature shifted by 0.5: |lambda| {solve_dirac(shifted, tol=1e-8).eigenvalue:.2f}")
