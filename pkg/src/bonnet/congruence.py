"""
Bonnet Module - Congruence of Immersions

Educational Focus: Two immersions of the same mesh are congruent when a rigid
motion carries one onto the other vertex by vertex. The best motion comes
from the polar decomposition (SVD) of the centred cross-covariance of the
two point sets; the residual RMS after alignment decides the verdict.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional
import logging
import sys

import numpy as np
from scipy.spatial.transform import Rotation

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

_MIRROR = np.diag([1.0, 1.0, -1.0])


class ConnectivityMismatchError(ValueError):
    """Two meshes that must share vertices and faces do not."""


class DegenerateCovarianceError(ValueError):
    """The point set is (nearly) collinear, so the rotation is not determined."""


@dataclass(frozen=True)
class RigidMotion:
    """
    x -> R(P x) + t, with P the mirror diag(1, 1, -1) when ``reflection`` is set.

    Attributes:
        rotation: unit quaternion [w, x, y, z]
        translation: (3,) vector
        reflection: whether the mirror is applied before rotating
    """
    rotation: np.ndarray
    translation: np.ndarray
    reflection: bool = False

    def __post_init__(self):
        q = np.asarray(self.rotation, dtype=float).reshape(4)
        if abs(np.linalg.norm(q) - 1.0) > 1e-12:
            q = q / np.linalg.norm(q)
        object.__setattr__(self, 'rotation', q)
        object.__setattr__(self, 'translation', np.asarray(self.translation, dtype=float).reshape(3))

    @classmethod
    def identity(cls) -> 'RigidMotion':
        return cls(np.array([1.0, 0.0, 0.0, 0.0]), np.zeros(3))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, translation, reflection: bool = False) -> 'RigidMotion':
        x, y, z, w = Rotation.from_matrix(matrix).as_quat()
        return cls(np.array([w, x, y, z]), translation, reflection)

    @property
    def rotation_matrix(self) -> np.ndarray:
        w, x, y, z = self.rotation
        return Rotation.from_quat([x, y, z, w]).as_matrix()

    @property
    def linear(self) -> np.ndarray:
        """Full linear part R P (or R)."""
        R = self.rotation_matrix
        return R @ _MIRROR if self.reflection else R

    def apply(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.linear.T + self.translation

    def inverse(self) -> 'RigidMotion':
        inv = self.linear.T
        translation = -inv @ self.translation
        if self.reflection:
            return RigidMotion.from_matrix(inv @ _MIRROR, translation, True)
        return RigidMotion.from_matrix(inv, translation)


@dataclass
class CongruenceResult:
    congruent: bool
    motion: RigidMotion
    rms: float

    def __iter__(self):
        return iter((self.congruent, self.motion, self.rms))


def best_rigid_motion(P: np.ndarray, Q: np.ndarray, allow_reflection: bool = False) -> RigidMotion:
    """
    Least-squares motion carrying points P onto Q.

    Raises:
        DegenerateCovarianceError: P is collinear (or a single point)
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != Q.shape or P.ndim != 2 or P.shape[1] != 3:
        error_msg = f"Point sets must both be (n, 3), got {P.shape} and {Q.shape}"
        logger.error(error_msg)
        raise ConnectivityMismatchError(error_msg)
    p_bar, q_bar = P.mean(axis=0), Q.mean(axis=0)
    Pc, Qc = P - p_bar, Q - q_bar
    spread = np.linalg.svd(Pc, compute_uv=False)
    if spread.size < 2 or spread[1] <= 1e-12 * max(spread[0], 1e-300):
        error_msg = "Cross-covariance is degenerate: the points are collinear"
        logger.error(error_msg)
        raise DegenerateCovarianceError(error_msg)

    U, _, Vt = np.linalg.svd(Pc.T @ Qc)
    V = Vt.T
    d = np.sign(np.linalg.det(V @ U.T))
    reflection = bool(allow_reflection and d < 0)
    if reflection:
        linear = V @ U.T
        R = linear @ _MIRROR
    else:
        R = V @ np.diag([1.0, 1.0, d]) @ U.T
        linear = R
    return RigidMotion.from_matrix(R, q_bar - linear @ p_bar, reflection)


def congruence_check(m1: TriMesh, m2: TriMesh, allow_reflection: bool = False,
                     rms_ratio: Optional[float] = None) -> CongruenceResult:
    """
    Decide whether m2 is a rigid motion of m1, vertex by vertex.

    Args:
        m1, m2: meshes with the same vertex correspondence
        allow_reflection: also accept orientation-reversing motions
        rms_ratio: congruent when rms <= rms_ratio * bounding radius of m1
            (config ``bonnet.core.congruence_rms_ratio``)

    Returns:
        CongruenceResult: verdict, the motion m1 -> m2 and the RMS after alignment

    Raises:
        ConnectivityMismatchError: vertex counts differ
        DegenerateCovarianceError: collinear vertices
    """
    if m1.n_vertices != m2.n_vertices:
        error_msg = f"Congruence needs matching vertices: {m1!r} vs {m2!r}"
        logger.error(error_msg)
        raise ConnectivityMismatchError(error_msg)
    if rms_ratio is None:
        rms_ratio = float(get_setting('bonnet', 'core.congruence_rms_ratio', 1e-6))
    motion = best_rigid_motion(m1.vertices, m2.vertices, allow_reflection)
    diff = motion.apply(m1.vertices) - m2.vertices
    rms = float(np.sqrt(np.mean(np.sum(diff * diff, axis=1))))
    congruent = rms <= rms_ratio * m1.bounding_radius
    logger.info(f"Congruence {m1!r} -> {m2!r}: rms={rms:.3e}, congruent={congruent}")
    return CongruenceResult(congruent, motion, rms)
