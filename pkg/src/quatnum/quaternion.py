"""
Quaternion Numerics - Scalar and Vectorised Quaternion Algebra

Educational Focus: Quaternions H = {w + xi + yj + zk} with the Hamilton product.
Imaginary quaternions (w = 0) model vectors of R^3, so mesh positions, edge
vectors and normals all live in the same algebra as the spinors acting on them.

Two layers are provided:
- ``Quaternion``: an immutable scalar value, convenient in tests and reports
- array helpers (``qmul``, ``qconj``, ...) acting on ``(..., 4)`` numpy arrays
  laid out as [w, x, y, z]; every numerical pipeline uses these

Convention: ``to_real_block(q)`` is the 4x4 real matrix of left multiplication
x -> q x in the basis (1, i, j, k).
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Union
import logging
import sys

import numpy as np

# Add project root to Python path for proper imports
project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

try:
    from src.utils.logger_factory import get_component_logger
    from src.utils.settings import get_setting
    logger = get_component_logger('quatnum')
except ImportError:
    logger = logging.getLogger(__name__)

    def get_setting(section, path, default):
        return default


def _unit_tolerance() -> float:
    return float(get_setting('quatnum', 'core.unit_tolerance', 1e-12))


@dataclass(frozen=True)
class Quaternion:
    """
    Immutable quaternion w + x i + y j + z k.

    Educational Note: The Hamilton product is associative but not commutative:
    i*j = k while j*i = -k. Multiplying by a unit quaternion from both sides
    (q v conj(q)) rotates the imaginary vector v, which is how spinors act on
    edge vectors.

    Example:
        >>> Quaternion(0, 1, 0, 0) * Quaternion(0, 0, 1, 0)
        Quaternion(w=0.0, x=0.0, y=0.0, z=1.0)
    """
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ('w', 'x', 'y', 'z'):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_array(cls, values) -> 'Quaternion':
        arr = np.asarray(values, dtype=float).reshape(-1)
        if arr.shape[0] == 3:
            return cls(0.0, *arr)
        if arr.shape[0] != 4:
            error_msg = f"Quaternion needs 3 or 4 components, got {arr.shape[0]}"
            logger.error(error_msg)
            raise ValueError(error_msg)
        return cls(*arr)

    @classmethod
    def imaginary(cls, vector) -> 'Quaternion':
        """Embed a vector of R^3 as an imaginary quaternion."""
        x, y, z = np.asarray(vector, dtype=float).reshape(3)
        return cls(0.0, x, y, z)

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def conjugate(self) -> 'Quaternion':
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return float(np.sqrt(self.norm2()))

    def inverse(self) -> 'Quaternion':
        n2 = self.norm2()
        if n2 == 0.0:
            error_msg = "Cannot invert the zero quaternion"
            logger.error(error_msg)
            raise ZeroDivisionError(error_msg)
        c = self.conjugate()
        return Quaternion(c.w / n2, c.x / n2, c.y / n2, c.z / n2)

    def is_unit(self, tol: float = None) -> bool:
        tol = _unit_tolerance() if tol is None else tol
        return abs(self.norm2() - 1.0) <= tol

    def is_imaginary(self, tol: float = 0.0) -> bool:
        return abs(self.w) <= tol

    def __add__(self, other: 'Quaternion') -> 'Quaternion':
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: 'Quaternion') -> 'Quaternion':
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> 'Quaternion':
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other: Union['Quaternion', float, int]) -> 'Quaternion':
        if isinstance(other, Quaternion):
            return quat_mul(self, other)
        s = float(other)
        return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)

    def __rmul__(self, other: Union[float, int]) -> 'Quaternion':
        s = float(other)
        return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)


ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """
    Hamilton product of quaternion arrays, broadcasting over leading axes.

    Args:
        p: array of shape (..., 4)
        q: array of shape (..., 4)

    Returns:
        np.ndarray: p q with shape broadcast(p, q)
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack([
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    ], axis=-1)


def qconj(q: np.ndarray) -> np.ndarray:
    out = np.array(q, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def qnorm2(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.einsum('...i,...i->...', q, q)


def imag(vectors: np.ndarray) -> np.ndarray:
    """Embed (..., 3) vectors as (..., 4) imaginary quaternions."""
    vectors = np.asarray(vectors, dtype=float)
    out = np.zeros(vectors.shape[:-1] + (4,))
    out[..., 1:] = vectors
    return out


def left_blocks(q: np.ndarray) -> np.ndarray:
    """
    Batched left-multiplication matrices: (..., 4) -> (..., 4, 4).

    Educational Note: L(q) @ x equals the components of q x, so a quaternionic
    linear operator becomes a real operator four times larger and scipy's real
    sparse machinery can be reused unchanged.
    """
    q = np.asarray(q, dtype=float)
    a, b, c, d = np.moveaxis(q, -1, 0)
    return np.stack([
        np.stack([a, -b, -c, -d], axis=-1),
        np.stack([b, a, -d, c], axis=-1),
        np.stack([c, d, a, -b], axis=-1),
        np.stack([d, -c, b, a], axis=-1),
    ], axis=-2)


def quat_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """
    Hamilton product of two scalar quaternions.

    Example:
        >>> quat_mul(I, J) == K
        True
    """
    return Quaternion.from_array(qmul(p.to_array(), q.to_array()))


def to_real_block(q: Union[Quaternion, np.ndarray]) -> np.ndarray:
    """
    4x4 real matrix of x -> q x in the basis (1, i, j, k).

    The map is an algebra homomorphism, R(pq) = R(p) R(q), and
    R(conj(q)) = R(q)^T.
    """
    arr = q.to_array() if isinstance(q, Quaternion) else np.asarray(q, dtype=float)
    return left_blocks(arr)


if __name__ == "__main__":
    print("🌀 Quaternion algebra check")
    print(f"   i*j = {I * J}")
    print(f"   j*i = {J * I}")
    rng = np.random.default_rng(0)
    p, q = Quaternion.from_array(rng.normal(size=4)), Quaternion.from_array(rng.normal(size=4))
    print(f"   |pq| - |p||q| = {(p * q).norm() - p.norm() * q.norm():.2e}")
    err = np.abs(to_real_block(p * q) - to_real_block(p) @ to_real_block(q)).max()
    print(f"   ‖R(pq) - R(p)R(q)‖∞ = {err:.2e}")
