"""
Bonnet Module - Gauss Map Half-Space Test

Educational Focus: The differences N1 - N2 of two normal fields lie in a
closed half-space iff some unit v has v . d_i >= 0 for every difference d_i,
i.e. iff the origin is not interior to their convex hull.

Any nonzero v can be scaled so that one coordinate is +1 or -1 and the others
lie in [-1, 1]. Six small linear programs (one per signed axis) maximize the
margin t in D v >= t; the closed half-space exists iff the best margin is
non-negative.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional
import logging
import sys

import numpy as np
from scipy.optimize import linprog

project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

try:
    from src.utils.logger_factory import get_component_logger
    logger = get_component_logger('bonnet')
except ImportError:
    logger = logging.getLogger(__name__)

from src.mesh.trimesh import NormalField
from src.bonnet.congruence import ConnectivityMismatchError


@dataclass
class HalfSpaceResult:
    in_halfspace: bool
    witness: Optional[np.ndarray]
    margin: float

    def __iter__(self):
        return iter((self.in_halfspace, self.witness))

    def to_dict(self) -> Dict:
        return {
            'in_halfspace': bool(self.in_halfspace),
            'witness': None if self.witness is None else [float(c) for c in self.witness],
            'margin': float(self.margin),
        }


def _vectors(field) -> np.ndarray:
    if isinstance(field, NormalField):
        return field.vectors
    return np.asarray(field, dtype=float).reshape(-1, 3)


def _best_margin(D: np.ndarray):
    """Largest margin over the six signed-axis normalizations, with its v."""
    best_t, best_v = -np.inf, None
    A_ub = np.hstack([-D, np.ones((D.shape[0], 1))])
    b_ub = np.zeros(D.shape[0])
    c = np.array([0.0, 0.0, 0.0, -1.0])
    for axis in range(3):
        for sign in (1.0, -1.0):
            bounds = [(-1.0, 1.0)] * 3 + [(None, None)]
            bounds[axis] = (sign, sign)
            result = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method='highs')
            if result.status != 0:
                logger.debug(f"Margin LP on axis {axis} sign {sign:+.0f}: {result.message}")
                continue
            t = float(result.x[3])
            if t > best_t:
                best_t, best_v = t, result.x[:3]
    return best_t, best_v


def gauss_map_halfspace_test(n1, n2, zero_tol: float = 1e-12) -> HalfSpaceResult:
    """
    Decide whether N1 - N2 lies in a closed half-space through the origin.

    Args:
        n1, n2: NormalField (or (n, 3) arrays) with matching vertex counts
        zero_tol: differences shorter than this are ignored

    Returns:
        HalfSpaceResult: verdict, unit witness v (None when false) and the
        best margin min_i v . d_i for the infinity-normalized v

    Raises:
        ConnectivityMismatchError: vertex counts differ

    Example:
        >>> gauss_map_halfspace_test(mesh.normal_field(), mesh.normal_field()).in_halfspace
        True
    """
    a, b = _vectors(n1), _vectors(n2)
    if a.shape != b.shape:
        error_msg = f"Normal fields differ in size: {a.shape} vs {b.shape}"
        logger.error(error_msg)
        raise ConnectivityMismatchError(error_msg)
    D = a - b
    D = D[np.linalg.norm(D, axis=1) > zero_tol]
    if D.shape[0] == 0:
        logger.info("Normal fields coincide: every direction witnesses the half-space")
        return HalfSpaceResult(True, np.array([0.0, 0.0, 1.0]), 0.0)

    margin, v = _best_margin(D)
    tolerance = 1e-12 * float(np.abs(D).max())
    inside = v is not None and margin >= -tolerance
    witness = v / np.linalg.norm(v) if inside else None
    logger.info(f"Gauss map half-space test: {inside} (margin {margin:.3e}, {D.shape[0]} differences)")
    return HalfSpaceResult(bool(inside), witness, float(margin))
