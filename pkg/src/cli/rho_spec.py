"""
CLI Module - Curvature Change Specifications

Text forms accepted by ``--rho``:

    const:<c>                       constant change c in the scale-free gauge
    lobe:<x>,<y>,<z>:<amp>:<width>  smooth bump around an axis
    own                             no change; the potential is the mesh's own
    own+<c>                         own potential shifted by the constant c
    <path>                          text file with one value per vertex
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Tuple
import logging
import sys

import numpy as np

project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

try:
    from src.utils.logger_factory import get_component_logger
    logger = get_component_logger('cli')
except ImportError:
    logger = logging.getLogger(__name__)

from src.mesh.trimesh import TriMesh
from src.mesh.curvature import HalfDensityField, dihedral_half_density
from src.integrate.spin_transform import constant_change, lobe_change


class RhoSpecError(ValueError):
    """The --rho text could not be parsed."""


def _fail(text: str, reason: str):
    error_msg = f"Bad rho spec '{text}': {reason}"
    logger.error(error_msg)
    raise RhoSpecError(error_msg)


def _number(text: str, token: str) -> float:
    try:
        return float(token)
    except ValueError:
        _fail(text, f"'{token}' is not a number")


@dataclass(frozen=True)
class RhoSpec:
    """Parsed ``--rho`` value; ``kind`` is const, lobe, own or file."""
    text: str
    kind: str
    constant: float = 0.0
    axis: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    amplitude: float = 0.0
    width: float = 1.0
    path: str = ''

    def change(self, m: TriMesh) -> HalfDensityField:
        """The half-density change rho on ``m``."""
        if self.kind in ('const', 'own'):
            return constant_change(m, self.constant)
        if self.kind == 'lobe':
            return lobe_change(m, self.axis, self.amplitude, self.width)
        try:
            values = np.loadtxt(self.path, dtype=float, ndmin=1)
        except ValueError as e:
            _fail(self.text, f"cannot read values: {e}")
        if values.shape != (m.n_vertices,):
            _fail(self.text, f"{values.size} values for a mesh with {m.n_vertices} vertices")
        return HalfDensityField(values, m.identity)

    def potential(self, m: TriMesh) -> HalfDensityField:
        """The Dirac potential: the own half-density plus the change."""
        own = dihedral_half_density(m)
        return own.with_values(own.values + self.change(m).values)


def parse_rho_spec(text: str) -> RhoSpec:
    """
    Parse a ``--rho`` value.

    Raises:
        RhoSpecError: malformed text

    Example:
        >>> parse_rho_spec('lobe:0,0,1:0.2:0.3').axis
        (0.0, 0.0, 1.0)
    """
    text = text.strip()
    if text == 'own':
        return RhoSpec(text, 'own')
    if text.startswith('own+'):
        return RhoSpec(text, 'own', constant=_number(text, text[4:]))
    if text.startswith('const:'):
        return RhoSpec(text, 'const', constant=_number(text, text[6:]))
    if text.startswith('lobe:'):
        parts = text[5:].split(':')
        if len(parts) != 3:
            _fail(text, "expected lobe:<x>,<y>,<z>:<amp>:<width>")
        axis = tuple(_number(text, t) for t in parts[0].split(','))
        if len(axis) != 3:
            _fail(text, "the lobe axis needs three components")
        width = _number(text, parts[2])
        if width <= 0.0 or not any(axis):
            _fail(text, "the lobe needs a nonzero axis and a positive width")
        return RhoSpec(text, 'lobe', axis=axis, amplitude=_number(text, parts[1]), width=width)
    if not text:
        _fail(text, "empty")
    return RhoSpec(text, 'file', path=text)
