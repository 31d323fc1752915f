"""
Mesh Package for Spinwright

Closed oriented triangle meshes with halfedge connectivity, OBJ I/O,
curvature measurements and analytic test surfaces.
"""

from .trimesh import (
    TriMesh, NormalField, MeshError, ObjParseError, NonTriangleFaceError,
    NonManifoldError, OpenBoundaryError, OrientationError, DegenerateFaceError
)
from .obj_io import load_obj, save_obj, parse_obj, format_obj
from .curvature import (
    HalfDensityField, CurvatureReport, QuadDiffField, RankDeficientFitError,
    mean_curvature_half_density, cotan_mean_curvature, dihedral_half_density,
    normalized_sqrt_area, angle_defects, gauss_bonnet_defect, principal_curvatures,
    curvature_report, face_shape_operators, hopf_differential
)
from .generators import ParameterRangeError, icosphere, ellipsoid, torus, box, generate_test_mesh

__all__ = [
    'TriMesh',
    'NormalField',
    'MeshError',
    'ObjParseError',
    'NonTriangleFaceError',
    'NonManifoldError',
    'OpenBoundaryError',
    'OrientationError',
    'DegenerateFaceError',
    'load_obj',
    'save_obj',
    'parse_obj',
    'format_obj',
    'HalfDensityField',
    'CurvatureReport',
    'QuadDiffField',
    'RankDeficientFitError',
    'mean_curvature_half_density',
    'cotan_mean_curvature',
    'dihedral_half_density',
    'normalized_sqrt_area',
    'angle_defects',
    'gauss_bonnet_defect',
    'principal_curvatures',
    'curvature_report',
    'face_shape_operators',
    'hopf_differential',
    'ParameterRangeError',
    'icosphere',
    'ellipsoid',
    'torus',
    'box',
    'generate_test_mesh'
]
