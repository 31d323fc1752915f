"""
Bonnet Package for Spinwright

Diagnostics for pairs of immersions: congruence, isometry and shape
distortion, holomorphicity of quadratic differentials, umbilics with their
foliation indices and the Gauss-map half-space test.
"""

from .congruence import (
    RigidMotion, CongruenceResult, ConnectivityMismatchError, DegenerateCovarianceError,
    best_rigid_motion, congruence_check
)
from .shape_distortion import (
    IsometryViolationError, BonnetPairReport, check_isometry, shape_distortion,
    holomorphicity_residual, face_field_from_chart, bonnet_pair_check
)
from .foliation import (
    UndefinedIndexError, UmbilicCluster, UmbilicSummary, foliation_index, find_umbilics, umbilic_clusters
)
from .gauss_map import HalfSpaceResult, gauss_map_halfspace_test

__all__ = [
    'RigidMotion',
    'CongruenceResult',
    'ConnectivityMismatchError',
    'DegenerateCovarianceError',
    'best_rigid_motion',
    'congruence_check',
    'IsometryViolationError',
    'BonnetPairReport',
    'check_isometry',
    'shape_distortion',
    'holomorphicity_residual',
    'face_field_from_chart',
    'bonnet_pair_check',
    'UndefinedIndexError',
    'UmbilicCluster',
    'UmbilicSummary',
    'foliation_index',
    'find_umbilics',
    'umbilic_clusters',
    'HalfSpaceResult',
    'gauss_map_halfspace_test'
]
