"""
Quaternion Numerics Package for Spinwright

Quaternion arithmetic, block-sparse quaternionic operators and the
smallest-magnitude eigensolver behind every Dirac spinor computation.
"""

from .quaternion import (
    Quaternion, quat_mul, to_real_block, qmul, qconj, qnorm2, imag, left_blocks
)
from .sparse_operator import (
    QuatSparseOperator, QuatVector, apply, DimensionMismatchError, NonHermitianError
)
from .eigensolver import EigenPair, ConvergenceError, smallest_eigenpair, low_spectrum

__all__ = [
    'Quaternion',
    'quat_mul',
    'to_real_block',
    'qmul',
    'qconj',
    'qnorm2',
    'imag',
    'left_blocks',
    'QuatSparseOperator',
    'QuatVector',
    'apply',
    'DimensionMismatchError',
    'NonHermitianError',
    'EigenPair',
    'ConvergenceError',
    'smallest_eigenpair',
    'low_spectrum'
]
