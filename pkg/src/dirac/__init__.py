"""
Dirac Package for Spinwright

Assembly of the quaternionic Dirac operator with a half-density potential,
spinor solves and numerical kernel estimates.
"""

from .dirac_operator import (
    SpinorField, DiracAssembly, DiracSolution, SpinorMeshMismatchError,
    assemble_dirac, apply_dirac, read_potential, gauge_fix, solve_dirac,
    kernel_dimension, low_dirac_spectrum, dirac_magnitude, face_dirac_defect
)

__all__ = [
    'SpinorField',
    'DiracAssembly',
    'DiracSolution',
    'SpinorMeshMismatchError',
    'assemble_dirac',
    'apply_dirac',
    'read_potential',
    'gauge_fix',
    'solve_dirac',
    'kernel_dimension',
    'low_dirac_spectrum',
    'dirac_magnitude',
    'face_dirac_defect'
]
