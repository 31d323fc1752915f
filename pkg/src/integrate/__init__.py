"""
Integrate Package for Spinwright

Spinor one-forms, their least-squares integration into vertex positions and
the prescribed-curvature spin transformation built on top.
"""

from .one_form import (
    EdgeOneForm, SingularSystemError, OneFormMeshMismatchError, exact_one_form,
    spinor_one_form, integration_weights, integrate_one_form, closedness_residual,
    homology_generators, period_residuals, quasi_conformal_distortion
)
from .spin_transform import (
    TransformReport, constant_change, lobe_change, admissible_rho, realize_spinor, closedness_ratio,
    spin_transform
)

__all__ = [
    'EdgeOneForm',
    'SingularSystemError',
    'OneFormMeshMismatchError',
    'exact_one_form',
    'spinor_one_form',
    'integration_weights',
    'integrate_one_form',
    'closedness_residual',
    'homology_generators',
    'period_residuals',
    'quasi_conformal_distortion',
    'TransformReport',
    'constant_change',
    'lobe_change',
    'admissible_rho',
    'realize_spinor',
    'closedness_ratio',
    'spin_transform'
]
