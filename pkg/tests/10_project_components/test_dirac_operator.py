"""
Test suite for Dirac operator assembly and spinor solves

Educational Focus: The round sphere with its own mean-curvature half-density
has the constant spinor as an exact kernel vector; shifting the potential far
away removes the kernel. The cotan estimator from the mesh package is an
independent oracle for the potential the operator reads back.
"""

import numpy as np
import pytest
import scipy.linalg
import sys
from pathlib import Path

# Add project root to Python path for proper imports
project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from src.dirac.dirac_operator import (
    assemble_dirac, apply_dirac, read_potential, solve_dirac, kernel_dimension,
    low_dirac_spectrum, gauge_fix, dirac_magnitude, face_dirac_defect, SpinorField,
    SpinorMeshMismatchError
)
from src.quatnum.quaternion import qmul, qconj, qnorm2
from src.quatnum.sparse_operator import QuatVector, DimensionMismatchError
from src.mesh.curvature import mean_curvature_half_density, dihedral_half_density
from src.mesh.generators import icosphere, ellipsoid
from src.integrate.one_form import spinor_one_form, closedness_residual
from src.integrate.spin_transform import admissible_rho, lobe_change, closedness_ratio


def relative_l2(values, target, weights):
    return np.sqrt(np.sum(weights * (values - target) ** 2) / np.sum(weights * target ** 2))


def random_potential(mesh, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, mesh.n_vertices) * np.sqrt(mesh.vertex_areas)


@pytest.fixture(scope="module")
def sphere2():
    return icosphere(2)


@pytest.fixture(scope="module")
def own_assembly(sphere2):
    return assemble_dirac(sphere2, dihedral_half_density(sphere2))


# === ASSEMBLY ===

def test_operator_is_hermitian_as_stored(own_assembly):
    assert own_assembly.operator.is_self_adjoint
    assert own_assembly.operator.is_hermitian()
    assert np.all(own_assembly.mass > 0)
    assert own_assembly.mass.sum() == pytest.approx(1.0)


def test_own_potential_has_no_curvature_change(own_assembly):
    assert np.max(np.abs(own_assembly.rho_vertex)) <= 1e-12


def test_read_back_is_exact_on_the_sphere():
    sphere = icosphere(3).scaled(2.0)
    read = read_potential(assemble_dirac(sphere, 0.0)).values
    # H = 1/R at every vertex
    assert np.allclose(read, 0.5 * np.sqrt(sphere.vertex_areas), rtol=1e-10, atol=0)


def test_read_back_agrees_with_cotan_estimator():
    sphere = icosphere(3)
    read = read_potential(assemble_dirac(sphere, 0.0)).values
    cotan = mean_curvature_half_density(sphere).values
    assert relative_l2(read, cotan, sphere.vertex_areas) <= 0.05


def test_read_back_ignores_the_potential(own_assembly, sphere2):
    shifted = assemble_dirac(sphere2, random_potential(sphere2, 8))
    assert np.allclose(read_potential(shifted).values, read_potential(own_assembly).values, atol=1e-14)


def test_read_back_is_scale_invariant():
    mesh = ellipsoid(1.0, 1.3, 0.8, level=2)
    read = read_potential(assemble_dirac(mesh, 0.0)).values
    scaled = read_potential(assemble_dirac(mesh.scaled(3.0), 0.0)).values
    assert np.allclose(scaled, read, rtol=1e-10, atol=1e-14)
    assert np.all(read > 0)


def test_potential_length_mismatch(sphere2):
    with pytest.raises(DimensionMismatchError):
        assemble_dirac(sphere2, np.zeros(sphere2.n_vertices - 1))


def test_apply_dirac_rejects_foreign_spinor(own_assembly):
    other = icosphere(1)
    spinor = SpinorField(np.tile([1.0, 0, 0, 0], (own_assembly.n, 1)), other.identity)
    with pytest.raises(SpinorMeshMismatchError):
        apply_dirac(own_assembly, spinor)


def test_constant_spinor_is_annihilated(own_assembly):
    ones = np.tile([1.0, 0.0, 0.0, 0.0], (own_assembly.n, 1))
    assert np.allclose(own_assembly.operator.matvec(ones), 0.0, atol=1e-12)
    assert np.allclose(apply_dirac(own_assembly, ones), 0.0, atol=1e-12)


def test_weighted_self_adjointness():
    mesh = ellipsoid(1.0, 1.3, 0.8, level=1)
    asm = assemble_dirac(mesh, random_potential(mesh, 3))
    rng = np.random.default_rng(4)
    phi, psi = rng.normal(size=(2, mesh.n_vertices, 4))
    E, w = asm.operator, asm.mass
    left = QuatVector(E.matvec(phi) / w[:, None], w).inner(psi).to_array()
    right = QuatVector(phi, w).inner(E.matvec(psi) / w[:, None]).to_array()
    assert np.allclose(left, right, rtol=0, atol=1e-10 * np.abs(left).max())


# === SOLVES ===

def test_own_potential_has_constant_spinor(own_assembly):
    solution = solve_dirac(own_assembly)
    assert abs(solution.eigenvalue) <= 5e-2
    assert solution.residual <= 1e-10
    assert solution.immersive
    assert np.allclose(solution.spinor.values, [1.0, 0.0, 0.0, 0.0], atol=1e-6)


def test_far_shift_has_no_kernel(sphere2):
    shifted = assemble_dirac(sphere2, dihedral_half_density(sphere2).values + 10.0)
    solution = solve_dirac(shifted, tol=1e-8)
    assert abs(solution.eigenvalue) >= 1.0
    dimension, values = kernel_dimension(shifted, tol=1e-8)
    assert dimension == 0
    assert len(values) == 8


def test_residual_contract():
    mesh = icosphere(1)
    asm = assemble_dirac(mesh, random_potential(mesh, 7))
    solution = solve_dirac(asm, tol=1e-9)
    spinor, eigenvalue, residual = solution
    psi, w = spinor.values, asm.mass
    r = asm.operator.matvec(psi) / w[:, None] - solution.normal_value * psi
    measured = np.sqrt(np.sum(w * qnorm2(r)) / np.sum(w * qnorm2(psi)))
    assert residual <= 1e-9
    assert measured <= 1.01e-9
    assert eigenvalue == pytest.approx(np.sqrt(max(solution.normal_value, 0.0) / (4 * np.pi)), rel=1e-12)


def test_spinor_normalization(sphere2):
    asm = assemble_dirac(sphere2, random_potential(sphere2, 11))
    psi = solve_dirac(asm).spinor.values
    A = sphere2.vertex_areas
    assert np.sum(A * qnorm2(psi)) == pytest.approx(A.sum(), rel=1e-10)
    assert psi[0, 0] > 0 and np.allclose(psi[0, 1:], 0.0)


def test_gauge_covariance():
    mesh = icosphere(1)
    asm = assemble_dirac(mesh, random_potential(mesh, 5))
    first = solve_dirac(asm)
    alpha = np.array([0.5, 0.5, -0.5, 0.5])
    rotated = qmul(first.spinor.values, alpha)
    # a right unit multiple is an eigenvector with the same real eigenvalue
    E, w = asm.operator, asm.mass
    quotient = qmul(qconj(rotated), E.matvec(rotated)).sum(axis=0) / np.sum(w * qnorm2(rotated))
    assert quotient[0] == pytest.approx(first.normal_value, rel=1e-8)
    again = solve_dirac(asm, initial=rotated, seed=9)
    assert np.allclose(again.spinor.values, first.spinor.values, atol=1e-6)


def test_gauge_fix_anchors_first_vertex():
    rng = np.random.default_rng(0)
    values = rng.normal(size=(6, 4))
    fixed = gauge_fix(values)
    assert fixed[0, 0] > 0 and np.allclose(fixed[0, 1:], 0.0)
    assert np.allclose(qnorm2(fixed), qnorm2(values))


def test_eigenvalues_are_scale_invariant():
    mesh = icosphere(1)
    U = random_potential(mesh, 2)
    original = [p.value for p in low_dirac_spectrum(assemble_dirac(mesh, U), k=3)]
    scaled = [p.value for p in low_dirac_spectrum(assemble_dirac(mesh.scaled(3.0), U), k=3)]
    assert scaled == pytest.approx(original, rel=1e-8)


def test_round_sphere_spectrum_magnitudes():
    sphere = icosphere(3)
    _, magnitudes = kernel_dimension(assemble_dirac(sphere, dihedral_half_density(sphere)), count=4)
    assert magnitudes[0] <= 1e-5
    assert magnitudes[1:3] == pytest.approx([1.0, 1.0], rel=1e-2)
    assert magnitudes[3] == pytest.approx(2.0, rel=1e-2)


def test_curvature_shift_is_bounded_by_constant_spinor(sphere2):
    shift = 0.5
    U = dihedral_half_density(sphere2).values + shift * np.sqrt(sphere2.vertex_areas)
    solution = solve_dirac(assemble_dirac(sphere2, U), tol=1e-8)
    # the constant spinor has |lambda| = shift * sqrt(area / 4 pi)
    assert solution.eigenvalue <= shift * np.sqrt(sphere2.total_area / (4 * np.pi)) + 1e-9
    assert solution.eigenvalue >= 0.4


def test_magnitude_drops_the_sign():
    assert dirac_magnitude(4 * np.pi) == pytest.approx(1.0)
    assert dirac_magnitude(-1e-14) == 0.0


# === DENSE ORACLE ===

def test_low_spectrum_matches_dense_real_representation(sphere2):
    asm = assemble_dirac(sphere2, random_potential(sphere2, 13))
    dense = scipy.linalg.eigh(asm.operator.to_dense(), np.diag(np.repeat(asm.mass, 4)), eigvals_only=True)
    groups = dense.reshape(-1, 4)
    # every quaternionic eigenvalue is four real ones
    assert np.allclose(groups, groups[:, :1], rtol=0, atol=1e-10 * np.abs(dense).max())
    pairs = low_dirac_spectrum(asm, k=4, tol=1e-10)
    assert [p.value for p in pairs] == pytest.approx(groups[:4, 0].tolist(), abs=1e-8)
    assert max(p.imag_part for p in pairs) <= 1e-10
    solution = solve_dirac(asm)
    assert solution.normal_value == pytest.approx(groups[0, 0], abs=1e-8)
    assert solution.eigenvalue == pytest.approx(dirac_magnitude(groups[0, 0]), rel=1e-6)


# === FACE DEFECTS ===

@pytest.fixture(scope="module")
def lobe_solution():
    sphere = icosphere(3)
    rho, _ = admissible_rho(sphere, lobe_change(sphere, [0.0, 0.0, 1.0], amplitude=0.3, width=0.3))
    asm = assemble_dirac(sphere, dihedral_half_density(sphere).values + rho.values)
    return asm, solve_dirac(asm)


def test_face_defects_reproduce_normal_form(lobe_solution):
    asm, solution = lobe_solution
    defect, _ = face_dirac_defect(asm, solution.spinor)
    energy = np.sum(asm.mesh.face_areas * qnorm2(defect))
    assert energy == pytest.approx(solution.normal_value, rel=1e-6, abs=1e-12)


def test_closedness_is_controlled_by_the_dirac_defect(lobe_solution):
    asm, solution = lobe_solution
    m = asm.mesh
    closed = closedness_residual(m, spinor_one_form(m, solution.spinor))
    defect, average = face_dirac_defect(asm, solution.spinor)
    predicted = 2.0 * m.face_areas * np.linalg.norm(qmul(qconj(average), defect)[:, 1:], axis=1)
    assert np.allclose(closed, predicted, rtol=1e-6, atol=1e-12)
    assert closedness_ratio(m, closed, average, solution.normal_value) <= 1.0 + 1e-9


def test_face_defect_rejects_wrong_shape(own_assembly):
    with pytest.raises(DimensionMismatchError):
        face_dirac_defect(own_assembly, np.zeros((3, 4)))


# === KERNEL DIMENSION ===

def test_own_potential_kernel(own_assembly):
    dimension, values = kernel_dimension(own_assembly, zero_tol=5e-2)
    assert dimension >= 1
    assert values == sorted(values, key=abs)


def test_zero_tolerance_on_random_potential(sphere2):
    asm = assemble_dirac(sphere2, random_potential(sphere2, 1))
    dimension, _ = kernel_dimension(asm, zero_tol=0.0, count=4)
    assert dimension == 0


def test_negative_zero_tol_rejected(own_assembly):
    with pytest.raises(ValueError):
        kernel_dimension(own_assembly, zero_tol=-1.0)
