"""
Test suite for the quaternionic eigensolver

Educational Focus: Every iterative result is checked against a dense
symmetric eigensolver on the 4n x 4n real representation, where each
quaternionic eigenvalue shows up exactly four times.
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

from src.quatnum.quaternion import qmul, qconj
from src.quatnum.sparse_operator import QuatSparseOperator, NonHermitianError
from src.quatnum.eigensolver import smallest_eigenpair, low_spectrum, ConvergenceError


def random_hermitian(seed, n):
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(n)
    return QuatSparseOperator.hermitian(n, rows, cols, rng.normal(size=(rows.size, 4)))


def dense_quaternionic_eigenvalues(A, weights=None):
    """Ascending quaternionic eigenvalues from the dense generalized real problem."""
    w = np.ones(A.n) if weights is None else weights
    values = scipy.linalg.eigh(A.to_dense(), np.diag(np.repeat(w, 4)), eigvals_only=True)
    groups = values.reshape(-1, 4)
    assert np.allclose(groups, groups[:, :1], atol=1e-10), "multiplicity must be divisible by 4"
    return groups[:, 0]


# === SMALLEST EIGENPAIR ===

def test_identity_operator():
    pair = smallest_eigenpair(QuatSparseOperator.identity(5))
    assert pair.value == pytest.approx(1.0, abs=1e-12)


def test_diagonal_operator_concentrates_on_smallest_entry():
    value, vector = smallest_eigenpair(QuatSparseOperator.diagonal([3.0, 1.0, 2.0]))
    assert value == pytest.approx(1.0, abs=1e-12)
    magnitudes = np.linalg.norm(vector, axis=1)
    assert np.argmax(magnitudes) == 1
    assert magnitudes[0] < 1e-6 and magnitudes[2] < 1e-6


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_random_hermitian_matches_dense_oracle(seed):
    A = random_hermitian(seed, 8)
    pair = smallest_eigenpair(A)
    dense = dense_quaternionic_eigenvalues(A)
    assert pair.value == pytest.approx(dense[np.argmin(np.abs(dense))], abs=1e-8)
    assert pair.residual <= 1e-10
    assert pair.imag_part <= 1e-10


def test_weighted_problem_matches_dense_oracle():
    A = random_hermitian(3, 8)
    w = np.random.default_rng(3).uniform(0.2, 2.0, size=8)
    pair = smallest_eigenpair(A, weights=w)
    dense = dense_quaternionic_eigenvalues(A, w)
    assert pair.value == pytest.approx(dense[np.argmin(np.abs(dense))], abs=1e-8)
    # normalization ||psi||_W^2 = sum(W)
    assert np.sum(w * np.sum(pair.vector ** 2, axis=1)) == pytest.approx(w.sum())


def test_residual_contract_holds():
    A = random_hermitian(4, 10)
    w = np.linspace(0.5, 1.5, 10)
    pair = smallest_eigenpair(A, weights=w, tol=1e-10)
    r = A.matvec(pair.vector) - pair.value * w[:, None] * pair.vector
    res = np.sqrt(np.sum(np.sum(r ** 2, axis=1) / w))
    norm = np.sqrt(np.sum(w * np.sum(pair.vector ** 2, axis=1)))
    assert res <= 1e-10 * norm


# === LOW SPECTRUM ===

def test_degenerate_kernel():
    pairs = low_spectrum(QuatSparseOperator.diagonal([0.0, 0.0, 5.0]), k=2)
    assert [p.value for p in pairs] == pytest.approx([0.0, 0.0], abs=1e-12)
    overlap = qmul(qconj(pairs[0].vector), pairs[1].vector).sum(axis=0)
    assert np.allclose(overlap, 0.0, atol=1e-10)


def test_two_smallest_of_diagonal():
    pairs = low_spectrum(QuatSparseOperator.diagonal([1.0, 2.0, 3.0]), k=2)
    assert [p.value for p in pairs] == pytest.approx([1.0, 2.0], abs=1e-12)


def test_random_hermitian_low_spectrum_matches_dense_oracle():
    A = random_hermitian(11, 12)
    pairs = low_spectrum(A, k=4)
    dense = dense_quaternionic_eigenvalues(A)
    expected = dense[np.argsort(np.abs(dense))][:4]
    assert [p.value for p in pairs] == pytest.approx(list(expected), abs=1e-8)
    for a in range(4):
        for b in range(a + 1, 4):
            overlap = qmul(qconj(pairs[a].vector), pairs[b].vector).sum(axis=0)
            assert np.allclose(overlap, 0.0, atol=1e-8)


def test_seed_makes_results_reproducible():
    A = random_hermitian(5, 9)
    first = smallest_eigenpair(A, seed=3)
    second = smallest_eigenpair(A, seed=3)
    assert first.value == second.value
    assert np.array_equal(first.vector, second.vector)


# === ERRORS ===

def test_k_larger_than_dimension():
    with pytest.raises(ValueError):
        low_spectrum(QuatSparseOperator.identity(3), k=4)


def test_non_hermitian_input():
    A = QuatSparseOperator(2, [0, 1, 0], [0, 1, 1], [[1, 0, 0, 0], [2, 0, 0, 0], [0, 1, 0, 0]])
    with pytest.raises(NonHermitianError):
        smallest_eigenpair(A)


def test_convergence_failure_reports_last_residual():
    A = random_hermitian(6, 40)
    with pytest.raises(ConvergenceError) as excinfo:
        smallest_eigenpair(A, tol=1e-300, max_iter=2)
    assert excinfo.value.iterations == 2
    assert np.isfinite(excinfo.value.last_residual)
