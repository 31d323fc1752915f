"""
Quaternion Numerics - Block-Sparse Quaternionic Operators and Vectors

Educational Focus: A quaternionic n x n operator is stored as triplets
(row, col, quaternion). For solving, it is expanded into its real 4n x 4n
representation by replacing every entry with its left-multiplication block,
so scipy.sparse does the heavy lifting.

Side convention: operators act on the LEFT of spinor coefficients,
(A v)_i = sum_j A_ij v_j, and quaternionic scalars act on the RIGHT, v * alpha.
With this convention right multiplication commutes with every operator, which
is the gauge freedom psi -> psi alpha of Dirac spinors.
"""

from pathlib import Path
from typing import Optional, Union
import logging
import sys

import numpy as np
import scipy.sparse as sp

project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

try:
    from src.utils.logger_factory import get_component_logger
    logger = get_component_logger('quatnum')
except ImportError:
    logger = logging.getLogger(__name__)

from src.quatnum.quaternion import Quaternion, qmul, qconj, qnorm2, left_blocks


class DimensionMismatchError(ValueError):
    """Operator and vector (or weight) sizes disagree."""


class NonHermitianError(ValueError):
    """An operation requiring a hermitian operator got a non-hermitian one."""


def _combine(n: int, rows: np.ndarray, cols: np.ndarray, values: np.ndarray):
    """Sum duplicate (row, col) slots deterministically and drop zero entries."""
    keys = rows.astype(np.int64) * n + cols.astype(np.int64)
    unique_keys, inverse = np.unique(keys, return_inverse=True)
    summed = np.zeros((unique_keys.shape[0], 4))
    np.add.at(summed, inverse, values)
    nonzero = np.any(summed != 0.0, axis=1)
    unique_keys = unique_keys[nonzero]
    return unique_keys // n, unique_keys % n, summed[nonzero]


class QuatSparseOperator:
    """
    Sparse quaternionic linear operator on H^n.

    Educational Note: Entries are kept sorted by (row, col) with duplicates
    summed, so two operators assembled from the same contributions in the same
    order are bit-identical. The real representation is built lazily and
    cached; instances are treated as immutable.

    Attributes:
        n: number of quaternionic degrees of freedom
        rows, cols: int arrays of stored slots
        values: (nnz, 4) quaternion entries, never all-zero
        is_self_adjoint: flag recorded at construction (verified, not trusted)
    """

    def __init__(self, n: int, rows, cols, values, hermitian: bool = False):
        if n < 1:
            error_msg = f"Operator dimension must be positive, got {n}"
            logger.error(error_msg)
            raise ValueError(error_msg)
        rows = np.asarray(rows, dtype=np.int64).reshape(-1)
        cols = np.asarray(cols, dtype=np.int64).reshape(-1)
        values = np.asarray(values, dtype=float).reshape(-1, 4)
        if not (rows.shape[0] == cols.shape[0] == values.shape[0]):
            error_msg = "rows, cols and values must have the same length"
            logger.error(error_msg)
            raise DimensionMismatchError(error_msg)
        if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n):
            error_msg = f"Entry index out of range for dimension {n}"
            logger.error(error_msg)
            raise DimensionMismatchError(error_msg)

        self.n = int(n)
        self.rows, self.cols, self.values = _combine(self.n, rows, cols, values)
        self._real: Optional[sp.csr_matrix] = None

        self.is_self_adjoint = False
        if hermitian:
            if not self.is_hermitian():
                error_msg = "Operator flagged hermitian but entry(j, i) != conj(entry(i, j))"
                logger.error(error_msg)
                raise NonHermitianError(error_msg)
            self.is_self_adjoint = True

    @classmethod
    def hermitian(cls, n: int, rows, cols, values) -> 'QuatSparseOperator':
        """
        Build the hermitian part (A + A*)/2 of the operator described by triplets.

        The upper triangle is accumulated first and mirrored by conjugation,
        so entry(j, i) == conj(entry(i, j)) holds bit-for-bit and diagonal
        entries are real.

        Args:
            n: dimension
            rows, cols, values: triplets of the full matrix A (duplicates summed)
        """
        rows = np.asarray(rows, dtype=np.int64).reshape(-1)
        cols = np.asarray(cols, dtype=np.int64).reshape(-1)
        values = np.asarray(values, dtype=float).reshape(-1, 4)

        upper = rows < cols
        lower = rows > cols
        diag = rows == cols
        folded = np.empty_like(values)
        folded[upper] = 0.5 * values[upper]
        folded[lower] = 0.5 * qconj(values[lower])
        folded[diag] = 0.0
        folded[diag, 0] = values[diag, 0]

        top_r, top_c, top_v = _combine(n, np.minimum(rows, cols), np.maximum(rows, cols), folded)
        off = top_r != top_c
        all_rows = np.concatenate([top_r, top_c[off]])
        all_cols = np.concatenate([top_c, top_r[off]])
        all_vals = np.concatenate([top_v, qconj(top_v[off])])
        return cls(n, all_rows, all_cols, all_vals, hermitian=True)

    @classmethod
    def identity(cls, n: int) -> 'QuatSparseOperator':
        return cls.diagonal(np.ones(n))

    @classmethod
    def diagonal(cls, values) -> 'QuatSparseOperator':
        """Diagonal operator; real diagonals are hermitian."""
        values = np.asarray(values, dtype=float)
        n = values.shape[0]
        if values.ndim == 1:
            quats = np.zeros((n, 4))
            quats[:, 0] = values
            return cls(n, np.arange(n), np.arange(n), quats, hermitian=True)
        return cls(n, np.arange(n), np.arange(n), values.reshape(n, 4))

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    def entry(self, i: int, j: int) -> Quaternion:
        """Stored entry at (i, j); zero when the slot is empty."""
        key = i * self.n + j
        keys = self.rows * self.n + self.cols
        pos = np.searchsorted(keys, key)
        if pos < keys.shape[0] and keys[pos] == key:
            return Quaternion.from_array(self.values[pos])
        return Quaternion()

    def is_hermitian(self) -> bool:
        """Exact structural check: entry(j, i) == conj(entry(i, j)) for every slot."""
        keys = self.rows * self.n + self.cols
        t_keys = self.cols * self.n + self.rows
        order = np.argsort(t_keys, kind='stable')
        if not np.array_equal(keys, t_keys[order]):
            return False
        return bool(np.array_equal(self.values, qconj(self.values[order])))

    def adjoint(self) -> 'QuatSparseOperator':
        return QuatSparseOperator(self.n, self.cols, self.rows, qconj(self.values))

    def to_real(self) -> sp.csr_matrix:
        """
        Real 4n x 4n representation (cached).

        Educational Note: Block (i, j) is left_blocks(A_ij). Because
        L(conj q) = L(q)^T, a hermitian quaternionic operator has a symmetric
        real representation and scipy's symmetric solvers apply.
        """
        if self._real is None:
            blocks = left_blocks(self.values)
            local = np.arange(4)
            r = (4 * self.rows)[:, None, None] + local[None, :, None]
            c = (4 * self.cols)[:, None, None] + local[None, None, :]
            r, c = np.broadcast_arrays(r, c)
            self._real = sp.csr_matrix(
                (blocks.reshape(-1), (r.reshape(-1), c.reshape(-1))),
                shape=(4 * self.n, 4 * self.n)
            )
        return self._real

    def to_dense(self) -> np.ndarray:
        return self.to_real().toarray()

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """Apply to a raw (n, 4) coefficient array, or a (p, n, 4) block."""
        v = np.asarray(v, dtype=float)
        if v.shape[-2:] != (self.n, 4):
            error_msg = f"Vector shape {v.shape} does not match operator dimension {self.n}"
            logger.error(error_msg)
            raise DimensionMismatchError(error_msg)
        if v.ndim == 2:
            return (self.to_real() @ v.reshape(-1)).reshape(self.n, 4)
        flat = v.reshape(v.shape[0], 4 * self.n).T
        return (self.to_real() @ flat).T.reshape(v.shape)

    def __repr__(self) -> str:
        return f"QuatSparseOperator(n={self.n}, nnz={self.nnz}, hermitian={self.is_self_adjoint})"


class QuatVector:
    """
    Quaternionic coefficient vector with a positive diagonal weight.

    Educational Note: The weighted inner product <v, u>_W = sum_i W_i conj(v_i) u_i
    is quaternion-valued. It is conjugate-linear in the first slot and
    right-linear in the second: <v, u alpha>_W = <v, u>_W alpha.
    """

    def __init__(self, values, weights=None):
        values = np.asarray(values, dtype=float)
        if values.ndim != 2 or values.shape[1] != 4:
            error_msg = f"QuatVector values must have shape (n, 4), got {values.shape}"
            logger.error(error_msg)
            raise DimensionMismatchError(error_msg)
        n = values.shape[0]
        weights = np.ones(n) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
        if weights.shape[0] != n:
            error_msg = f"Weight vector length {weights.shape[0]} != vector length {n}"
            logger.error(error_msg)
            raise DimensionMismatchError(error_msg)
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0.0):
            error_msg = "Weights must be strictly positive and finite"
            logger.error(error_msg)
            raise ValueError(error_msg)
        self.values = values
        self.weights = weights

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, i: int) -> Quaternion:
        return Quaternion.from_array(self.values[i])

    def inner(self, other: Union['QuatVector', np.ndarray]) -> Quaternion:
        other_values = other.values if isinstance(other, QuatVector) else np.asarray(other, dtype=float)
        if other_values.shape != self.values.shape:
            error_msg = f"Inner product of shapes {self.values.shape} and {other_values.shape}"
            logger.error(error_msg)
            raise DimensionMismatchError(error_msg)
        terms = qmul(qconj(self.values), other_values) * self.weights[:, None]
        return Quaternion.from_array(terms.sum(axis=0))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.weights * qnorm2(self.values))))

    def right_mul(self, alpha: Union[Quaternion, np.ndarray]) -> 'QuatVector':
        alpha_arr = alpha.to_array() if isinstance(alpha, Quaternion) else np.asarray(alpha, dtype=float)
        return QuatVector(qmul(self.values, alpha_arr), self.weights)

    def with_values(self, values) -> 'QuatVector':
        return QuatVector(values, self.weights)


def apply(A: QuatSparseOperator, v: QuatVector) -> QuatVector:
    """
    Apply A to v: (A v)_i = sum_j A_ij v_j, entries multiplying from the left.

    Raises:
        DimensionMismatchError: if len(v) != A.n
    """
    if len(v) != A.n:
        error_msg = f"Cannot apply operator of dimension {A.n} to vector of length {len(v)}"
        logger.error(error_msg)
        raise DimensionMismatchError(error_msg)
    return v.with_values(A.matvec(v.values))
