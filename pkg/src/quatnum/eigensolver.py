"""
Quaternion Numerics - Smallest-Magnitude Eigenpairs of Hermitian Operators

Educational Focus: Dirac spinors are (near-)kernel vectors of a hermitian
quaternionic operator, so the pipeline only ever needs the few eigenvalues
closest to zero. We solve the generalized problem

    A psi = lambda W psi,   W = diag(weights) > 0

by shifted inverse subspace iteration on the real 4n x 4n representation:

1. factor (A - sigma W) once with scipy.sparse.linalg.splu
2. repeatedly solve against W X for a block X of quaternionic vectors
3. orthonormalize the block in the weighted quaternionic inner product
4. Rayleigh-Ritz on the small projected quaternionic matrix

Working with quaternionic (not real) vectors keeps the fourfold degeneracy of
the real representation out of the iteration. A block of several vectors
resolves degenerate kernels (dim ker > 1) without one-at-a-time deflation.

Residual contract: for every returned pair,
    ||W^-1 A psi - lambda psi||_W <= tol * ||psi||_W
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple
import logging
import sys

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

try:
    from src.utils.logger_factory import get_component_logger
    from src.utils.settings import get_setting
    logger = get_component_logger('quatnum')
except ImportError:
    logger = logging.getLogger(__name__)

    def get_setting(section, path, default):
        return default

from src.quatnum.quaternion import qmul, qconj, qnorm2, left_blocks
from src.quatnum.sparse_operator import QuatSparseOperator, DimensionMismatchError, NonHermitianError


class ConvergenceError(RuntimeError):
    """Inverse iteration did not reach the requested residual."""

    def __init__(self, message: str, last_residual: float, iterations: int):
        super().__init__(message)
        self.last_residual = last_residual
        self.iterations = iterations


@dataclass
class EigenPair:
    """
    One quaternionic eigenpair.

    Attributes:
        value: real eigenvalue (Rayleigh quotient)
        vector: (n, 4) eigenvector, normalized so ||psi||_W^2 = sum(W)
        residual: ||W^-1 A psi - value psi||_W / ||psi||_W
        imag_part: size of the imaginary part of the quaternionic Rayleigh quotient
    """
    value: float
    vector: np.ndarray
    residual: float
    imag_part: float

    def __iter__(self):
        # allows ``value, vector = smallest_eigenpair(...)``
        yield self.value
        yield self.vector


def _solver_defaults(tol, max_iter, seed):
    tol = float(get_setting('quatnum', 'eigensolver.tol', 1e-10)) if tol is None else float(tol)
    max_iter = int(get_setting('quatnum', 'eigensolver.max_iter', 1000)) if max_iter is None else int(max_iter)
    seed = int(get_setting('quatnum', 'eigensolver.seed', 0)) if seed is None else int(seed)
    if tol <= 0.0 or max_iter < 1:
        error_msg = f"Eigensolver needs tol > 0 and max_iter >= 1 (got {tol}, {max_iter})"
        logger.error(error_msg)
        raise ValueError(error_msg)
    return tol, max_iter, seed


def _check_inputs(A: QuatSparseOperator, weights) -> np.ndarray:
    if not A.is_hermitian():
        error_msg = f"Eigensolver requires a hermitian operator: {A!r}"
        logger.error(error_msg)
        raise NonHermitianError(error_msg)
    w = np.ones(A.n) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
    if w.shape[0] != A.n:
        error_msg = f"Weight vector length {w.shape[0]} != operator dimension {A.n}"
        logger.error(error_msg)
        raise DimensionMismatchError(error_msg)
    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        error_msg = "Eigensolver weights must be strictly positive and finite"
        logger.error(error_msg)
        raise ValueError(error_msg)
    return w


def _factorize(A: QuatSparseOperator, w: np.ndarray):
    """LU of A - sigma W; sigma = 0 unless A is exactly singular."""
    A_real = A.to_real().tocsc()
    W_real = sp.diags(np.repeat(w, 4))
    try:
        return spla.splu(A_real), 0.0
    except RuntimeError:
        singular_shift = float(get_setting('quatnum', 'eigensolver.singular_shift', 1e-8))
        scale = float(abs(A_real).max()) if A_real.nnz else 1.0
        sigma = -singular_shift * max(scale, 1.0) / float(w.max())
        logger.debug(f"Operator exactly singular, shifting by sigma={sigma:.3e}")
        return spla.splu((A_real - sigma * W_real).tocsc()), sigma


def _w_inner(w: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """<u, v>_W for (n, 4) arrays, quaternion valued."""
    return (qmul(qconj(u), v) * w[:, None]).sum(axis=0)


def _w_orthonormalize(X: np.ndarray, w: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    Modified Gram-Schmidt on a (p, n, 4) block in the weighted inner product.

    Two passes for stability; a vector that collapses is replaced by a random one.
    """
    X = X.copy()
    p = X.shape[0]
    for a in range(p):
        for _attempt in range(3):
            before = np.sqrt(np.sum(w * qnorm2(X[a])))
            for _pass in range(2):
                for b in range(a):
                    X[a] -= qmul(X[b], _w_inner(w, X[b], X[a]))
            after = np.sqrt(np.sum(w * qnorm2(X[a])))
            if after > 1e-10 * max(before, np.finfo(float).tiny):
                X[a] /= after
                break
            X[a] = rng.normal(size=X[a].shape)
        else:
            error_msg = "Could not complete an orthonormal block"
            logger.error(error_msg)
            raise ConvergenceError(error_msg, float('inf'), 0)
    return X


def _quaternionic_eigvecs(H: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decompose a small hermitian quaternionic matrix (p, p, 4).

    Educational Note: The real 4p x 4p representation repeats every
    eigenvalue four times. Walking its eigenvectors in ascending order and
    keeping only those that are quaternionically independent of the ones
    already kept yields p orthonormal quaternionic eigenvectors, even when
    quaternionic eigenvalues themselves are degenerate.

    Returns:
        (values (p,), coefficient vectors (p, p, 4) with row m the m-th eigenvector)
    """
    p = H.shape[0]
    blocks = left_blocks(H)  # (p, p, 4, 4)
    M = blocks.transpose(0, 2, 1, 3).reshape(4 * p, 4 * p)
    M = 0.5 * (M + M.T)
    values, vectors = scipy.linalg.eigh(M)

    kept_vals, kept = [], []
    for col in range(4 * p):
        v = vectors[:, col].reshape(p, 4).copy()
        for u in kept:
            v -= qmul(u, (qmul(qconj(u), v)).sum(axis=0))
        size = np.sqrt(np.sum(qnorm2(v)))
        if size > 0.5:
            kept.append(v / size)
            kept_vals.append(values[col])
            if len(kept) == p:
                break
    return np.asarray(kept_vals), np.asarray(kept)


def _rayleigh_ritz(A: QuatSparseOperator, X: np.ndarray):
    """Project A onto the W-orthonormal block X and rotate X to Ritz vectors."""
    AX = A.matvec(X)
    p = X.shape[0]
    H = np.empty((p, p, 4))
    for i in range(p):
        H[i] = qmul(qconj(X[i])[None, :, :], AX).sum(axis=1)
    theta, coeffs = _quaternionic_eigvecs(H)
    ritz = np.zeros_like(X)
    for m in range(p):
        ritz[m] = qmul(X, coeffs[m][:, None, :]).sum(axis=0)
    order = np.argsort(np.abs(theta), kind='stable')
    return theta[order], ritz[order]


def _residuals(A: QuatSparseOperator, w: np.ndarray, X: np.ndarray, theta: np.ndarray) -> np.ndarray:
    R = A.matvec(X) - theta[:, None, None] * w[None, :, None] * X
    num = np.sqrt(np.sum(qnorm2(R) / w[None, :], axis=1))
    den = np.sqrt(np.sum(qnorm2(X) * w[None, :], axis=1))
    return num / den


def _initial_block(n: int, p: int, rng: np.random.Generator, initial) -> np.ndarray:
    X = rng.normal(size=(p, n, 4))
    if initial is not None:
        init = np.asarray(initial, dtype=float)
        if init.ndim == 2:
            init = init[None]
        if init.shape[1:] != (n, 4):
            error_msg = f"Initial vectors of shape {init.shape[1:]} do not match dimension {n}"
            logger.error(error_msg)
            raise DimensionMismatchError(error_msg)
        m = min(p, init.shape[0])
        X[:m] = init[:m]
    return X


def _finalize(A, w, x, theta, residual) -> EigenPair:
    total = float(w.sum())
    norm = np.sqrt(np.sum(w * qnorm2(x)))
    x = x * (np.sqrt(total) / norm)
    quotient = qmul(qconj(x), A.matvec(x)).sum(axis=0) / total
    return EigenPair(
        value=float(theta),
        vector=x,
        residual=float(residual),
        imag_part=float(np.linalg.norm(quotient[1:]))
    )


def low_spectrum(A: QuatSparseOperator, weights=None, k: int = 1, tol: Optional[float] = None,
                 max_iter: Optional[int] = None, seed: Optional[int] = None,
                 initial=None) -> List[EigenPair]:
    """
    The k smallest-magnitude quaternionic eigenpairs of A psi = lambda W psi.

    Args:
        A: hermitian QuatSparseOperator
        weights: positive per-dof weights W (default all ones)
        k: number of eigenpairs, 1 <= k <= A.n
        tol: relative residual target (config ``quatnum.eigensolver.tol``)
        max_iter: iteration cap (config ``quatnum.eigensolver.max_iter``)
        seed: seed of the random starting block
        initial: optional (n, 4) or (m, n, 4) starting vectors

    Returns:
        List[EigenPair]: sorted by |value|, mutually W-orthogonal

    Raises:
        NonHermitianError: A fails the exact hermitian check
        ValueError: k outside 1..n, or bad weights
        ConvergenceError: residuals above tol after max_iter iterations
    """
    tol, max_iter, seed = _solver_defaults(tol, max_iter, seed)
    w = _check_inputs(A, weights)
    n = A.n
    if k < 1 or k > n:
        error_msg = f"Requested k={k} eigenpairs of a dimension-{n} operator"
        logger.error(error_msg)
        raise ValueError(error_msg)

    padding = int(get_setting('quatnum', 'eigensolver.block_padding', 4))
    p = min(n, k + max(k, padding))
    rng = np.random.default_rng(seed)
    lu, sigma = _factorize(A, w)
    logger.debug(f"Subspace iteration: n={n}, k={k}, block={p}, sigma={sigma:.3e}")

    X = _w_orthonormalize(_initial_block(n, p, rng, initial), w, rng)
    residuals = np.full(k, np.inf)
    for iteration in range(1, max_iter + 1):
        rhs = (X * w[None, :, None]).reshape(p, 4 * n).T
        Y = lu.solve(np.ascontiguousarray(rhs)).T.reshape(p, n, 4)
        X = _w_orthonormalize(Y, w, rng)
        theta, X = _rayleigh_ritz(A, X)
        residuals = _residuals(A, w, X[:k], theta[:k])
        if np.all(residuals <= tol):
            logger.debug(f"Converged after {iteration} iterations, eigenvalues {theta[:k]}")
            return [_finalize(A, w, X[m], theta[m], residuals[m]) for m in range(k)]

    error_msg = (f"Inverse iteration did not converge in {max_iter} iterations "
                 f"(last residual {residuals.max():.3e}, tol {tol:.1e})")
    logger.error(error_msg)
    raise ConvergenceError(error_msg, float(residuals.max()), max_iter)


def smallest_eigenpair(A: QuatSparseOperator, weights=None, tol: Optional[float] = None,
                       max_iter: Optional[int] = None, seed: Optional[int] = None,
                       initial=None) -> EigenPair:
    """
    Smallest-magnitude eigenpair of A psi = lambda W psi.

    Example:
        >>> A = QuatSparseOperator.diagonal([3.0, 1.0, 2.0])
        >>> value, vector = smallest_eigenpair(A)
        >>> round(value, 12)
        1.0
    """
    return low_spectrum(A, weights, k=1, tol=tol, max_iter=max_iter, seed=seed, initial=initial)[0]


if __name__ == "__main__":
    print("🌀 Quaternionic eigensolver demo")
    rng = np.random.default_rng(1)
    n = 8
    i, j = np.triu_indices(n)
    A = QuatSparseOperator.hermitian(n, i, j, rng.normal(size=(i.size, 4)))
    pairs = low_spectrum(A, k=3)
    dense = np.linalg.eigvalsh(A.to_dense())
    print(f"   iterative: {[round(p.value, 10) for p in pairs]}")
    print(f"   dense (every 4th, by |λ|): {sorted(dense, key=abs)[::4][:3]}")
