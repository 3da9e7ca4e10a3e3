"""Dense symmetric eigen-primitives.

Power iteration with a spectral shift for the extreme eigenvalues, a cyclic
Jacobi eigensolver for small symmetric matrices, and the orthogonal polar
factor built on top of it.
"""

import math
from typing import NamedTuple

import numpy as np

from .exceptions import SingularMatrixError
from .validation import check_factor, check_symmetric

# Fixed seed for the power-iteration start vector, so repeated calls on the
# same matrix give bitwise-identical results.
_START_SEED = 1729

# Off-diagonal mass threshold for the Jacobi sweep, relative to ||S||_F.
_JACOBI_RTOL = 1e-14
_JACOBI_MAX_SWEEPS = 60

# Relative eigenvalue cutoff below which a cross-product matrix is treated
# as rank deficient.
_POLAR_RANK_RTOL = 1e-12


class ExtremeEigenvalues(NamedTuple):
    lambda_max: float
    lambda_min: float
    converged: bool


def _power_rayleigh(matvec, v0, tol, max_iter):
    """Largest eigenvalue of a PSD operator by power iteration.

    Returns the last Rayleigh quotient and whether its change dropped to
    ``tol`` within ``max_iter`` iterations.
    """
    x = v0 / np.linalg.norm(v0)
    lam = None
    for _ in range(max_iter):
        y = matvec(x)
        lam_new = float(x @ y)  # Rayleigh quotient; x is unit-norm
        ny = math.sqrt(float(y @ y))
        if ny == 0.0:
            # x sits in the null space; with a random start this only
            # happens for the zero operator, whose top eigenvalue is 0.
            return 0.0, True
        if lam is not None and abs(lam_new - lam) <= tol:
            return lam_new, True
        lam = lam_new
        x = y / ny
    return 0.0 if lam is None else lam, False


def extreme_eigenvalues(S, tol=1e-10, max_iter=5000):
    """Estimate the largest and smallest eigenvalue of a symmetric matrix.

    Both extremes are found with power iteration after shifting the spectrum
    into the non-negative range: with c = max_i sum_j |S_ij| (a Gershgorin
    bound on |lambda|), S + cI yields lambda_max + c and cI - S yields
    c - lambda_min.  Iteration stops once the Rayleigh quotient changes by
    at most ``tol``; ``converged`` reports whether both runs stopped early.
    """
    S = check_symmetric(S)
    n = S.shape[0]
    c = float(np.abs(S).sum(axis=1).max())
    rng = np.random.default_rng(_START_SEED)
    v0 = rng.uniform(-1.0, 1.0, size=n)
    if not np.any(v0):  # n-independent guard; uniform draw is never all zero
        v0[0] = 1.0
    hi, ok_hi = _power_rayleigh(lambda x: S @ x + c * x, v0, tol, max_iter)
    lo, ok_lo = _power_rayleigh(lambda x: c * x - S @ x, v0, tol, max_iter)
    lam_max = hi - c
    lam_min = c - lo
    if lam_min > lam_max:  # can only happen through unconverged estimates
        lam_max, lam_min = lam_min, lam_max
    return ExtremeEigenvalues(lam_max, lam_min, ok_hi and ok_lo)


def jacobi_eigh(S):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Sweeps rotate away each off-diagonal pair in turn until the off-diagonal
    Frobenius mass falls below 1e-14 * ||S||_F.  Returns eigenvalues in
    descending order (stable under ties) and the matching orthonormal
    eigenvector columns.
    """
    A = check_symmetric(S).copy()
    n = A.shape[0]
    V = np.eye(n)
    fro = float(np.linalg.norm(A))
    thresh = _JACOBI_RTOL * fro
    # Entries below this are zeroed without a rotation; the skipped mass over
    # a full sweep stays within the stopping threshold.
    skip = thresh / max(n, 1)
    off_part = np.empty_like(A)
    for _ in range(_JACOBI_MAX_SWEEPS):
        # summing only off-diagonal squares; fro^2 minus the diagonal mass
        # would cancel catastrophically near convergence
        np.copyto(off_part, A)
        np.fill_diagonal(off_part, 0.0)
        if float(np.linalg.norm(off_part)) <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= skip:
                    A[p, q] = A[q, p] = 0.0
                    continue
                app, aqq = A[p, p], A[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                A[p, :] = A[:, p]
                A[q, :] = A[:, q]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    vals = np.diag(A).copy()
    order = np.argsort(-vals, kind="stable")
    return vals[order], V[:, order]


def polar_orthogonal_factor(B):
    """Orthogonal polar factor of a full-column-rank matrix.

    For B with SVD U diag(sigma) V^T this is U V^T, the closest matrix with
    orthonormal columns in Frobenius norm.  Computed from the eigensystem of
    B^T B; raises SingularMatrixError when that matrix is rank deficient
    (smallest eigenvalue at most 1e-12 times the largest).
    """
    B = check_factor(B, name="B")
    n, k = B.shape
    if n < k:
        raise ValueError(f"B must have at least as many rows as columns, got {B.shape}")
    G = B.T @ B
    G = (G + G.T) / 2.0
    vals, V = jacobi_eigh(G)
    if vals[0] <= 0.0 or vals[-1] <= _POLAR_RANK_RTOL * vals[0]:
        raise SingularMatrixError(
            "matrix is numerically rank deficient: eigenvalues of B^T B span "
            f"[{vals[-1]:.3e}, {vals[0]:.3e}]"
        )
    return B @ ((V / np.sqrt(vals)) @ V.T)
