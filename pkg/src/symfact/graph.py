"""Similarity graphs: affinity matrices, the Laplacian, and the shifted
target matrix that folds a Laplacian smoothness penalty into the
factorization objective."""

from dataclasses import dataclass

import numpy as np

from .validation import check_matrix, check_symmetric

SIMILARITY_KINDS = ("inner_product", "cosine", "rbf")


def build_similarity(X, kind="inner_product", sigma=None):
    """Pairwise similarity matrix of the rows of X.

    kind is one of ``inner_product`` (X X^T), ``cosine`` (inner product of
    L2-normalized rows), or ``rbf`` (exp(-||x_i - x_j||^2 / (2 sigma^2)),
    sigma > 0 required).  Each unordered pair is computed once and mirrored,
    so the result is exactly symmetric.  Entries of either sign pass through
    unchanged.
    """
    X = check_matrix(X, "X")
    if kind == "rbf":
        if sigma is None or not sigma > 0.0:
            raise ValueError(f"rbf similarity needs sigma > 0, got {sigma}")
        n = X.shape[0]
        A = np.ones((n, n))
        for i in range(n):
            d2 = np.square(X[i + 1 :] - X[i]).sum(axis=1)
            w = np.exp(-d2 / (2.0 * sigma * sigma))
            A[i, i + 1 :] = w
            A[i + 1 :, i] = w
        return A
    if kind == "cosine":
        norms = np.linalg.norm(X, axis=1)
        zero = np.flatnonzero(norms == 0.0)
        if zero.size:
            raise ValueError(f"cosine similarity undefined for zero row {zero[0]}")
        X = X / norms[:, None]
    elif kind != "inner_product":
        raise ValueError(f"unknown similarity kind {kind!r}; choose from {SIMILARITY_KINDS}")
    G = X @ X.T
    return np.tril(G) + np.tril(G, -1).T


def laplacian(A):
    """Degree matrix and unnormalized Laplacian D - A of a symmetric affinity.

    Degrees are the plain row sums of A, diagonal included.
    """
    A = check_symmetric(A, "A")
    d = A.sum(axis=1)
    D = np.diag(d)
    return D, D - A


@dataclass(frozen=True)
class RegularizedTarget:
    """A similarity matrix bundled with its Laplacian and the shifted target
    M = A - lambda_reg * L that the solvers factorize."""

    A: np.ndarray
    D: np.ndarray
    L: np.ndarray
    lambda_reg: float
    M: np.ndarray


def regularized_target(A, lambda_reg=0.0):
    """Build the factorization target M = A - lambda_reg * (D - A)."""
    A = check_symmetric(A, "A")
    lambda_reg = float(lambda_reg)
    if not lambda_reg >= 0.0:
        raise ValueError(f"lambda_reg must be >= 0, got {lambda_reg}")
    D, L = laplacian(A)
    M = A - lambda_reg * L
    return RegularizedTarget(A=A, D=D, L=L, lambda_reg=lambda_reg, M=M)
