"""Shared input checks for matrices and label vectors."""

import numpy as np

# Relative asymmetry tolerated before a matrix is rejected as non-symmetric.
SYMMETRY_RTOL = 1e-12


def check_matrix(X, name="X"):
    """Coerce to a 2-D float array with finite entries."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={X.ndim}")
    if X.size == 0:
        raise ValueError(f"{name} must be non-empty, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return X


def check_symmetric(S, name="S"):
    """Validate a square symmetric matrix and return it exactly symmetrized.

    Asymmetry up to ``SYMMETRY_RTOL`` times the largest entry magnitude is
    treated as rounding noise and averaged away; anything larger raises.
    """
    S = check_matrix(S, name)
    n, m = S.shape
    if n != m:
        raise ValueError(f"{name} must be square, got shape {S.shape}")
    scale = float(np.abs(S).max())
    asym = float(np.abs(S - S.T).max())
    if asym > SYMMETRY_RTOL * scale:
        raise ValueError(
            f"{name} is not symmetric: max |S - S^T| = {asym:.3e} "
            f"exceeds {SYMMETRY_RTOL:g} * max |entry| = {SYMMETRY_RTOL * scale:.3e}"
        )
    if asym > 0.0:
        S = (S + S.T) / 2.0
    return S


def check_factor(H, n=None, name="H"):
    """Validate a factor matrix with n rows and at least one column."""
    H = check_matrix(H, name)
    if n is not None and H.shape[0] != n:
        raise ValueError(f"{name} must have {n} rows, got {H.shape[0]}")
    return H


def check_rank(k, n, name="k"):
    """Validate a factorization rank against the matrix side length."""
    if not isinstance(k, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {type(k).__name__}")
    if not 1 <= k <= n:
        raise ValueError(f"{name} must satisfy 1 <= {name} <= {n}, got {k}")
    return int(k)


def check_labels(y, name="labels"):
    """Coerce to a 1-D array of non-negative integer labels."""
    y = np.asarray(y)
    if y.ndim != 1 or y.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D sequence")
    if not np.issubdtype(y.dtype, np.integer):
        ry = np.rint(y)
        if not np.array_equal(ry, y):
            raise ValueError(f"{name} must hold integers")
        y = ry
    y = y.astype(np.int64)
    if y.min() < 0:
        raise ValueError(f"{name} must be non-negative")
    return y
