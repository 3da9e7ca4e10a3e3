"""scikit-learn estimator facade over the factorization pipeline."""

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .clustering import assign_labels
from .graph import SIMILARITY_KINDS, build_similarity, regularized_target
from .solver import (
    UNCONSTRAINED,
    NONNEGATIVE,
    Constraint,
    SolverConfig,
    solve_columnwise,
    solve_pgd,
)
from .validation import check_symmetric


class SymFactClustering(ClusterMixin, BaseEstimator):
    """Cluster samples by symmetric factorization of a similarity matrix.

    The similarity matrix A built from X (or passed precomputed) is shifted
    by the graph Laplacian, M = A - lambda_reg * (D - A), and factorized as
    M ~ H H^T with n_clusters columns; labels are the signed row-wise argmax
    of H.

    Parameters
    ----------
    n_clusters : int, default=2
        Number of factor columns / clusters.
    similarity : {"inner_product", "cosine", "rbf", "precomputed"}, default="inner_product"
        How to turn X into the symmetric affinity A.  With "precomputed",
        X itself is taken as A.
    rbf_sigma : float, default=1.0
        Bandwidth of the rbf similarity; ignored otherwise.
    lambda_reg : float, default=0.0
        Weight of the Laplacian smoothness term folded into M.
    algorithm : {"columnwise", "pgd"}, default="columnwise"
        Column-wise splitting solver or projected gradient descent.
    constraint : str, default="unconstrained"
        Feasible set for the pgd solver ("unconstrained", "nonnegative",
        "unit_row_norm", "row_sparsity", "orthogonal").  The columnwise
        solver accepts only "unconstrained" or "nonnegative"; the latter
        maps to its nonnegative column updates.
    sparsity : int, default=None
        Per-row nonzero budget for the row_sparsity constraint.
    mu_penalty : float, default=None
        Splitting penalty for the columnwise solver; None selects
        mu_margin times the computed collapse bound.
    mu_margin : float, default=1.01
    max_iter : int, default=1000
    rel_tol : float, default=1e-8
    random_state : int, default=0
        Seed for the factor initialization.

    Attributes
    ----------
    labels_ : ndarray of shape (n_samples,)
    factors_ : ndarray of shape (n_samples, n_clusters)
        The fitted H.
    target_ : RegularizedTarget
        A, D, L, and M actually factorized.
    trace_ : SolveTrace
        Per-iteration solver history.
    mu_used_ : float or None
        Splitting penalty in effect (None for pgd).
    n_iter_ : int
    """

    def __init__(self, n_clusters=2, similarity="inner_product", rbf_sigma=1.0,
                 lambda_reg=0.0, algorithm="columnwise", constraint="unconstrained",
                 sparsity=None, mu_penalty=None, mu_margin=1.01, max_iter=1000,
                 rel_tol=1e-8, random_state=0):
        self.n_clusters = n_clusters
        self.similarity = similarity
        self.rbf_sigma = rbf_sigma
        self.lambda_reg = lambda_reg
        self.algorithm = algorithm
        self.constraint = constraint
        self.sparsity = sparsity
        self.mu_penalty = mu_penalty
        self.mu_margin = mu_margin
        self.max_iter = max_iter
        self.rel_tol = rel_tol
        self.random_state = random_state

    def fit(self, X, y=None):
        """Build the similarity target from X and factorize it.

        X is (n_samples, n_features), or the symmetric affinity itself when
        similarity="precomputed".  y is ignored.
        """
        X = check_array(X, dtype=np.float64)
        if self.similarity == "precomputed":
            A = check_symmetric(X, "X")
        elif self.similarity in SIMILARITY_KINDS:
            sigma = self.rbf_sigma if self.similarity == "rbf" else None
            A = build_similarity(X, self.similarity, sigma=sigma)
        else:
            raise ValueError(
                f"similarity must be 'precomputed' or one of {SIMILARITY_KINDS}, "
                f"got {self.similarity!r}"
            )
        target = regularized_target(A, self.lambda_reg)
        cfg = SolverConfig(
            mu_penalty=self.mu_penalty,
            mu_margin=self.mu_margin,
            max_iter=self.max_iter,
            rel_tol=self.rel_tol,
            seed=self.random_state,
            nonneg_columns=self.constraint == NONNEGATIVE,
        )
        if self.algorithm == "columnwise":
            if self.constraint not in (UNCONSTRAINED, NONNEGATIVE):
                raise ValueError(
                    f"columnwise supports only 'unconstrained' or 'nonnegative' "
                    f"constraints, got {self.constraint!r}"
                )
            pair, trace = solve_columnwise(target.M, self.n_clusters, cfg)
            H = pair.H
        elif self.algorithm == "pgd":
            c = Constraint(self.constraint,
                           s=self.sparsity if self.constraint == "row_sparsity" else None)
            H, trace = solve_pgd(target.M, self.n_clusters, c, cfg)
        else:
            raise ValueError(f"algorithm must be 'columnwise' or 'pgd', got {self.algorithm!r}")
        self.target_ = target
        self.factors_ = H
        self.trace_ = trace
        self.mu_used_ = trace.mu_penalty
        self.n_iter_ = trace.n_iter
        self.labels_ = assign_labels(H)
        return self

    def fit_predict(self, X, y=None):
        """Fit and return the cluster labels."""
        return self.fit(X).labels_

    def transform(self, X=None):
        """Return the fitted factor matrix H (rows score cluster affinity)."""
        check_is_fitted(self, "factors_")
        return self.factors_
