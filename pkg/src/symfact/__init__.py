"""Graph-regularized symmetric matrix factorization for clustering.

Factorizes M = A - lambda * (D - A) as H H^T with a column-wise splitting
solver or constrained projected gradient descent, and turns the factors
into cluster labels with matching metrics.
"""

from .clustering import (
    ClusteringReport,
    accuracy,
    assign_labels,
    evaluate_clustering,
    kmeans,
    nmi,
)
from .estimator import SymFactClustering
from .exceptions import (
    ConfigError,
    DegenerateRowError,
    InputDataError,
    NumericError,
    SingularMatrixError,
    SymfactError,
)
from .graph import RegularizedTarget, build_similarity, laplacian, regularized_target
from .linalg import ExtremeEigenvalues, extreme_eigenvalues, jacobi_eigh, polar_orthogonal_factor
from .solver import (
    Constraint,
    FactorPair,
    SolverConfig,
    SolveTrace,
    column_update,
    gradient,
    gradient_mapping_norm,
    lipschitz_constant,
    objective,
    penalty_lower_bound,
    project,
    solve_columnwise,
    solve_pgd,
    split_objective,
)

__version__ = "0.1.0"

__all__ = [
    "ClusteringReport",
    "ConfigError",
    "Constraint",
    "DegenerateRowError",
    "ExtremeEigenvalues",
    "FactorPair",
    "InputDataError",
    "NumericError",
    "RegularizedTarget",
    "SingularMatrixError",
    "SolveTrace",
    "SolverConfig",
    "SymFactClustering",
    "SymfactError",
    "accuracy",
    "assign_labels",
    "build_similarity",
    "column_update",
    "evaluate_clustering",
    "extreme_eigenvalues",
    "gradient",
    "gradient_mapping_norm",
    "jacobi_eigh",
    "kmeans",
    "laplacian",
    "lipschitz_constant",
    "nmi",
    "objective",
    "penalty_lower_bound",
    "polar_orthogonal_factor",
    "project",
    "regularized_target",
    "solve_columnwise",
    "solve_pgd",
    "split_objective",
    "__version__",
]
