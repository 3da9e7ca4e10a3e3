"""Solvers for min_H f(H) = ||M - H H^T||_F^2.

Two algorithms over a shared trace format: a column-wise splitting method
that relaxes the problem to min ||M - H P^T||_F^2 + mu ||H - P||_F^2 and
updates one column of H and P at a time, and projected gradient descent
with an adaptive stepsize t = 1/(2 L_i) over a pluggable constraint set.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateRowError, NumericError, SingularMatrixError
from .linalg import extreme_eigenvalues, jacobi_eigh, polar_orthogonal_factor
from .validation import check_factor, check_rank, check_symmetric

UNCONSTRAINED = "unconstrained"
NONNEGATIVE = "nonnegative"
UNIT_ROW_NORM = "unit_row_norm"
ROW_SPARSITY = "row_sparsity"
ORTHOGONAL = "orthogonal"
CONSTRAINT_KINDS = (UNCONSTRAINED, NONNEGATIVE, UNIT_ROW_NORM, ROW_SPARSITY, ORTHOGONAL)

# Seed for the one-shot perturbation used when the orthogonal projection
# hits a rank-deficient point.
_PERTURB_SEED = 4242

# Floor on the spectral scale of the random initialization.
_INIT_EPS = 1e-6


@dataclass(frozen=True)
class Constraint:
    """Feasible set for the projected-gradient solver.

    kind is one of ``unconstrained``, ``nonnegative`` (entrywise H >= 0),
    ``unit_row_norm`` (rows on the unit sphere), ``row_sparsity`` (at most
    ``s`` nonzeros per row), or ``orthogonal`` (H^T H = I).
    """

    kind: str = UNCONSTRAINED
    s: int | None = None

    def __post_init__(self):
        if self.kind not in CONSTRAINT_KINDS:
            raise ValueError(f"unknown constraint kind {self.kind!r}; choose from {CONSTRAINT_KINDS}")
        if self.kind == ROW_SPARSITY:
            if not isinstance(self.s, (int, np.integer)) or self.s < 1:
                raise ValueError(f"row_sparsity needs a positive integer s, got {self.s!r}")
            object.__setattr__(self, "s", int(self.s))
        elif self.s is not None:
            raise ValueError(f"constraint {self.kind!r} takes no sparsity level, got s={self.s!r}")

    def validate_shape(self, n, k):
        if self.kind == ROW_SPARSITY and self.s > k:
            raise ValueError(f"row_sparsity level s={self.s} exceeds k={k}")
        if self.kind == ORTHOGONAL and n < k:
            raise ValueError(f"orthogonal constraint needs n >= k, got n={n}, k={k}")


@dataclass
class SolverConfig:
    """Knobs shared by both solvers.

    mu_penalty is the splitting penalty; when None it is set per solve to
    mu_margin times the computed collapse bound.  step_size fixes the PGD
    stepsize when given; the default None means adaptive t = 1/(2 L_i).
    """

    mu_penalty: float | None = None
    mu_margin: float = 1.01
    max_iter: int = 1000
    rel_tol: float = 1e-8
    seed: int = 0
    nonneg_columns: bool = False
    step_size: float | None = None

    def __post_init__(self):
        if self.mu_penalty is not None and not self.mu_penalty > 0.0:
            raise ValueError(f"mu_penalty must be > 0, got {self.mu_penalty}")
        if not self.mu_margin > 1.0:
            raise ValueError(f"mu_margin must be > 1, got {self.mu_margin}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.rel_tol >= 0.0:
            raise ValueError(f"rel_tol must be >= 0, got {self.rel_tol}")
        if self.step_size is not None and not self.step_size > 0.0:
            raise ValueError(f"step_size must be > 0, got {self.step_size}")


@dataclass
class SolveTrace:
    """Per-iteration history of a solve.

    Record 0 describes the initial iterate.  Fields that do not apply to an
    algorithm (stepsize/lipschitz for the column-wise method, split_gap for
    PGD) hold None.  frozen_rows lists (iteration, row) pairs where the
    unit-row-norm projection had to keep the previous iterate's row.
    """

    algorithm: str
    objective: list = field(default_factory=list)
    rel_error: list = field(default_factory=list)
    stepsize: list = field(default_factory=list)
    lipschitz: list = field(default_factory=list)
    split_gap: list = field(default_factory=list)
    grad_norm: list = field(default_factory=list)
    wall_ms: list = field(default_factory=list)
    frozen_rows: list = field(default_factory=list)
    mu_penalty: float | None = None
    converged: bool = False

    @property
    def n_iter(self):
        return len(self.objective) - 1

    def _record(self, objective, rel_error, stepsize=None, lipschitz=None,
                split_gap=None, grad_norm=None, wall_ms=0.0):
        self.objective.append(objective)
        self.rel_error.append(rel_error)
        self.stepsize.append(stepsize)
        self.lipschitz.append(lipschitz)
        self.split_gap.append(split_gap)
        self.grad_norm.append(grad_norm)
        self.wall_ms.append(wall_ms)


@dataclass(frozen=True)
class FactorPair:
    """Output of the column-wise solver; P coincides with H at convergence."""

    H: np.ndarray
    P: np.ndarray


def objective(M, H):
    """f(H) = ||M - H H^T||_F^2."""
    M = check_symmetric(M)
    H = check_factor(H, n=M.shape[0])
    r = M - H @ H.T
    return float((r * r).sum())


def split_objective(M, H, P, mu):
    """||M - H P^T||_F^2 + mu ||H - P||_F^2, the relaxed two-factor objective."""
    M = check_symmetric(M)
    H = check_factor(H, n=M.shape[0])
    P = check_factor(P, n=M.shape[0], name="P")
    if H.shape != P.shape:
        raise ValueError(f"H and P must have the same shape, got {H.shape} and {P.shape}")
    if not mu > 0.0:
        raise ValueError(f"mu must be > 0, got {mu}")
    r = M - H @ P.T
    d = H - P
    return float((r * r).sum() + mu * (d * d).sum())


def gradient(M, H):
    """Gradient of f: 4 (H H^T H - M H)."""
    M = check_symmetric(M)
    H = check_factor(H, n=M.shape[0])
    return 4.0 * (H @ (H.T @ H) - M @ H)


def lipschitz_constant(M, H, tol=1e-10, max_iter=5000):
    """Local smoothness bound L = 4 sigma_max(H H^T - M) + 8 sigma_max(H^T H).

    sigma_max of the symmetric n x n term is max(|lambda_max|, |lambda_min|)
    from power iteration; the k x k Gram matrix is PSD so its sigma_max is
    its top eigenvalue, taken from the Jacobi solver.  tol and max_iter are
    forwarded to the power iteration.
    """
    M = check_symmetric(M)
    H = check_factor(H, n=M.shape[0])
    est = extreme_eigenvalues(H @ H.T - M, tol=tol, max_iter=max_iter)
    sig1 = max(abs(est.lambda_max), abs(est.lambda_min))
    vals, _ = jacobi_eigh(H.T @ H)
    sig2 = max(float(vals[0]), 0.0)
    return 4.0 * sig1 + 8.0 * sig2


def penalty_lower_bound(M, H0, P0):
    """Splitting penalty above which H = P at every critical point.

    Returns (||M||_F + ||M - H0 P0^T||_F - lambda_min(M)) / 2 using the
    power-iteration estimate of lambda_min.  If that estimate did not
    converge, falls back to the conservative variant that adds the largest
    eigenvalue magnitude instead of subtracting lambda_min.
    """
    M = check_symmetric(M)
    H0 = check_factor(H0, n=M.shape[0], name="H0")
    P0 = check_factor(P0, n=M.shape[0], name="P0")
    if H0.shape != P0.shape or not np.array_equal(H0, P0):
        raise ValueError("the collapse bound requires P0 = H0")
    fro = float(np.linalg.norm(M))
    resid = float(np.linalg.norm(M - H0 @ P0.T))
    est = extreme_eigenvalues(M)
    if est.converged:
        return 0.5 * (fro + resid - est.lambda_min)
    t = max(abs(est.lambda_max), abs(est.lambda_min))
    return 0.5 * (fro + resid + t)


def column_update(M_bar, p, mu, nonneg=False):
    """Closed-form single-column update h = (M_bar + mu I) p / (||p||^2 + mu).

    Minimizes ||M_bar - h p^T||_F^2 + mu ||h - p||^2 over h; the denominator
    is strictly positive so the minimizer is unique.  With nonneg, the result
    is clipped entrywise at zero afterward.
    """
    M_bar = np.asarray(M_bar, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if M_bar.ndim != 2 or M_bar.shape[0] != M_bar.shape[1]:
        raise ValueError(f"M_bar must be square, got shape {M_bar.shape}")
    if p.ndim != 1 or p.shape[0] != M_bar.shape[0]:
        raise ValueError(f"p must be a length-{M_bar.shape[0]} vector, got shape {p.shape}")
    if not mu > 0.0:
        raise ValueError(f"mu must be > 0, got {mu}")
    h = (M_bar @ p + mu * p) / (float(p @ p) + mu)
    if nonneg:
        h = np.maximum(h, 0.0)
    return h


def _initial_factor(M, k, seed):
    # Entries i.i.d. uniform(0,1), scaled so H0 H0^T matches M's top
    # eigenvalue magnitude.
    est = extreme_eigenvalues(M)
    scale = np.sqrt(max(est.lambda_max, _INIT_EPS) / k)
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 1.0, size=(M.shape[0], k)) * scale


def solve_columnwise(M, k, cfg=None):
    """Column-wise splitting solver (FactorPair, SolveTrace).

    Starts from H0 = P0 drawn from cfg.seed.  Each sweep visits columns in
    order; for column i the residual M_bar = M - sum_{j != i} h_j p_j^T is
    maintained incrementally with two rank-1 updates, then h_i and p_i take
    closed-form turns (the p step reuses the fresh h_i).  Stops when the
    split objective's change drops to rel_tol * (1 + f0) or at max_iter
    sweeps.
    """
    M = check_symmetric(M)
    n = M.shape[0]
    k = check_rank(k, n)
    cfg = cfg or SolverConfig()
    H = _initial_factor(M, k, cfg.seed)
    P = H.copy()
    if cfg.mu_penalty is not None:
        mu = float(cfg.mu_penalty)
    else:
        mu = cfg.mu_margin * penalty_lower_bound(M, H, P)
    norm_m_sq = float((M * M).sum())
    denom = norm_m_sq if norm_m_sq > 0.0 else 1.0
    R = M - H @ P.T
    f = float((R * R).sum())  # H = P initially, so no penalty term
    f0 = f
    trace = SolveTrace(algorithm="columnwise", mu_penalty=mu)
    trace._record(objective=f, rel_error=f / denom, split_gap=0.0)
    for _ in range(cfg.max_iter):
        t0 = time.perf_counter()
        for i in range(k):
            M_bar = R + np.outer(H[:, i], P[:, i])
            h_new = column_update(M_bar, P[:, i], mu, cfg.nonneg_columns)
            p_new = column_update(M_bar, h_new, mu, cfg.nonneg_columns)
            H[:, i] = h_new
            P[:, i] = p_new
            R = M_bar - np.outer(h_new, p_new)
        d = H - P
        gap_sq = float((d * d).sum())
        f_new = float((R * R).sum() + mu * gap_sq)
        if not np.isfinite(f_new):
            raise NumericError(f"split objective became non-finite at sweep {trace.n_iter + 1}")
        r = M - H @ H.T
        trace._record(
            objective=f_new,
            rel_error=float((r * r).sum()) / denom,
            split_gap=np.sqrt(gap_sq),
            wall_ms=(time.perf_counter() - t0) * 1e3,
        )
        if abs(f - f_new) <= cfg.rel_tol * (1.0 + f0):
            trace.converged = True
            break
        f = f_new
    return FactorPair(H=H, P=P), trace


def project(H, c, stepped):
    """Project a candidate iterate onto the feasible set of ``c``.

    H is the current (feasible) iterate, used only by the unit-row-norm
    fallback: a zero row in ``stepped`` cannot be normalized, so the
    previous row is kept; if that row is zero too the point is degenerate.
    A rank-deficient orthogonal projection is retried once after a tiny
    seeded perturbation.
    """
    H = check_factor(H)
    stepped = check_factor(stepped, n=H.shape[0], name="stepped")
    if stepped.shape != H.shape:
        raise ValueError(f"H and stepped must have the same shape, got {H.shape} and {stepped.shape}")
    c.validate_shape(*H.shape)
    if c.kind == UNCONSTRAINED:
        return stepped.copy()
    if c.kind == NONNEGATIVE:
        return np.maximum(stepped, 0.0)
    if c.kind == UNIT_ROW_NORM:
        norms = np.linalg.norm(stepped, axis=1)
        zero = norms == 0.0
        out = stepped / np.where(zero, 1.0, norms)[:, None]
        if zero.any():
            prev = H[zero]
            prev_norms = np.linalg.norm(prev, axis=1)
            if np.any(prev_norms == 0.0):
                row = int(np.flatnonzero(zero)[np.flatnonzero(prev_norms == 0.0)[0]])
                raise DegenerateRowError(f"row {row} is zero and has no previous direction to keep")
            out[zero] = prev / prev_norms[:, None]
        return out
    if c.kind == ROW_SPARSITY:
        order = np.argsort(-np.abs(stepped), axis=1, kind="stable")
        keep = order[:, : c.s]
        rows = np.arange(stepped.shape[0])[:, None]
        out = np.zeros_like(stepped)
        out[rows, keep] = stepped[rows, keep]
        return out
    try:
        return polar_orthogonal_factor(stepped)
    except SingularMatrixError:
        rng = np.random.default_rng(_PERTURB_SEED)
        # the blend must lift the smallest singular value above the polar
        # factor's 1e-12 relative eigenvalue cutoff on B^T B, so the noise is
        # 1e-4 of the matrix scale rather than infinitesimal; the ill
        # conditioning then costs ~1e-8 of orthonormality, which a second
        # polar pass on the nearly orthonormal result removes
        perturbed = stepped + 1e-4 * np.linalg.norm(stepped) * rng.standard_normal(stepped.shape)
        return polar_orthogonal_factor(polar_orthogonal_factor(perturbed))


def gradient_mapping_norm(M, H, H_next, t):
    """Stationarity surrogate ||(H - H_next) / t||_F for a step of size t."""
    H = check_factor(H)
    H_next = check_factor(H_next, n=H.shape[0], name="H_next")
    if H.shape != H_next.shape:
        raise ValueError(f"H and H_next must have the same shape, got {H.shape} and {H_next.shape}")
    if not t > 0.0:
        raise ValueError(f"t must be > 0, got {t}")
    return float(np.linalg.norm((H - H_next) / t))


# Power-iteration settings used inside the PGD loop, where the Lipschitz
# estimate is recomputed every iteration and full-precision eigenvalues
# would dominate the runtime.  The stepsize rule tolerates a slightly
# rough L_i, so the tolerance is much looser than the public default.
_PGD_EIG_RTOL = 3e-7
_PGD_EIG_MAX_ITER = 120


def solve_pgd(M, k, c=None, cfg=None):
    """Projected gradient descent (H, SolveTrace).

    H0 is drawn from cfg.seed and projected once so every iterate is
    feasible.  Each iteration takes H <- project(H - t grad f(H)) with
    t = 1/(2 L_i), recomputing the Lipschitz estimate L_i at the current
    iterate; cfg.step_size switches to that fixed t instead.  Stops when
    the objective change drops to rel_tol * (1 + f0) or at max_iter.

    The trace's grad_norm[j] holds ||grad f(H_j)||_F for every recorded
    iterate, including the last one.
    """
    M = check_symmetric(M)
    n = M.shape[0]
    k = check_rank(k, n)
    c = c or Constraint()
    cfg = cfg or SolverConfig()
    c.validate_shape(n, k)
    H0 = _initial_factor(M, k, cfg.seed)
    H = project(H0, c, H0)
    norm_m_sq = float((M * M).sum())
    denom = norm_m_sq if norm_m_sq > 0.0 else 1.0
    eig_tol = _PGD_EIG_RTOL * max(1.0, np.sqrt(norm_m_sq))
    f = objective(M, H)
    f0 = f
    trace = SolveTrace(algorithm="pgd")
    trace._record(objective=f, rel_error=f / denom)
    for _ in range(cfg.max_iter):
        t0 = time.perf_counter()
        g = gradient(M, H)
        trace.grad_norm[-1] = float(np.linalg.norm(g))
        if cfg.step_size is not None:
            t = float(cfg.step_size)
            L = None
        else:
            L = lipschitz_constant(M, H, tol=eig_tol, max_iter=_PGD_EIG_MAX_ITER)
            if L <= 0.0:  # only for M = 0, H = 0, which is already stationary
                trace.converged = True
                break
            t = 1.0 / (2.0 * L)
        stepped = H - t * g
        if c.kind == UNIT_ROW_NORM:
            for row in np.flatnonzero(~stepped.any(axis=1)):
                trace.frozen_rows.append((trace.n_iter + 1, int(row)))
        H = project(H, c, stepped)
        f_new = objective(M, H)
        if not np.isfinite(f_new):
            raise NumericError(f"objective became non-finite at iteration {trace.n_iter + 1}")
        trace._record(
            objective=f_new,
            rel_error=f_new / denom,
            stepsize=t,
            lipschitz=L,
            wall_ms=(time.perf_counter() - t0) * 1e3,
        )
        if abs(f - f_new) <= cfg.rel_tol * (1.0 + f0):
            trace.converged = True
            f = f_new
            break
        f = f_new
    if trace.grad_norm[-1] is None:
        trace.grad_norm[-1] = float(np.linalg.norm(gradient(M, H)))
    return H, trace
