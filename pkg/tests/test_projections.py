"""Feasible-set projections: closed-form oracles and distance minimality."""

import numpy as np
import pytest

from symfact.exceptions import DegenerateRowError
from symfact.solver import Constraint, project


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def _feasible_points(kind, s, shape, rng, count=40):
    """Sample random feasible points for distance-minimality checks."""
    n, k = shape
    for _ in range(count):
        Y = rng.standard_normal(shape)
        if kind == "nonnegative":
            Y = np.abs(Y)
        elif kind == "unit_row_norm":
            Y /= np.linalg.norm(Y, axis=1, keepdims=True)
        elif kind == "row_sparsity":
            for i in range(n):
                drop = rng.choice(k, size=k - s, replace=False)
                Y[i, drop] = 0.0
        elif kind == "orthogonal":
            Y, _ = np.linalg.qr(Y)
        yield Y


def test_unconstrained_is_identity_copy(rng):
    H = rng.standard_normal((5, 2))
    stepped = rng.standard_normal((5, 2))
    out = project(H, Constraint("unconstrained"), stepped)
    np.testing.assert_array_equal(out, stepped)
    assert out is not stepped  # caller may mutate without aliasing


def test_nonnegative_is_entrywise_clip(rng):
    stepped = rng.standard_normal((6, 3))
    out = project(np.zeros((6, 3)), Constraint("nonnegative"), stepped)
    np.testing.assert_array_equal(out, np.maximum(stepped, 0.0))


def test_unit_row_norm_normalizes_rows(rng):
    stepped = rng.standard_normal((7, 3))
    out = project(np.ones((7, 3)) / np.sqrt(3), Constraint("unit_row_norm"), stepped)
    np.testing.assert_allclose(np.linalg.norm(out, axis=1), 1.0, atol=1e-12)
    # directions preserved
    for i in range(7):
        cos = out[i] @ stepped[i] / np.linalg.norm(stepped[i])
        assert cos == pytest.approx(1.0, abs=1e-12)


def test_unit_row_norm_keeps_previous_direction_for_zero_row(rng):
    H = rng.standard_normal((4, 2))
    H /= np.linalg.norm(H, axis=1, keepdims=True)
    stepped = rng.standard_normal((4, 2))
    stepped[2] = 0.0
    out = project(H, Constraint("unit_row_norm"), stepped)
    np.testing.assert_allclose(out[2], H[2], atol=1e-12)


def test_unit_row_norm_degenerate_row_raises():
    H = np.zeros((3, 2))
    stepped = np.zeros((3, 2))
    stepped[0] = [1.0, 0.0]
    stepped[1] = [0.0, 1.0]
    with pytest.raises(DegenerateRowError, match="2"):
        project(H, Constraint("unit_row_norm"), stepped)


def test_row_sparsity_keeps_largest_magnitudes():
    stepped = np.array([[3.0, -5.0, 1.0], [-2.0, 0.5, 2.0]])
    out = project(np.zeros((2, 3)), Constraint("row_sparsity", s=2), stepped)
    np.testing.assert_array_equal(out, [[3.0, -5.0, 0.0], [-2.0, 0.0, 2.0]])


def test_row_sparsity_tie_breaks_toward_lowest_column():
    stepped = np.array([[2.0, -2.0, 2.0]])
    out = project(np.zeros((1, 3)), Constraint("row_sparsity", s=2), stepped)
    np.testing.assert_array_equal(out, [[2.0, -2.0, 0.0]])


def test_orthogonal_gives_orthonormal_columns(rng):
    stepped = rng.standard_normal((8, 3))
    out = project(np.eye(8)[:, :3], Constraint("orthogonal"), stepped)
    np.testing.assert_allclose(out.T @ out, np.eye(3), atol=1e-12)


def test_orthogonal_rank_deficient_recovers_via_perturbation(rng):
    stepped = rng.standard_normal((6, 2))
    stepped[:, 1] = stepped[:, 0]  # exactly repeated column
    out = project(np.eye(6)[:, :2], Constraint("orthogonal"), stepped)
    np.testing.assert_allclose(out.T @ out, np.eye(2), atol=1e-10)


@pytest.mark.parametrize(
    "kind,s",
    [("nonnegative", None), ("unit_row_norm", None), ("row_sparsity", 2), ("orthogonal", None)],
)
def test_projection_minimizes_distance_to_feasible_set(kind, s, rng):
    shape = (6, 3)
    c = Constraint(kind, s=s)
    H_prev = np.linalg.qr(rng.standard_normal(shape))[0]
    stepped = rng.standard_normal(shape)
    out = project(H_prev, c, stepped)
    d_opt = np.linalg.norm(stepped - out)
    for Y in _feasible_points(kind, s, shape, rng):
        assert d_opt <= np.linalg.norm(stepped - Y) + 1e-10


def test_projections_are_idempotent(rng):
    shape = (5, 3)
    for kind, s in [("nonnegative", None), ("unit_row_norm", None),
                    ("row_sparsity", 2), ("orthogonal", None)]:
        c = Constraint(kind, s=s)
        H_prev = np.linalg.qr(rng.standard_normal(shape))[0]
        once = project(H_prev, c, rng.standard_normal(shape))
        twice = project(once, c, once)
        np.testing.assert_allclose(twice, once, atol=1e-12)
