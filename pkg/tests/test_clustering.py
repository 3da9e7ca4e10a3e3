"""Label extraction, permutation-matched accuracy, NMI, and the k-means baseline."""

import itertools

import numpy as np
import pytest

from symfact.clustering import (
    _lloyd,
    accuracy,
    assign_labels,
    evaluate_clustering,
    kmeans,
    nmi,
)


# --- assign_labels ---


def test_assign_labels_examples():
    H = np.array([[0.9, 0.1], [-0.5, 0.2], [0.5, 0.5]])
    np.testing.assert_array_equal(assign_labels(H), [0, 1, 0])


def test_assign_labels_uses_signed_values_not_magnitudes():
    H = np.array([[-9.0, 0.1]])  # the big negative entry loses
    assert assign_labels(H)[0] == 1


def test_assign_labels_invariant_to_positive_row_scaling():
    rng = np.random.default_rng(0)
    H = rng.standard_normal((20, 4))
    scaled = H * rng.uniform(0.1, 10.0, size=(20, 1))
    np.testing.assert_array_equal(assign_labels(H), assign_labels(scaled))


# --- accuracy ---


def test_accuracy_identity_and_relabeled():
    truth = np.array([0, 1, 2, 0])
    ac, _ = accuracy(truth, truth)
    assert ac == 1.0
    relabeled = np.array([2, 0, 1, 2])  # 0->2, 1->0, 2->1
    ac, perm = accuracy(relabeled, truth)
    assert ac == 1.0
    assert perm[2] == 0 and perm[0] == 1 and perm[1] == 2


def test_accuracy_partial_overlap():
    pred = np.array([0, 0, 1, 1, 1])
    truth = np.array([0, 1, 1, 1, 0])
    ac, _ = accuracy(pred, truth)
    assert ac == pytest.approx(3.0 / 5.0)


def test_accuracy_pads_unequal_cluster_counts():
    pred = np.array([0, 1, 2, 3])  # four predicted clusters
    truth = np.array([0, 0, 1, 1])  # two true ones
    ac, perm = accuracy(pred, truth)
    assert ac == pytest.approx(0.5)
    assert sorted(perm) == [0, 1, 2, 3]  # still a bijection after padding


def _brute_force_accuracy(pred, truth):
    k = int(max(pred.max(), truth.max())) + 1
    best = 0
    for perm in itertools.permutations(range(k)):
        best = max(best, int(sum(perm[p] == t for p, t in zip(pred, truth))))
    return best / len(pred)


def test_accuracy_equals_brute_force_on_small_cases():
    rng = np.random.default_rng(1)
    for _ in range(20):
        k = int(rng.integers(2, 5))
        n = int(rng.integers(4, 30))
        pred = rng.integers(0, k, size=n)
        truth = rng.integers(0, k, size=n)
        ac, _ = accuracy(pred, truth)
        assert ac == pytest.approx(_brute_force_accuracy(pred, truth))


def test_accuracy_invariant_under_pred_relabeling():
    rng = np.random.default_rng(2)
    pred = rng.integers(0, 4, size=40)
    truth = rng.integers(0, 4, size=40)
    base, _ = accuracy(pred, truth)
    perm = np.array([2, 3, 1, 0])
    relabeled, _ = accuracy(perm[pred], truth)
    assert relabeled == pytest.approx(base)


def test_accuracy_rejects_length_mismatch():
    with pytest.raises(ValueError):
        accuracy(np.array([0, 1]), np.array([0, 1, 1]))


# --- nmi ---


def test_nmi_tagged_examples():
    truth = np.array([0, 1, 0, 1, 2, 2])
    assert nmi(truth, truth) == 1.0
    assert nmi(np.zeros(4, dtype=int), np.array([0, 0, 1, 1])) == 0.0
    assert nmi(np.array([0, 0, 1, 1]), np.array([0, 1, 0, 1])) == 0.0


def test_nmi_identical_single_cluster_partitions():
    assert nmi(np.zeros(3, dtype=int), np.zeros(3, dtype=int)) == 1.0


def test_nmi_permuted_labels_still_one():
    truth = np.array([0, 0, 1, 1, 2, 2])
    pred = np.array([2, 2, 0, 0, 1, 1])
    assert nmi(pred, truth) == 1.0


def test_nmi_symmetric_and_bounded():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(2, 40))
        a = rng.integers(0, 5, size=n)
        b = rng.integers(0, 3, size=n)
        v = nmi(a, b)
        assert 0.0 <= v <= 1.0
        assert abs(v - nmi(b, a)) <= 1e-12


def test_nmi_against_sklearn_reference():
    from sklearn.metrics import normalized_mutual_info_score

    rng = np.random.default_rng(4)
    for _ in range(10):
        n = int(rng.integers(5, 50))
        a = rng.integers(0, 4, size=n)
        b = rng.integers(0, 4, size=n)
        ref = normalized_mutual_info_score(a, b, average_method="geometric")
        assert nmi(a, b) == pytest.approx(ref, abs=1e-10)


# --- evaluate_clustering ---


def test_report_internally_consistent():
    rng = np.random.default_rng(5)
    pred = rng.integers(0, 3, size=30)
    truth = rng.integers(0, 3, size=30)
    rep = evaluate_clustering(pred, truth)
    assert rep.confusion.sum() == 30
    matched = sum(rep.confusion[p, rep.permutation[p]] for p in range(3))
    assert rep.ac == pytest.approx(matched / 30)
    assert sorted(rep.permutation) == [0, 1, 2]
    np.testing.assert_array_equal(rep.predicted, pred)


# --- kmeans ---


def test_kmeans_separated_blobs():
    rng = np.random.default_rng(6)
    X = np.vstack([rng.normal(0.0, 0.1, (15, 2)), rng.normal(50.0, 0.1, (15, 2))])
    truth = np.repeat([0, 1], 15)
    labels = kmeans(X, 2, seed=0)
    ac, _ = accuracy(labels, truth)
    assert ac == 1.0


def test_kmeans_k_one_and_k_n():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((8, 2))
    np.testing.assert_array_equal(kmeans(X, 1, seed=0), np.zeros(8, dtype=int))
    labels = kmeans(X, 8, seed=0)
    assert len(set(labels.tolist())) == 8  # every point its own cluster
    _, centers, wcss = _lloyd(X, 8, np.random.default_rng(0), 100)
    assert wcss[-1] == pytest.approx(0.0, abs=1e-20)


def test_kmeans_wcss_non_increasing():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((60, 3))
    _, _, wcss = _lloyd(X, 4, np.random.default_rng(3), 100)
    assert all(b <= a + 1e-9 for a, b in zip(wcss, wcss[1:]))


def test_kmeans_handles_duplicate_points_with_excess_clusters():
    # only two distinct locations but three clusters: the empty-cluster
    # re-seeding path runs every iteration and must still terminate cleanly
    X = np.array([[0.0, 0.0]] * 5 + [[10.0, 0.0]] * 5)
    labels = kmeans(X, 3, seed=0)
    assert labels.shape == (10,)
    assert set(labels.tolist()) <= {0, 1, 2}
    # both locations end up internally pure
    assert len(set(labels[:5].tolist())) == 1
    assert len(set(labels[5:].tolist())) == 1


def test_kmeans_deterministic_per_seed():
    rng = np.random.default_rng(9)
    X = rng.standard_normal((30, 2))
    np.testing.assert_array_equal(kmeans(X, 3, seed=5), kmeans(X, 3, seed=5))


def test_kmeans_rejects_bad_k():
    X = np.zeros((4, 2))
    with pytest.raises(ValueError):
        kmeans(X, 0)
    with pytest.raises(ValueError):
        kmeans(X, 5)
