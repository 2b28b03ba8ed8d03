"""Fuzzy c-means optimizer, FPC, sweep and canonical ordering."""

import numpy as np
import pytest

from cishtex.clustering import (FcmConfig, FuzzyPartition, canonicalize, fcm,
                                fpc, hard_assign, sweep_clusters)
from cishtex.errors import TooFewPoints


def two_blobs(seed=5, n=50, spread=0.05, centers=((0.0, 0.0), (10.0, 10.0))):
    rng = np.random.default_rng(seed)
    pts = np.vstack([rng.normal(c, spread, size=(n, 2)) for c in centers])
    return pts, np.asarray(centers, dtype=float)


class TestFcm:
    def test_two_blobs_recover_means(self):
        pts, _ = two_blobs()
        part = canonicalize(fcm(pts, FcmConfig(c=2, seed=42)))
        blob_means = np.vstack([pts[:50].mean(axis=0), pts[50:].mean(axis=0)])
        order = np.argsort(blob_means[:, 0])
        assert np.allclose(part.centroids, blob_means[order], atol=1e-3)
        own = np.concatenate([part.U[:50, order.tolist().index(0)],
                              part.U[50:, order.tolist().index(1)]])
        assert (own > 0.99).all()

    def test_identical_points_split_evenly(self):
        pts = np.tile([2.5, -1.0], (8, 1))
        part = fcm(pts, FcmConfig(c=2, seed=9))
        assert np.allclose(part.U, 0.5)
        assert np.allclose(part.centroids, [2.5, -1.0])
        assert part.objective == 0.0

    def test_perfect_fit_when_points_equal_clusters(self):
        pts = np.array([[0.0, 0.0], [5.0, 0.0], [0.0, 5.0]])
        part = fcm(pts, FcmConfig(c=3, seed=3))
        assert part.objective < 1e-6
        d = np.linalg.norm(pts[:, None, :] - part.centroids[None], axis=2)
        assert (d.min(axis=1) < 1e-3).all()

    def test_rows_sum_to_one_every_iteration(self):
        pts, _ = two_blobs(seed=8)
        seen = []

        def watch(u, _centroids, objective):
            assert np.abs(u.sum(axis=1) - 1.0).max() < 1e-9
            seen.append(objective)

        fcm(pts, FcmConfig(c=3, seed=4, n_init=2), on_iteration=watch)
        assert len(seen) > 2

    def test_objective_non_increasing(self):
        pts, _ = two_blobs(seed=10, spread=1.5)
        for seed in range(5):
            part = fcm(pts, FcmConfig(c=4, seed=seed, n_init=1))
            diffs = np.diff(part.objective_history)
            assert (diffs <= 0).all()

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            fcm(np.zeros((3, 2)), FcmConfig(c=4))

    def test_fixed_seed_bit_identical(self):
        pts, _ = two_blobs(seed=12, spread=1.0)
        a = fcm(pts, FcmConfig(c=3, seed=77))
        b = fcm(pts, FcmConfig(c=3, seed=77))
        assert np.array_equal(a.U, b.U)
        assert np.array_equal(a.centroids, b.centroids)
        assert a.objective == b.objective

    def test_config_validation(self):
        with pytest.raises(ValueError):
            FcmConfig(c=1)
        with pytest.raises(ValueError):
            FcmConfig(m=1.0)
        with pytest.raises(ValueError):
            FcmConfig(tol=0.0)


class TestFpc:
    def test_crisp_is_one(self):
        u = np.eye(4)[[0, 1, 2, 3, 0, 1]]
        assert fpc(u) == 1.0

    def test_uniform_is_inverse_c(self):
        u = np.full((10, 5), 0.2)
        assert fpc(u) == pytest.approx(0.2)

    def test_mixed_rows(self):
        u = np.array([[0.5, 0.5], [1.0, 0.0]])
        assert fpc(u) == pytest.approx(0.75)

    def test_bounds_on_random_matrices(self):
        rng = np.random.default_rng(60)
        for _ in range(200):
            n = int(rng.integers(2, 30))
            c = int(rng.integers(2, 11))
            u = rng.random((n, c))
            u /= u.sum(axis=1, keepdims=True)
            value = fpc(u)
            assert 1.0 / c <= value <= 1.0


class TestSweep:
    def test_two_blobs_peak_at_two(self):
        pts, _ = two_blobs(seed=5)
        entries = sweep_clusters(pts, FcmConfig(c=2, seed=1), (2, 10))
        assert [e.c for e in entries] == list(range(2, 11))
        best = max(entries, key=lambda e: e.fpc)
        assert best.c == 2

    def test_structureless_data_decreasing_trend(self):
        rng = np.random.default_rng(61)
        pts = rng.uniform(0, 1, size=(120, 2))
        entries = sweep_clusters(pts, FcmConfig(c=2, seed=2), (2, 10))
        by_c = {e.c: e.fpc for e in entries}
        assert by_c[2] > by_c[10]

    def test_single_count_matches_plain_call(self):
        pts, _ = two_blobs(seed=6, spread=0.8)
        cfg = FcmConfig(c=7, seed=33)
        entries = sweep_clusters(pts, cfg, (7, 7))
        direct = fcm(pts, cfg)
        assert len(entries) == 1
        assert entries[0].fpc == direct.fpc
        assert entries[0].objective == direct.objective

    def test_propagates_too_few_points(self):
        with pytest.raises(TooFewPoints):
            sweep_clusters(np.zeros((4, 2)), FcmConfig(c=2, seed=0), (2, 10))


class TestCanonicalize:
    def _partition(self, centroids, u):
        return FuzzyPartition(U=np.asarray(u, dtype=float),
                              centroids=np.asarray(centroids, dtype=float),
                              objective=1.25, fpc=0.5, iterations=3,
                              converged=True)

    def test_reorders_by_first_component(self):
        part = self._partition([[2.0, 0.0], [1.0, 0.0]],
                               [[0.9, 0.1], [0.2, 0.8]])
        canon = canonicalize(part)
        assert canon.centroids.tolist() == [[1.0, 0.0], [2.0, 0.0]]
        assert canon.U.tolist() == [[0.1, 0.9], [0.8, 0.2]]

    def test_idempotent(self):
        part = self._partition([[1.0, 5.0], [2.0, 0.0]], np.eye(2))
        once = canonicalize(part)
        twice = canonicalize(once)
        assert np.array_equal(once.centroids, twice.centroids)
        assert np.array_equal(once.U, twice.U)

    def test_tie_breaks_on_second_component(self):
        part = self._partition([[1.0, 5.0], [1.0, 3.0]], np.eye(2))
        canon = canonicalize(part)
        assert canon.centroids.tolist() == [[1.0, 3.0], [1.0, 5.0]]

    def test_preserves_objective_and_fpc_exactly(self):
        pts, _ = two_blobs(seed=7, spread=1.2)
        part = fcm(pts, FcmConfig(c=4, seed=21))
        canon = canonicalize(part)
        assert canon.objective == part.objective
        assert canon.fpc == part.fpc

    def test_hard_labels_follow_permutation(self):
        pts, _ = two_blobs(seed=14, spread=0.9)
        part = fcm(pts, FcmConfig(c=3, seed=5))
        canon = canonicalize(part)
        order = np.lexsort((part.centroids[:, 1], part.centroids[:, 0]))
        relabel = np.empty(3, dtype=int)
        relabel[order] = np.arange(3)
        assert np.array_equal(relabel[hard_assign(part)], hard_assign(canon))


class TestHardAssign:
    def test_argmax(self):
        part = FuzzyPartition(U=np.array([[0.1, 0.7, 0.2]]),
                              centroids=np.zeros((3, 2)), objective=0.0,
                              fpc=0.5, iterations=1, converged=True)
        assert hard_assign(part).tolist() == [1]

    def test_tie_takes_lowest_index(self):
        part = FuzzyPartition(U=np.array([[0.5, 0.5]]),
                              centroids=np.zeros((2, 2)), objective=0.0,
                              fpc=0.5, iterations=1, converged=True)
        assert hard_assign(part).tolist() == [0]

    def test_crisp_rows(self):
        u = np.eye(3)[[2, 0, 1]]
        part = FuzzyPartition(U=u, centroids=np.zeros((3, 2)), objective=0.0,
                              fpc=1.0, iterations=1, converged=True)
        assert hard_assign(part).tolist() == [2, 0, 1]
