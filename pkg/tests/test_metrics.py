import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from l0sr.errors import ConfigurationError, DimensionError
from l0sr.metrics import SsimConfig, jaccard, kmeans, kmeans_labels, otsu_binarize, psnr, ssim

from oracles import best_two_partition_1d, jaccard_loop, otsu_exhaustive, psnr_loop, ssim_loop

unit = st.floats(0.0, 1.0)


def test_psnr_examples(rng):
    x = rng.random((8, 8))
    assert psnr(x, x) == 99.0
    assert psnr(np.full((4, 4), 0.1), np.zeros((4, 4))) == pytest.approx(20.0, abs=1e-12)
    y = rng.random((8, 8))
    assert psnr(x, y) == pytest.approx(psnr_loop(x, y), abs=1e-9)
    with pytest.raises(DimensionError):
        psnr(x, x[:4])


@given(arrays(np.float64, (6, 6), elements=unit), arrays(np.float64, (6, 6), elements=unit))
def test_psnr_symmetric(a, b):
    assert psnr(a, b) == psnr(b, a)


def test_ssim_examples(rng):
    x = rng.random((32, 32))
    assert ssim(x, x) == 1.0
    noisy = x + 0.05 * rng.standard_normal(x.shape)
    assert ssim(noisy, x) < 1.0
    assert ssim(noisy, x) == pytest.approx(ssim_loop(noisy, x), abs=1e-9)
    assert ssim(noisy, x) == pytest.approx(ssim(x, noisy), abs=1e-12)
    with pytest.raises(ConfigurationError):
        ssim(x[:8, :8], noisy[:8, :8])


def test_ssim_window_normalized():
    assert SsimConfig().window().sum() == pytest.approx(1.0, abs=1e-15)


def test_jaccard_examples():
    a = np.zeros((3, 3), dtype=bool)
    a[0, :2] = a[1, :2] = True
    assert jaccard(a, a) == 1.0
    assert jaccard(a, ~a) == 0.0
    b = np.zeros((3, 3), dtype=bool)
    b[1, :2] = True
    b[2, :2] = True
    assert jaccard(a, b) == pytest.approx(2 / 6)
    assert jaccard(np.zeros((2, 2)), np.zeros((2, 2))) == 1.0
    assert jaccard(np.zeros((2, 2)), np.ones((2, 2))) == 0.0


@given(arrays(bool, (5, 5)), arrays(bool, (5, 5)))
def test_jaccard_symmetric_and_matches_loop(a, b):
    assert jaccard(a, b) == jaccard(b, a) == pytest.approx(jaccard_loop(a, b))
    assert (jaccard(a, b) == 1.0) == np.array_equal(a, b)


def test_otsu_examples(rng):
    x = np.where(rng.random((16, 16)) > 0.4, 0.9, 0.1)
    mask, thr = otsu_binarize(x)
    assert 0.1 < thr < 0.9
    np.testing.assert_array_equal(mask, x == 0.9)
    mask, thr = otsu_binarize(np.full((5, 5), 0.3))
    assert thr == 0.3 and not mask.any()


def test_otsu_matches_exhaustive_search(rng):
    for _ in range(3):
        x = rng.random((32, 32)) ** 2
        t, mask_ref = otsu_exhaustive(x)
        mask, thr = otsu_binarize(x)
        assert thr == pytest.approx((t + 0.5) / 255.0)
        np.testing.assert_array_equal(mask, mask_ref)


@given(arrays(np.float64, (6, 6), elements=unit), st.randoms(use_true_random=False))
def test_otsu_histogram_only(x, r):
    perm = list(range(36))
    r.shuffle(perm)
    y = x.ravel()[perm].reshape(6, 6)
    assert otsu_binarize(x)[1] == otsu_binarize(y)[1]


def test_kmeans_k1_is_mean(rng):
    x = rng.random((6, 6))
    res = kmeans(x, 1)
    assert np.all(res.labels == 0)
    assert res.centroids[0, 0] == pytest.approx(x.mean())


def test_kmeans_two_halves_is_optimal(rng):
    x = np.zeros((10, 10))
    x[:, 5:] = 1.0
    x += 0.02 * rng.standard_normal(x.shape)
    res = kmeans(x, 2, seed=3)
    labels = res.labels
    assert len(set(labels[:, :5].ravel())) == 1 and len(set(labels[:, 5:].ravel())) == 1
    assert labels[0, 0] != labels[0, 9]
    assert res.inertia_history[-1] == pytest.approx(best_two_partition_1d(x), rel=1e-12)


def test_kmeans_each_distinct_value_own_cluster():
    x = np.array([[0.1, 0.5, 0.9], [0.9, 0.5, 0.1]])
    res = kmeans(x, 3, seed=1)
    assert res.inertia_history[-1] == 0.0
    assert len(np.unique(res.labels)) == 3


def test_kmeans_errors_and_determinism(rng):
    with pytest.raises(ConfigurationError):
        kmeans(np.array([[0.0, 1.0]]), 3)
    x = rng.random((12, 12, 3))
    np.testing.assert_array_equal(kmeans_labels(x, 4, seed=7), kmeans_labels(x, 4, seed=7))


@given(st.integers(0, 2**31 - 1), st.integers(2, 5))
def test_kmeans_inertia_non_increasing(seed, k):
    x = np.random.default_rng(seed).random((8, 8))
    hist = kmeans(x, k, seed=seed).inertia_history
    assert all(b <= a * (1 + 1e-12) + 1e-15 for a, b in zip(hist, hist[1:]))
