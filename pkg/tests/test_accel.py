import numpy as np
import pytest

from semas import _accel
from semas.detect import if_fit


def test_backend_reports():
    assert _accel.backend() in ("numba", "numpy")


def test_dist_block_matches_reference():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(40, 7))
    B = rng.normal(size=(90, 7))
    got = _accel.sq_dist_block(A, B)
    ref = ((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=2)
    assert np.allclose(got, ref, atol=1e-9)


def test_numpy_fallback_forest_agrees_with_active_backend(small_blob):
    model = if_fit(small_blob, rho=0.3, n_trees=40, seed=5)
    X = np.ascontiguousarray(small_blob[:100])
    active = _accel.forest_path_sums(
        model.feature, model.threshold, model.left, model.right, model.adjust, model.roots, X
    )
    fallback = _accel._forest_path_sums_numpy(
        model.feature, model.threshold, model.left, model.right, model.adjust, model.roots, X
    )
    # identical traversal and accumulation order: bitwise equality
    assert np.array_equal(active, fallback)


def test_numpy_fallback_dist_agrees():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(30, 5))
    B = rng.normal(size=(50, 5))
    active = _accel.sq_dist_block(A, B)
    fallback = _accel._sq_dist_block_numpy(A, B)
    assert np.allclose(active, fallback, rtol=1e-9, atol=1e-9)


def test_empty_batch():
    model = if_fit(np.random.default_rng(2).normal(size=(50, 3)), rho=0.3, n_trees=10, seed=0)
    out = model.score_batch(np.zeros((0, 3)))
    assert out.shape == (0,)
