"""Numerical core: standardization, Jacobi eigendecomposition, PCA, k-means.

np.linalg.eigh serves as the independent eigenvalue oracle; the in-repo
Jacobi path must agree with it to 1e-9. The k-means global-optimum check
enumerates every partition, so it stays on tiny inputs.
"""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from scenex.numerics import (
    EIGENVALUE_CLAMP,
    kmeans,
    pca_reduce,
    standardize,
    sym_eigen,
)


def _random_sym(rng, n, scale=1.0):
    m = rng.normal(size=(n, n)) * scale
    return (m + m.T) / 2.0


# ---------------------------------------------------------------- standardize


def test_standardize_basic_statistics():
    rng = np.random.default_rng(0)
    x = rng.normal(loc=3.0, scale=2.5, size=(40, 6))
    std = standardize(x)
    assert np.max(np.abs(std.values.mean(axis=0))) < 1e-12
    assert np.max(np.abs(std.values.std(axis=0) - 1.0)) < 1e-12
    assert not std.zero_variance.any()
    assert np.allclose(std.col_means, x.mean(axis=0))
    assert np.allclose(std.col_stds, x.std(axis=0))


def test_standardize_zero_variance_column():
    x = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    std = standardize(x)
    assert std.zero_variance.tolist() == [False, True]
    assert np.array_equal(std.values[:, 1], np.zeros(3))


def test_standardize_rejects_bad_input():
    with pytest.raises(ValueError):
        standardize(np.empty((0, 3)))
    with pytest.raises(ValueError):
        standardize(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        standardize(np.array([[1.0, np.inf], [2.0, 3.0]]))


# ------------------------------------------------------------------ sym_eigen


def test_sym_eigen_matches_library_oracle():
    rng = np.random.default_rng(1)
    for n in (1, 2, 3, 8, 20):
        a = _random_sym(rng, n)
        eig = sym_eigen(a)
        want = np.sort(np.linalg.eigh(a)[0])[::-1]
        assert np.max(np.abs(eig.eigenvalues - want)) < 1e-9
        # residual and orthonormality
        r = a @ eig.eigenvectors - eig.eigenvectors * eig.eigenvalues
        assert np.max(np.abs(r)) < 1e-9
        assert np.max(np.abs(eig.eigenvectors.T @ eig.eigenvectors - np.eye(n))) < 1e-9


def test_sym_eigen_descending_order_and_sign_convention():
    rng = np.random.default_rng(2)
    a = _random_sym(rng, 7)
    eig = sym_eigen(a)
    assert np.all(np.diff(eig.eigenvalues) <= 1e-15)
    for k in range(7):
        col = eig.eigenvectors[:, k]
        assert col[int(np.argmax(np.abs(col)))] > 0.0


def test_sym_eigen_deterministic():
    rng = np.random.default_rng(3)
    a = _random_sym(rng, 9)
    e1 = sym_eigen(a)
    e2 = sym_eigen(a)
    assert np.array_equal(e1.eigenvalues, e2.eigenvalues)
    assert np.array_equal(e1.eigenvectors, e2.eigenvectors)


def test_sym_eigen_rejects_bad_input():
    with pytest.raises(ValueError):
        sym_eigen(np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]))
    with pytest.raises(ValueError):
        sym_eigen(np.array([[1.0, 2.0], [0.5, 1.0]]))  # asymmetric
    with pytest.raises(ValueError):
        sym_eigen(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_sym_eigen_handles_repeated_eigenvalues():
    a = np.eye(4) * 2.0
    eig = sym_eigen(a)
    assert np.allclose(eig.eigenvalues, 2.0)
    assert np.max(np.abs(eig.eigenvectors.T @ eig.eigenvectors - np.eye(4))) < 1e-9


# ----------------------------------------------------------------- pca_reduce


def test_pca_reconstruction_error_equals_discarded_eigenvalues():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(30, 10)) @ rng.normal(size=(10, 10))
    for var_ratio in (0.90, 0.95, 0.99):
        reduced, model = pca_reduce(x, var_ratio)
        std = standardize(x)
        recon = reduced @ model.components.T
        mse = float(((std.values - recon) ** 2).sum() / x.shape[0])
        discarded = float(model.eigenvalues[model.s:].sum())
        assert abs(mse - discarded) < 1e-8


def test_pca_s_is_minimal():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(30, 10)) @ rng.normal(size=(10, 10))
    for var_ratio in (0.90, 0.95, 0.99):
        _, model = pca_reduce(x, var_ratio)
        vals = model.eigenvalues
        cum = np.cumsum(vals) / vals.sum()
        assert cum[model.s - 1] >= var_ratio
        if model.s > 1:
            assert cum[model.s - 2] < var_ratio


def test_pca_gram_side_matches_covariance_side():
    # n < d forces the Gram path; a tall copy of the same columns goes
    # through the covariance path; the nonzero spectra agree
    rng = np.random.default_rng(6)
    x = rng.normal(size=(8, 20))
    reduced, model = pca_reduce(x, 0.95)
    std = standardize(x)
    want = np.sort(np.linalg.eigh((std.values.T @ std.values) / 8)[0])[::-1]
    assert np.max(np.abs(model.eigenvalues - want[: model.eigenvalues.shape[0]])) < 1e-8
    # recovered axes are orthonormal and reproduce the projection
    g = model.components.T @ model.components
    assert np.max(np.abs(g - np.eye(model.s))) < 1e-8
    assert np.max(np.abs(reduced - std.values @ model.components)) == 0.0


def test_pca_full_retention():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(25, 4))
    reduced, model = pca_reduce(x, 1.0)
    assert model.s == 4
    assert model.retained_variance == pytest.approx(1.0)
    std = standardize(x)
    assert np.max(np.abs(reduced @ model.components.T - std.values)) < 1e-9


def test_pca_rank_deficient_data():
    # two independent columns plus two exact copies: rank 2
    rng = np.random.default_rng(8)
    base = rng.normal(size=(20, 2))
    x = np.hstack([base, base])
    _, model = pca_reduce(x, 1.0)
    assert model.s == 2
    assert model.retained_variance == pytest.approx(1.0)


def test_pca_rejects_bad_input():
    rng = np.random.default_rng(9)
    x = rng.normal(size=(10, 3))
    with pytest.raises(ValueError):
        pca_reduce(x, 0.0)
    with pytest.raises(ValueError):
        pca_reduce(x, 1.5)
    with pytest.raises(ValueError):
        pca_reduce(np.ones((5, 3)), 0.9)  # constant data has no variance


def test_eigenvalue_clamp_is_a_small_negative_floor():
    assert EIGENVALUE_CLAMP < 0.0
    assert EIGENVALUE_CLAMP > -1e-6


# --------------------------------------------------------------------- kmeans


def _blobs(rng, k, per, spread=0.05, gap=10.0):
    pts = []
    for c in range(k):
        center = np.array([gap * c, gap * (c % 2)])
        pts.append(center + rng.normal(size=(per, 2)) * spread)
    return np.vstack(pts)


def test_kmeans_deterministic():
    rng = np.random.default_rng(10)
    pts = rng.normal(size=(50, 3))
    a1, c1 = kmeans(pts, 5, seed=3)
    a2, c2 = kmeans(pts, 5, seed=3)
    assert np.array_equal(a1, a2)
    assert np.array_equal(c1, c2)


def _inertia(pts, assign, cent):
    return float(((pts - cent[assign]) ** 2).sum())


def test_kmeans_finds_global_optimum_on_tiny_inputs():
    """Exhaustive-partition oracle: on n <= 8 points, compare against the
    best inertia over every assignment of points to k groups."""
    rng = np.random.default_rng(11)
    for trial in range(8):
        k = int(rng.integers(2, 4))
        per = int(rng.integers(1, 8 // k + 1))
        pts = _blobs(rng, k, per=per, spread=0.2, gap=6.0)
        n = pts.shape[0]
        assign, cent = kmeans(pts, k, seed=trial)
        got = _inertia(pts, assign, cent)
        best = np.inf
        for labels in itertools.product(range(k), repeat=n):
            labels = np.array(labels)
            if len(set(labels.tolist())) < k:
                continue
            centers = np.array([pts[labels == c].mean(axis=0) for c in range(k)])
            best = min(best, _inertia(pts, labels, centers))
        assert got <= best + 1e-9


def test_kmeans_separated_blobs_recovered():
    rng = np.random.default_rng(12)
    pts = _blobs(rng, 4, per=20)
    assign, _ = kmeans(pts, 4, seed=0)
    truth = np.repeat(np.arange(4), 20)
    # same partition up to label names
    pairs = {(int(t), int(a)) for t, a in zip(truth, assign)}
    assert len(pairs) == 4


def test_kmeans_inertia_trace_non_increasing():
    rng = np.random.default_rng(13)
    pts = rng.normal(size=(60, 4))
    trace = []
    kmeans(pts, 6, seed=1, inertia_trace=trace)
    assert len(trace) >= 1
    assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))


def test_kmeans_k_bounds():
    pts = np.random.default_rng(14).normal(size=(10, 2))
    with pytest.raises(ValueError):
        kmeans(pts, 0)
    with pytest.raises(ValueError):
        kmeans(pts, 11)
    with pytest.raises(ValueError):
        kmeans(np.empty((0, 2)), 1)
    assign, cent = kmeans(pts, 10)
    assert sorted(assign.tolist()) == list(range(10))
    assert np.max(np.abs(cent[assign] - pts)) < 1e-12


def test_kmeans_k_equals_one():
    pts = np.random.default_rng(15).normal(size=(20, 3))
    assign, cent = kmeans(pts, 1)
    assert np.array_equal(assign, np.zeros(20, dtype=assign.dtype))
    assert np.max(np.abs(cent[0] - pts.mean(axis=0))) < 1e-12
