"""Correlated sample covariance against a double-loop oracle and its bias law."""

import numpy as np
import pytest

from corrcov import estimator, linalg_core, patterns, sampling


def covariance_loop(X, B):
    """Oracle: Sigma_hat = (1/m) sum_ab B[a,b] x_a x_b^H, summed entrywise."""
    X = np.asarray(X)
    B = np.asarray(B)
    n, m = X.shape
    S = np.zeros((n, n), dtype=np.result_type(X, B))
    for a in range(m):
        for b in range(m):
            S += B[a, b] * np.outer(X[:, a], X[:, b].conj())
    return S / m


def test_matches_loop_oracle():
    for seed in range(12):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 7))
        X = rng.standard_normal((n, m))
        B = rng.standard_normal((m, m))
        if seed % 2:
            X = X + 1j * rng.standard_normal((n, m))
            B = B + 1j * rng.standard_normal((m, m))
        got = estimator.correlated_sample_covariance(X, B)
        assert np.allclose(got, covariance_loop(X, B), atol=1e-12), seed


def test_identity_reduces_to_classical():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((4, 10))
    S = estimator.correlated_sample_covariance(X, np.eye(10))
    assert np.allclose(S, X @ X.T / 10, atol=1e-15)


def test_linearity_and_scaling():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6))
    B1 = rng.standard_normal((6, 6))
    B2 = rng.standard_normal((6, 6))
    S1 = estimator.correlated_sample_covariance(X, B1)
    S2 = estimator.correlated_sample_covariance(X, B2)
    S12 = estimator.correlated_sample_covariance(X, B1 + B2)
    assert np.allclose(S12, S1 + S2, atol=1e-12)
    assert np.allclose(estimator.correlated_sample_covariance(X, 3.0 * B1), 3.0 * S1, atol=1e-12)
    assert np.allclose(
        estimator.correlated_sample_covariance(2.0 * X, B1), 4.0 * S1, atol=1e-12
    )


def test_shape_validation():
    with pytest.raises(ValueError):
        estimator.correlated_sample_covariance(np.zeros((3, 4)), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        estimator.correlated_sample_covariance(np.zeros(4), np.zeros((4, 4)))


def test_bias_identity_small_monte_carlo():
    # E Sigma_hat = (trace(B)/m) Sigma; with trace(B) = m the estimator is unbiased.
    n, m, trials = 2, 10, 4000
    sigma = np.array([[1.5, 0.4], [0.4, 0.8]])
    p = patterns.toeplitz_pattern(0.5, m)
    acc = np.zeros((n, n))
    sq = np.zeros((n, n))
    for t in range(trials):
        batch = sampling.draw_real(n, m, sigma, "gaussian", seed=1000 + t)
        res = estimator.estimate_and_score(batch, p)
        acc += res.sigma_hat
        sq += res.sigma_hat ** 2
    mean = acc / trials
    se = np.sqrt(np.maximum(sq / trials - mean ** 2, 0.0) / trials)
    assert np.all(np.abs(mean - sigma) <= 5.0 * se + 1e-12)


def test_zero_trace_pattern_centers_at_zero():
    # B = diag(1, -1, ...) has trace 0, so E Sigma_hat = 0.
    n, m, trials = 2, 6, 4000
    B = np.diag([1.0, -1.0] * 3)
    p = patterns.custom_pattern(B)
    acc = np.zeros((n, n))
    sq = np.zeros((n, n))
    for t in range(trials):
        batch = sampling.draw_real(n, m, None, "rademacher", seed=2000 + t)
        res = estimator.estimate_and_score(batch, p)
        acc += res.sigma_hat
        sq += res.sigma_hat ** 2
    mean = acc / trials
    se = np.sqrt(np.maximum(sq / trials - mean ** 2, 0.0) / trials)
    assert np.all(np.abs(mean) <= 5.0 * se + 1e-12)


def test_hermitian_pattern_symmetrizes_estimate():
    batch = sampling.draw_complex(3, 12, None, "gaussian", seed=4)
    res = estimator.estimate_and_score(batch, patterns.toeplitz_pattern(0.3 + 0.2j, 12))
    assert np.allclose(res.sigma_hat, res.sigma_hat.conj().T, atol=1e-14)

    theta = patterns.draw_phases(12, seed=4)
    raw = estimator.estimate_and_score(batch, patterns.phase_pattern(0.5, theta))
    B = patterns.materialize(patterns.phase_pattern(0.5, theta))
    expected = estimator.correlated_sample_covariance(batch.X, B)
    # Non-Hermitian B keeps the raw estimate.
    assert np.array_equal(raw.sigma_hat, expected)


def test_score_metrics():
    batch = sampling.draw_real(3, 20, None, "gaussian", seed=8)
    res = estimator.estimate_and_score(batch, patterns.identity_pattern(20))
    diff = res.sigma_hat - np.eye(3)
    assert res.frobenius_error == pytest.approx(np.linalg.norm(diff), rel=1e-12)
    assert res.normalized_frobenius_error == pytest.approx(
        np.linalg.norm(diff) / np.sqrt(3.0), rel=1e-12
    )
    assert res.spectral_error == pytest.approx(np.linalg.norm(diff, ord=2), rel=1e-10)
    with pytest.raises(ValueError):
        estimator.estimate_and_score(batch, patterns.identity_pattern(19))
