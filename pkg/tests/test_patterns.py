"""Correlation patterns against entrywise constructions and direct sums."""

import math

import numpy as np
import pytest

from corrcov import linalg_core, patterns
from corrcov.patterns import PatternSpecError


def toeplitz_loop(omega, m):
    """Entrywise oracle: (a, b) entry omega^(b-a) above, conjugate below."""
    w = complex(omega)
    T = np.empty((m, m), dtype=complex)
    for a in range(m):
        for b in range(m):
            T[a, b] = w ** (b - a) if b >= a else np.conj(w) ** (a - b)
    return T


def frobenius_sq_loop(omega, m):
    return float(np.sum(np.abs(toeplitz_loop(omega, m)) ** 2))


def test_toeplitz_materialize_matches_loop():
    for seed in range(15):
        rng = np.random.default_rng(seed)
        r = rng.uniform(0.05, 0.95)
        w = r * np.exp(1j * rng.uniform(0, 2 * np.pi)) if seed % 2 else r
        m = int(rng.integers(1, 12))
        T = patterns.materialize(patterns.toeplitz_pattern(w, m))
        assert np.allclose(T, toeplitz_loop(w, m), atol=1e-14)
        assert linalg_core.is_hermitian(T)
        if np.iscomplexobj(np.asarray(w)) and complex(w).imag != 0.0:
            assert np.iscomplexobj(T)
        else:
            assert not np.iscomplexobj(T)


def test_toeplitz_frobenius_closed_form():
    assert patterns.toeplitz_frobenius_sq(0.5, 4) == pytest.approx(5.78125, abs=1e-12)
    for seed in range(30):
        rng = np.random.default_rng(seed)
        r = rng.uniform(0.05, 0.95)
        w = r * np.exp(1j * rng.uniform(0, 2 * np.pi)) if seed % 3 else r
        m = int(rng.integers(1, 65))
        got = patterns.toeplitz_frobenius_sq(w, m)
        want = frobenius_sq_loop(w, m)
        assert abs(got - want) <= 1e-10 * want, (seed, w, m)


def test_toeplitz_gershgorin_bound():
    for seed in range(15):
        rng = np.random.default_rng(seed)
        r = rng.uniform(0.05, 0.95)
        w = r * np.exp(1j * rng.uniform(0, 2 * np.pi))
        m = int(rng.integers(1, 40))
        T = patterns.materialize(patterns.toeplitz_pattern(w, m))
        assert linalg_core.spectral_norm(T) <= patterns.toeplitz_spectral_bound(w) + 1e-12


def test_toeplitz_apply_right_matches_dense():
    for seed in range(12):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 6))
        m = int(rng.integers(1, 30))
        r = rng.uniform(0.05, 0.95)
        w = r * np.exp(1j * rng.uniform(0, 2 * np.pi)) if seed % 2 else r
        X = rng.standard_normal((n, m))
        if seed % 3 == 0:
            X = X + 1j * rng.standard_normal((n, m))
        T = patterns.materialize(patterns.toeplitz_pattern(w, m))
        got = patterns.toeplitz_apply_right(X, w)
        assert np.allclose(got, X @ T, atol=1e-12), (seed, w, n, m)


def test_phase_pattern_entries():
    m = 6
    theta = patterns.draw_phases(m, seed=3)
    p = patterns.phase_pattern(0.5, theta)
    P = patterns.materialize(p)
    for a in range(m):
        for b in range(m):
            d = abs(a - b)
            assert P[a, b] == pytest.approx((0.5 * np.exp(1j * theta[a, b])) ** d, abs=1e-14)
    assert np.allclose(np.diag(P), 1.0)
    assert linalg_core.trace(P) == pytest.approx(m)
    # Entrywise moduli match T(c), so the Frobenius norms agree.
    assert linalg_core.frobenius_norm(P) ** 2 == pytest.approx(
        patterns.toeplitz_frobenius_sq(0.5, m), rel=1e-12
    )
    assert not p.hermitian


def test_phase_with_zero_theta_is_real_toeplitz():
    m = 7
    P = patterns.materialize(patterns.phase_pattern(0.4, np.zeros((m, m))))
    T = patterns.materialize(patterns.toeplitz_pattern(0.4, m))
    assert np.allclose(P, T, atol=1e-14)


def test_phase_gershgorin_bound():
    for seed in range(10):
        theta = patterns.draw_phases(12, seed=seed)
        P = patterns.materialize(patterns.phase_pattern(0.6, theta))
        assert linalg_core.spectral_norm(P) <= patterns.toeplitz_spectral_bound(0.6) + 1e-12


def test_draw_phases_deterministic_and_in_range():
    a = patterns.draw_phases(8, seed=11)
    b = patterns.draw_phases(8, seed=11)
    c = patterns.draw_phases(8, seed=12)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    off = a[~np.eye(8, dtype=bool)]
    assert np.all(off >= 0.0) and np.all(off < 2 * np.pi)
    assert np.all(np.diag(a) == 0.0)


def test_identity_and_custom_materialize():
    assert np.array_equal(patterns.materialize(patterns.identity_pattern(3)), np.eye(3))
    B = np.array([[0.0, 1.0], [-1.0, 0.0]])  # skew-symmetric is allowed
    p = patterns.custom_pattern(B)
    assert np.array_equal(patterns.materialize(p), B)
    assert not p.hermitian
    assert patterns.custom_pattern(np.eye(2)).hermitian


def test_pattern_norms_closed_forms():
    norms = patterns.pattern_norms(patterns.identity_pattern(10))
    assert (norms.trace, norms.frobenius, norms.spectral) == (10.0, pytest.approx(math.sqrt(10)), 1.0)
    assert not norms.spectral_is_bound

    p = patterns.toeplitz_pattern(0.5, 4)
    exact = patterns.pattern_norms(p)
    assert exact.frobenius ** 2 == pytest.approx(5.78125, rel=1e-12)
    assert exact.spectral == pytest.approx(linalg_core.spectral_norm(patterns.materialize(p)), rel=1e-12)
    assert not exact.spectral_is_bound

    bounded = patterns.pattern_norms(p, spectral_bound_ok=True)
    assert bounded.spectral == pytest.approx(3.0)
    assert bounded.spectral_is_bound
    assert bounded.spectral >= exact.spectral

    theta = patterns.draw_phases(4, seed=0)
    ph = patterns.pattern_norms(patterns.phase_pattern(0.5, theta))
    assert ph.trace == pytest.approx(4.0)
    assert ph.frobenius == pytest.approx(exact.frobenius, rel=1e-12)


def test_parameter_validation():
    with pytest.raises(ValueError):
        patterns.toeplitz_pattern(1.0, 4)
    with pytest.raises(ValueError):
        patterns.toeplitz_pattern(0.0, 4)
    with pytest.raises(ValueError):
        patterns.toeplitz_pattern(0.6 + 0.9j, 4)
    with pytest.raises(ValueError):
        patterns.phase_pattern(1.2, np.zeros((3, 3)))
    with pytest.raises(ValueError):
        patterns.phase_pattern(0.5, np.zeros(3))
    with pytest.raises(ValueError):
        patterns.custom_pattern(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        patterns.identity_pattern(0)
    with pytest.raises(ValueError):
        patterns.toeplitz_frobenius_sq(0.5, 0)


def test_parse_pattern_forms():
    assert patterns.parse_pattern("identity").kind == "identity"
    fam = patterns.parse_pattern("toeplitz:0.5")
    assert fam.kind == "toeplitz" and fam.omega == 0.5
    assert fam.label == "toeplitz:0.5"
    fam = patterns.parse_pattern("toeplitz:0.3+0.4j")
    assert fam.omega == 0.3 + 0.4j
    assert patterns.parse_pattern(fam.label).omega == fam.omega
    fam = patterns.parse_pattern("phase:0.25")
    assert fam.kind == "phase" and fam.c == 0.25
    assert fam.label == "phase:0.25"


def test_parse_pattern_errors():
    for bad in ("", "identity:", "toeplitz", "toeplitz:", "toeplitz:abc",
                "toeplitz:1.5", "phase:2", "phase:x", "wavelet:0.5"):
        with pytest.raises(PatternSpecError):
            patterns.parse_pattern(bad)


def test_parse_custom_real_and_complex(tmp_path):
    re_path = tmp_path / "re.csv"
    im_path = tmp_path / "im.csv"
    np.savetxt(re_path, np.array([[1.0, 0.5], [0.5, 1.0]]), delimiter=",")
    np.savetxt(im_path, np.array([[0.0, 0.25], [-0.25, 0.0]]), delimiter=",")

    fam = patterns.parse_pattern(f"custom:{re_path}")
    assert fam.kind == "custom"
    assert np.array_equal(fam.matrix, [[1.0, 0.5], [0.5, 1.0]])

    fam = patterns.parse_pattern(f"custom:{re_path};{im_path}")
    assert np.array_equal(fam.matrix, np.array([[1.0, 0.5 + 0.25j], [0.5 - 0.25j, 1.0]]))
    assert fam.instantiate(2).hermitian

    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    with pytest.raises(PatternSpecError):
        patterns.parse_pattern(f"custom:{bad}")
    with pytest.raises(PatternSpecError):
        patterns.parse_pattern("custom:/nonexistent/file.csv")
    rect = tmp_path / "rect.csv"
    np.savetxt(rect, np.zeros((2, 3)), delimiter=",")
    with pytest.raises(PatternSpecError):
        patterns.parse_pattern(f"custom:{rect}")


def test_family_instantiate():
    fam = patterns.parse_pattern("toeplitz:0.5")
    assert fam.instantiate(6).m == 6
    ph = patterns.parse_pattern("phase:0.5")
    with pytest.raises(ValueError):
        ph.instantiate(4)
    theta = patterns.draw_phases(4, seed=1)
    assert ph.instantiate(4, theta).m == 4
    with pytest.raises(ValueError):
        ph.instantiate(5, theta)
    cust = patterns.PatternFamily("custom", matrix=np.eye(3), source="x")
    assert cust.instantiate(3).m == 3
    with pytest.raises(ValueError):
        cust.instantiate(4)
