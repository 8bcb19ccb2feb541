"""Dense real and complex matrix operations: norms, trace, PSD square root,
Kronecker products and column-stacking vectorization.

All functions are pure and accept anything ``np.asarray`` turns into a 2-D
array. Tolerances are fixed constants, relative where a natural scale exists.
"""

from __future__ import annotations

import numpy as np

Array = np.ndarray

# Input counts as Hermitian when ||A - A^H||_F <= HERMITIAN_RTOL * max(1, ||A||_F).
HERMITIAN_RTOL = 1e-10
# Eigenvalues in [PSD_EIG_FLOOR, 0) clamp to zero; below the floor is an error.
PSD_EIG_FLOOR = -1e-10


class NotPSDError(ValueError):
    """The input is not Hermitian positive semi-definite within tolerance."""


def _as_matrix(a, name: str = "matrix") -> Array:
    A = np.asarray(a)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={A.ndim}")
    if A.size == 0:
        raise ValueError(f"{name} must be nonempty")
    return A


def _as_square(a, name: str = "matrix") -> Array:
    A = _as_matrix(a, name)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    return A


def spectral_norm(A) -> float:
    """Largest singular value of A.

    Computed as the square root of the top eigenvalue of the Gram matrix
    (the smaller of A^H A and A A^H, which share their nonzero spectrum).
    For Hermitian A this equals max |eigenvalue|.
    """
    A = _as_matrix(A)
    G = A.conj().T @ A if A.shape[0] >= A.shape[1] else A @ A.conj().T
    G = (G + G.conj().T) / 2.0
    top = np.linalg.eigvalsh(G)[-1]
    return float(np.sqrt(max(top, 0.0)))


def frobenius_norm(A) -> float:
    """Square root of the sum of squared entry moduli."""
    return float(np.linalg.norm(_as_matrix(A)))


def trace(A):
    """Sum of the diagonal of a square matrix (real or complex scalar)."""
    return _as_square(A).trace().item()


def is_hermitian(A, rtol: float = HERMITIAN_RTOL) -> bool:
    """True when ||A - A^H||_F <= rtol * max(1, ||A||_F)."""
    A = _as_square(A)
    return float(np.linalg.norm(A - A.conj().T)) <= rtol * max(1.0, float(np.linalg.norm(A)))


def hermitian_eigen(A) -> tuple[Array, Array]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    The input is validated against HERMITIAN_RTOL and symmetrized as
    (A + A^H)/2 before factorization, absorbing floating-point asymmetry.
    """
    A = _as_square(A)
    if not is_hermitian(A):
        raise ValueError("matrix is not Hermitian within tolerance")
    H = (A + A.conj().T) / 2.0
    w, V = np.linalg.eigh(H)
    return w, V


def psd_sqrt(S) -> Array:
    """Hermitian square root R of a PSD matrix S, with R @ R = S.

    Eigenvalues in [PSD_EIG_FLOOR, 0) are clamped to zero; anything below the
    floor raises NotPSDError, as does a non-Hermitian input.
    """
    S = _as_square(S, "S")
    try:
        w, V = hermitian_eigen(S)
    except ValueError as exc:
        raise NotPSDError(str(exc)) from exc
    if w[0] < PSD_EIG_FLOOR:
        raise NotPSDError(f"matrix has eigenvalue {w[0]:.3e} below {PSD_EIG_FLOOR:.1e}")
    w = np.clip(w, 0.0, None)
    R = (V * np.sqrt(w)) @ V.conj().T
    return (R + R.conj().T) / 2.0


def kronecker(A, B) -> Array:
    """Kronecker product, shape (r_A r_B) x (c_A c_B)."""
    return np.kron(_as_matrix(A, "A"), _as_matrix(B, "B"))


def vec(A) -> Array:
    """Column-stacking vectorization: columns of A concatenated into one column."""
    return _as_matrix(A).reshape(-1, 1, order="F")
