"""Correlation patterns B across samples and their closed-form norm quantities.

Four kinds are supported:

* identity: B = I_m, the uncorrelated case.
* toeplitz: Hermitian Toeplitz T(omega) with entries omega^(b-a) above the
  diagonal and conjugate powers below, |omega| in (0, 1).
* phase: non-Hermitian P(c, Theta) with entries (c e^{j Theta_ab})^|a-b|,
  c in (0, 1) and per-entry phases Theta.
* custom: any user-supplied square matrix.

The first three all have unit diagonals, hence trace(B) = m exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from . import linalg_core
from ._rng import derive_seed, generator_from_seed

Array = np.ndarray


class PatternSpecError(ValueError):
    """A pattern specification string could not be parsed."""


def _check_omega(omega) -> complex:
    w = complex(omega)
    if not 0.0 < abs(w) < 1.0:
        raise ValueError(f"|omega| must lie in (0, 1), got |{w}| = {abs(w):.6g}")
    return w


def _check_c(c) -> float:
    c = float(c)
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must lie in (0, 1), got {c:.6g}")
    return c


@dataclass(frozen=True)
class CorrelationPattern:
    """A concrete m x m correlation pattern.

    Exactly the fields relevant to ``kind`` are set: ``omega`` for toeplitz,
    ``c`` and ``theta`` for phase, ``matrix`` for custom.
    """

    kind: str
    m: int
    omega: complex | None = None
    c: float | None = None
    theta: Array | None = None
    matrix: Array | None = None

    def __post_init__(self):
        if self.kind not in ("identity", "toeplitz", "phase", "custom"):
            raise ValueError(f"unknown pattern kind {self.kind!r}")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.kind == "toeplitz":
            _check_omega(self.omega)
        elif self.kind == "phase":
            _check_c(self.c)
            theta = np.asarray(self.theta, dtype=float)
            if theta.shape != (self.m, self.m):
                raise ValueError(
                    f"theta must have shape ({self.m}, {self.m}), got {theta.shape}"
                )
        elif self.kind == "custom":
            M = np.asarray(self.matrix)
            if M.ndim != 2 or M.shape[0] != M.shape[1]:
                raise ValueError("custom pattern matrix must be square")
            if M.shape[0] != self.m:
                raise ValueError("custom pattern size does not match m")

    @property
    def hermitian(self) -> bool:
        if self.kind in ("identity", "toeplitz"):
            return True
        if self.kind == "phase":
            return False
        return linalg_core.is_hermitian(self.matrix)


def identity_pattern(m: int) -> CorrelationPattern:
    return CorrelationPattern("identity", m)


def toeplitz_pattern(omega, m: int) -> CorrelationPattern:
    return CorrelationPattern("toeplitz", m, omega=_check_omega(omega))


def phase_pattern(c, theta) -> CorrelationPattern:
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
        raise ValueError("theta must be a square matrix of phases")
    return CorrelationPattern("phase", theta.shape[0], c=_check_c(c), theta=theta)


def custom_pattern(B) -> CorrelationPattern:
    B = np.asarray(B)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("custom pattern matrix must be square")
    return CorrelationPattern("custom", B.shape[0], matrix=B.copy())


def draw_phases(m: int, seed: int) -> Array:
    """m x m i.i.d. phases from [0, 2 pi); the (unused) diagonal is zeroed."""
    rng = generator_from_seed(derive_seed(seed, "phases"))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(m, m))
    np.fill_diagonal(theta, 0.0)
    return theta


def materialize(p: CorrelationPattern) -> Array:
    """Dense m x m matrix for the pattern."""
    m = p.m
    if p.kind == "identity":
        return np.eye(m)
    if p.kind == "toeplitz":
        w = complex(p.omega)
        k = np.arange(m)
        powers = w ** k
        if w.imag == 0.0:
            powers = powers.real
        # entry (a, b) = omega^(b-a) for b >= a, conjugate-transposed below
        diff = k[None, :] - k[:, None]
        T = np.where(diff >= 0, powers[np.abs(diff)], np.conj(powers[np.abs(diff)]))
        if w.imag == 0.0:
            T = T.real
        return T
    if p.kind == "phase":
        k = np.arange(m)
        dist = np.abs(k[None, :] - k[:, None])
        theta = np.asarray(p.theta, dtype=float)
        return (p.c ** dist) * np.exp(1j * dist * theta)
    return np.array(p.matrix)


def toeplitz_apply_right(X, omega) -> Array:
    """X @ materialize(toeplitz_pattern(omega, m)) in O(n m) time.

    Column b of the product splits into a forward geometric sum
    F_b = sum_{a <= b} omega^(b-a) X_a and a backward one with conj(omega);
    both satisfy first-order recurrences, evaluated here as IIR filters.
    X_b itself is counted twice, hence the final subtraction.
    """
    w = _check_omega(omega)
    X = np.asarray(X)
    out_dtype = np.result_type(X.dtype, np.complex128 if w.imag != 0.0 else np.float64)
    X = X.astype(out_dtype, copy=False)
    wc = out_dtype.type(w) if w.imag != 0.0 else out_dtype.type(w.real)
    F = lfilter([1.0], [1.0, -wc], X, axis=1)
    G = lfilter([1.0], [1.0, -np.conj(wc)], X[:, ::-1], axis=1)[:, ::-1]
    return F + G - X


def toeplitz_frobenius_sq(omega, m: int) -> float:
    """Closed form for ||T(omega)||_F^2.

    Equals m (1+|w|^2)/(1-|w|^2) + 2 |w|^2 (|w|^(2m) - 1)/(1-|w|^2)^2
    with w = omega; depends on omega only through its modulus.
    """
    w = _check_omega(omega)
    if m < 1:
        raise ValueError("m must be >= 1")
    a = abs(w) ** 2
    return m * (1.0 + a) / (1.0 - a) + 2.0 * a * (a ** m - 1.0) / (1.0 - a) ** 2


def toeplitz_spectral_bound(omega) -> float:
    """Gershgorin bound (1+|omega|)/(1-|omega|) on ||T(omega)||."""
    w = _check_omega(omega)
    return (1.0 + abs(w)) / (1.0 - abs(w))


@dataclass(frozen=True)
class PatternNorms:
    trace: complex | float
    frobenius: float
    spectral: float
    spectral_is_bound: bool = False


def pattern_norms(p: CorrelationPattern, spectral_bound_ok: bool = False) -> PatternNorms:
    """trace, Frobenius and spectral norm of the pattern.

    Closed forms are used where they exist (identity everywhere; Toeplitz and
    phase Frobenius norms, which share entrywise moduli). The spectral norm is
    computed numerically unless ``spectral_bound_ok`` allows substituting the
    Gershgorin bound for toeplitz/phase kinds.
    """
    m = p.m
    if p.kind == "identity":
        return PatternNorms(float(m), float(np.sqrt(m)), 1.0)
    if p.kind in ("toeplitz", "phase"):
        mod = abs(p.omega) if p.kind == "toeplitz" else p.c
        fro = float(np.sqrt(toeplitz_frobenius_sq(mod, m)))
        if spectral_bound_ok:
            return PatternNorms(float(m), fro, toeplitz_spectral_bound(mod), True)
        return PatternNorms(float(m), fro, linalg_core.spectral_norm(materialize(p)))
    B = np.asarray(p.matrix)
    return PatternNorms(linalg_core.trace(B), linalg_core.frobenius_norm(B), linalg_core.spectral_norm(B))


@dataclass(frozen=True)
class PatternFamily:
    """A pattern kind plus parameters, instantiable at any sample count m."""

    kind: str
    omega: complex | None = None
    c: float | None = None
    matrix: Array | None = None
    source: str | None = None

    def __post_init__(self):
        if self.kind not in ("identity", "toeplitz", "phase", "custom"):
            raise ValueError(f"unknown pattern kind {self.kind!r}")
        if self.kind == "toeplitz":
            _check_omega(self.omega)
        elif self.kind == "phase":
            _check_c(self.c)
        elif self.kind == "custom" and self.matrix is None:
            raise ValueError("custom family requires a matrix")

    @property
    def label(self) -> str:
        if self.kind == "identity":
            return "identity"
        if self.kind == "toeplitz":
            w = complex(self.omega)
            if w.imag == 0.0:
                return f"toeplitz:{w.real:.12g}"
            return f"toeplitz:{w.real:.12g}{w.imag:+.12g}j"
        if self.kind == "phase":
            return f"phase:{self.c:.12g}"
        return f"custom:{self.source or '<matrix>'}"

    def instantiate(self, m: int, theta: Array | None = None) -> CorrelationPattern:
        if self.kind == "identity":
            return identity_pattern(m)
        if self.kind == "toeplitz":
            return toeplitz_pattern(self.omega, m)
        if self.kind == "phase":
            if theta is None:
                raise ValueError("phase family requires a theta matrix")
            if theta.shape != (m, m):
                raise ValueError(f"theta shape {theta.shape} does not match m={m}")
            return phase_pattern(self.c, theta)
        if self.matrix.shape[0] != m:
            raise ValueError(
                f"custom pattern is {self.matrix.shape[0]} x {self.matrix.shape[0]}, "
                f"cannot instantiate at m={m}"
            )
        return custom_pattern(self.matrix)


def _load_custom(source: str) -> Array:
    paths = source.split(";")
    if len(paths) not in (1, 2):
        raise PatternSpecError(
            "custom pattern takes one CSV (real) or two separated by ';' (real;imaginary)"
        )
    try:
        parts = [np.loadtxt(path, delimiter=",", ndmin=2) for path in paths]
    except (OSError, ValueError) as exc:
        raise PatternSpecError(f"cannot read custom pattern CSV: {exc}") from exc
    B = parts[0] if len(parts) == 1 else parts[0] + 1j * parts[1]
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise PatternSpecError(f"custom pattern must be square, got shape {B.shape}")
    return B


def parse_pattern(text: str) -> PatternFamily:
    """Parse a pattern specification string.

    Grammar: ``identity`` | ``toeplitz:<re>[<+im>j]`` | ``phase:<c>`` |
    ``custom:<path.csv>`` (append ``;<imag.csv>`` for a complex matrix).
    """
    spec = text.strip()
    if spec == "identity":
        return PatternFamily("identity")
    head, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise PatternSpecError(f"malformed pattern spec {text!r}")
    if head == "toeplitz":
        try:
            omega = complex(arg)
        except ValueError as exc:
            raise PatternSpecError(f"bad omega in {text!r}: {exc}") from exc
        try:
            return PatternFamily("toeplitz", omega=omega)
        except ValueError as exc:
            raise PatternSpecError(str(exc)) from exc
    if head == "phase":
        try:
            c = float(arg)
        except ValueError as exc:
            raise PatternSpecError(f"bad c in {text!r}: {exc}") from exc
        try:
            return PatternFamily("phase", c=c)
        except ValueError as exc:
            raise PatternSpecError(str(exc)) from exc
    if head == "custom":
        return PatternFamily("custom", matrix=_load_custom(arg), source=arg)
    raise PatternSpecError(f"unknown pattern kind in {text!r}")
