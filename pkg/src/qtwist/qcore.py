"""Dense complex linear algebra for small (dim <= 8) matrices.

Everything operates on numpy complex128 arrays. Kets use qubit-A-major
ordering: |q_A q_B> maps to index 2*q_A + q_B.

The Hermitian eigensolver is a cyclic Jacobi iteration; at these sizes it is
robust and easy to audit, and the tests cross-check it against numpy.
"""
from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
JACOBI_OFFDIAG_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
MAX_DIM = 8


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={m.ndim}")
    return m


def as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return v


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} @ {b.shape}")
    return a @ b


def tensor(a, b) -> np.ndarray:
    """Kronecker product; for kets this realizes |a>|b> -> index 2a+b."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dagger(m) -> np.ndarray:
    return as_matrix(m).conj().T


def is_unitary(m, tol: float = 1e-12) -> bool:
    m = as_matrix(m)
    return np.max(np.abs(dagger(m) @ m - np.eye(m.shape[0]))) <= tol


def is_normalized(v, tol: float = 1e-12) -> bool:
    v = as_vector(v)
    return abs(np.vdot(v, v).real - 1.0) <= tol


def check_normalized(v, tol: float = 1e-12) -> np.ndarray:
    v = as_vector(v)
    if not is_normalized(v, tol):
        raise ValueError(f"vector not normalized: |v|^2 = {np.vdot(v, v).real}")
    return v


def _check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix not square: {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {m.shape[0]} exceeds cap {MAX_DIM}")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    return m


def hermitian_eigen(m, offdiag_tol: float = JACOBI_OFFDIAG_TOL,
                    max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors): eigenvalues real, sorted descending;
    eigenvectors as the columns of a unitary matrix, matching order.
    """
    a = _check_hermitian(m).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(np.max(np.abs(a)), 1.0)
    for _ in range(max_sweeps):
        off = max(abs(a[p, q]) for p in range(n - 1) for q in range(p + 1, n))
        if off <= offdiag_tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= offdiag_tol * scale:
                    continue
                phase = apq / abs(apq)
                tau = (a[q, q].real - a[p, p].real) / (2.0 * abs(apq))
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                r = np.eye(n, dtype=complex)
                r[p, p] = c
                r[q, q] = c
                r[p, q] = s * phase
                r[q, p] = -s * np.conj(phase)
                a = r.conj().T @ a @ r
                v = v @ r
    w = np.real(np.diag(a))
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def psd_sqrt(m, neg_tol: float = 1e-6) -> np.ndarray:
    """Hermitian square root of a PSD matrix.

    Eigenvalues in [-1e-10, 0) are treated as rounding and clamped to 0;
    anything below -neg_tol is a genuine violation and raises.
    """
    w, v = hermitian_eigen(m)
    if np.min(w) < -neg_tol:
        raise ValueError(f"matrix is not PSD: min eigenvalue {np.min(w)}")
    w = np.clip(w, 0.0, None)
    return v @ np.diag(np.sqrt(w)).astype(complex) @ v.conj().T
