"""Eigenvalues of small dense Hermitian matrices by cyclic Jacobi rotations.

A complex Hermitian ``H = X + iY`` is embedded as the real symmetric matrix
``[[X, -Y], [Y, X]]``, whose spectrum is that of ``H`` with every eigenvalue
doubled.  The solver works on stacks of matrices so that a batch of
``(N, n, n)`` inputs is diagonalized with one pass over the rotation pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

OFF_DIAGONAL_TOL = 1e-14
MAX_SWEEPS = 60
HERMITIAN_TOL = 1e-9


@dataclass(frozen=True)
class JacobiResult:
    eigenvalues: np.ndarray  # (..., n), ascending
    eigenvectors: np.ndarray  # (..., n, n), columns
    sweeps: int
    off_norm: float


def _off_norm(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(a[..., mask] ** 2, axis=-1))


def _sweep(a: np.ndarray, v: np.ndarray) -> None:
    """One cyclic sweep over all pairs (p, q), in place on a stack."""
    n = a.shape[-1]
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[:, p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            safe = np.where(active, apq, 1.0)
            tau = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
            # tau overflowing to inf gives t = 0, the correct limit
            t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            c_ = c[:, np.newaxis]
            s_ = s[:, np.newaxis]
            # A <- A J on columns p, q; then A <- J^T A on rows p, q
            col_p = a[:, :, p].copy()
            col_q = a[:, :, q]
            a[:, :, p] = c_ * col_p - s_ * col_q
            a[:, :, q] = s_ * col_p + c_ * col_q
            row_p = a[:, p, :].copy()
            row_q = a[:, q, :]
            a[:, p, :] = c_ * row_p - s_ * row_q
            a[:, q, :] = s_ * row_p + c_ * row_q
            a[:, p, q] = 0.0
            a[:, q, p] = 0.0
            vp = v[:, :, p].copy()
            vq = v[:, :, q]
            v[:, :, p] = c_ * vp - s_ * vq
            v[:, :, q] = s_ * vp + c_ * vq


def jacobi_symmetric(matrix: np.ndarray, tol: float = OFF_DIAGONAL_TOL, max_sweeps: int = MAX_SWEEPS) -> JacobiResult:
    """Cyclic Jacobi eigen-decomposition of real symmetric matrices.

    Sweeps over all pairs ``(p, q)`` in row order until the off-diagonal
    Frobenius norm of every matrix in the stack is below ``tol`` (relative to
    ``max(1, ||A||_F)``).  Converged matrices drop out of later sweeps.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValidationError(f"expected square matrices, got shape {a.shape}")
    squeeze = a.ndim == 2
    if squeeze:
        a = a[np.newaxis]
    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    a = a.reshape(-1, n, n)
    if not np.allclose(a, np.swapaxes(a, -1, -2), rtol=0.0, atol=HERMITIAN_TOL):
        raise ValidationError("matrix is not symmetric")
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    v = np.broadcast_to(np.eye(n), a.shape).copy()
    scale = np.maximum(1.0, np.sqrt(np.sum(a**2, axis=(-2, -1))))

    sweeps = 0
    off = _off_norm(a) / scale
    todo = np.flatnonzero(off >= tol)
    while todo.size and sweeps < max_sweeps:
        sub_a, sub_v = a[todo], v[todo]
        with np.errstate(over="ignore"):
            _sweep(sub_a, sub_v)
        a[todo], v[todo] = sub_a, sub_v
        sweeps += 1
        off[todo] = _off_norm(sub_a) / scale[todo]
        todo = todo[off[todo] >= tol]

    w = np.diagonal(a, axis1=-2, axis2=-1).copy()
    order = np.argsort(w, axis=-1)
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, np.newaxis, :], axis=-1)
    w = w.reshape(batch_shape + (n,))
    v = v.reshape(batch_shape + (n, n))
    if squeeze:
        w, v = w[0], v[0]
    return JacobiResult(w, v, sweeps, float(np.max(off)) if off.size else 0.0)


def real_embedding(h: np.ndarray) -> np.ndarray:
    """``[[Re H, -Im H], [Im H, Re H]]`` for a stack of complex matrices."""
    h = np.asarray(h, dtype=complex)
    top = np.concatenate([h.real, -h.imag], axis=-1)
    bottom = np.concatenate([h.imag, h.real], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    h = np.asarray(h)
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        raise ValidationError(f"expected square matrices, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValidationError("matrix has non-finite entries")
    if np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2))), initial=0.0) > tol:
        raise ValidationError("matrix is not Hermitian")


def eigvalsh(h: np.ndarray, tol: float = OFF_DIAGONAL_TOL) -> np.ndarray:
    """Ascending eigenvalues of complex Hermitian matrices (stacks allowed)."""
    check_hermitian(h)
    w = jacobi_symmetric(real_embedding(h), tol=tol).eigenvalues
    # each eigenvalue appears twice in the embedding
    return 0.5 * (w[..., 0::2] + w[..., 1::2])


def reconstruction_residual(h: np.ndarray) -> np.ndarray:
    """Frobenius norm of ``M - V diag(w) V^T`` on the real embedding of ``h``."""
    check_hermitian(h)
    m = real_embedding(h)
    res = jacobi_symmetric(m)
    recon = np.einsum("...ik,...k,...jk->...ij", res.eigenvectors, res.eigenvalues, res.eigenvectors)
    return np.sqrt(np.sum((m - recon) ** 2, axis=(-2, -1)))


def spectral_norm(h: np.ndarray) -> np.ndarray | float:
    """Largest absolute eigenvalue of a Hermitian matrix (or of each in a stack)."""
    w = eigvalsh(h)
    out = np.max(np.abs(w), axis=-1)
    return float(out) if np.ndim(out) == 0 else out
