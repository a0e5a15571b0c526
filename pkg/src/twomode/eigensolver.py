"""Cyclic-by-row Jacobi eigensolver for dense real symmetric matrices.

This is the independent oracle for every "is diagonalizable" claim in the
package, so it deliberately does not call LAPACK.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


class NotSymmetric(ValueError):
    pass


class NoConvergence(RuntimeError):
    def __init__(self, max_sweeps: int, off: float):
        super().__init__(f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off:.3e})")
        self.max_sweeps = max_sweeps
        self.off = off


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # column k pairs with eigenvalue k
    sweeps: int = 0


@njit(cache=True)
def _off_norm(a):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += a[i, j] * a[i, j]
    return np.sqrt(s)


@njit(cache=True)
def _jacobi_kernel(a, v, tol, max_sweeps):
    n = a.shape[0]
    fro = np.sqrt(np.sum(a * a))
    target = tol * fro
    off = _off_norm(a)
    sweeps = 0
    while off > target:
        if sweeps >= max_sweeps:
            return sweeps, off, False
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
        off = _off_norm(a)
    return sweeps, off, True


def jacobi_eigh(A, tol: float = 1e-13, max_sweeps: int = 60) -> EigenDecomposition:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Converged when the off-diagonal Frobenius norm drops below
    ``tol * ||A||_F``. Eigenvalues are returned ascending; degenerate
    eigenvectors span the right subspace but are not canonicalized.
    """
    a = np.array(A, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    asym = np.max(np.abs(a - a.T))
    if asym > 1e-10 * max(scale, np.finfo(float).tiny):
        raise NotSymmetric(f"max |A - A^T| = {asym:.3e} exceeds 1e-10 relative")
    a = 0.5 * (a + a.T)
    v = np.eye(a.shape[0])
    sweeps, off, ok = _jacobi_kernel(a, v, float(tol), int(max_sweeps))
    if not ok:
        raise NoConvergence(max_sweeps, off)
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order], sweeps)


def spectrum_distance(a, b) -> tuple[float, float]:
    """``(max |a_i - b_i|, spread of a_i - b_i)`` for two ascending spectra.

    The spread ignores a common additive offset.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"spectra of length {a.size} and {b.size}")
    if a.size == 0:
        return 0.0, 0.0
    diff = a - b
    return float(np.max(np.abs(diff))), float(np.max(diff) - np.min(diff))
