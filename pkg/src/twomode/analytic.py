"""Closed-form solution of the diagonalizable part and its perturbations.

Two rotations appear here. :func:`rotation_matrix` is the literal operator
``exp(θ/2 (c1†c2 - c1 c2†))``. With ``H0``'s tunnelling term ``+A1 sinθ``
that operator rotates the wrong way, so the eigenvectors of ``H0`` are the
columns of ``rotation_matrix(-θ)``. :func:`eigenbasis` returns those columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import HOP_12, HOP_21, FockBasis, FockState, monomial_matrix
from .hamiltonian import ModelParams


def expm_taylor(G: np.ndarray, theta_max: float = 0.5) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a truncated Taylor series.

    ``G`` is scaled by ``2**-s`` until its 1-norm is below ``theta_max``;
    the series is summed until terms stop changing the result, then squared
    back ``s`` times.
    """
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    norm = np.max(np.sum(np.abs(G), axis=0)) if n else 0.0
    s = 0
    while norm / 2.0**s >= theta_max:
        s += 1
    X = G / 2.0**s
    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, 40):
        term = term @ X / k
        result = result + term
        if np.max(np.abs(term)) <= 1e-18 * np.max(np.abs(result)):
            break
    for _ in range(s):
        result = result @ result
    return result


def generator(basis: FockBasis, theta: float) -> np.ndarray:
    """Antisymmetric generator ``(θ/2)(M[c1†c2] - M[c1 c2†])``."""
    return 0.5 * theta * (monomial_matrix(basis, HOP_12) - monomial_matrix(basis, HOP_21))


def rotation_matrix(basis: FockBasis, theta: float) -> np.ndarray:
    R = expm_taylor(generator(basis, theta))
    gram = R.T @ R
    if np.max(np.abs(gram - np.eye(basis.dim))) > 1e-10:
        raise ArithmeticError("rotation lost orthogonality; generator norm too large")
    return R


def eigenbasis(basis: FockBasis, theta: float) -> np.ndarray:
    """Columns are the analytic eigenvectors of ``H0`` in basis order."""
    return rotation_matrix(basis, -theta)


def eigenenergy(n1: int, n2: int, A1: float, A2: float) -> float:
    d = n1 - n2
    return A1 * d + A2 * d * d


def offset_constant(N: int, A2: float) -> float:
    """Exact ``H0`` eigenvalues minus :func:`eigenenergy` values.

    Follows from rewriting the interaction block as ``A2 (rotated n1-n2)^2``
    plus a c-number; the constant depends on neither θ nor A1.
    """
    return A2 * N * (N - 2)


@dataclass(frozen=True)
class AnalyticSpectrum:
    basis: FockBasis
    energies: np.ndarray  # eigenenergy formula, basis order
    eigenvectors: np.ndarray  # column j belongs to basis.states[j]
    offset: float  # add to energies to get exact H0 eigenvalues

    @property
    def exact_energies(self) -> np.ndarray:
        return self.energies + self.offset


def analytic_spectrum(basis: FockBasis, p: ModelParams) -> AnalyticSpectrum:
    energies = np.array([eigenenergy(s.n1, s.n2, p.A1, p.A2) for s in basis])
    return AnalyticSpectrum(basis, energies, eigenbasis(basis, p.theta), offset_constant(basis.N, p.A2))


def fit_offset(numeric, analytic) -> float:
    """Best common additive constant between two ascending spectra."""
    diff = np.asarray(numeric, dtype=float) - np.asarray(analytic, dtype=float)
    if diff.size == 0:
        return 0.0
    return 0.5 * (float(np.max(diff)) + float(np.min(diff)))


def hprime_matrix_element(bra: FockState, ket: FockState, p: ModelParams) -> float:
    n1, n2 = ket.n1, ket.n2
    if bra.N != ket.N:
        return 0.0
    shift = bra.n1 - n1
    if shift == 0:
        return -1.5 * p.epsilon * p.theta * (n1 - n2)
    if shift == 1:
        return -p.epsilon * math.sqrt(n2 * (n1 + 1))
    if shift == -1:
        return -p.epsilon * math.sqrt(n1 * (n2 + 1))
    return 0.0


def hsecond_matrix_element(bra: FockState, ket: FockState, p: ModelParams) -> float:
    """Leading closed-form elements of ``H''`` between analytic eigenstates.

    The ``|Δd| = 2`` entries use the combination ``2 (I2 + I3)`` exactly as
    printed; the exact θ→0 element carries occupation-dependent weights on
    I2 and I3 instead (see tests).
    """
    n1, n2 = ket.n1, ket.n2
    if bra.N != ket.N:
        return 0.0
    shift = bra.n1 - n1
    if shift == 0:
        return 4.0 * n1 * n2 * p.I1
    if shift == 1:
        return 2.0 * (p.I2 + p.I3) * math.sqrt(n2 * (n1 + 1))
    if shift == -1:
        return 2.0 * (p.I2 + p.I3) * math.sqrt(n1 * (n2 + 1))
    if shift == 2:
        return p.I1 * math.sqrt((n1 + 1) * (n1 + 2) * n2 * (n2 - 1))
    if shift == -2:
        return p.I1 * math.sqrt((n2 + 1) * (n2 + 2) * n1 * (n1 - 1))
    return 0.0


def _closed_form(basis: FockBasis, element, p: ModelParams) -> np.ndarray:
    out = np.zeros((basis.dim, basis.dim))
    for j, ket in enumerate(basis.states):
        for i in range(max(0, j - 2), min(basis.dim, j + 3)):
            out[i, j] = element(basis.states[i], ket, p)
    return out


def hprime_closed_form(basis: FockBasis, p: ModelParams) -> np.ndarray:
    return _closed_form(basis, hprime_matrix_element, p)


def hsecond_closed_form(basis: FockBasis, p: ModelParams) -> np.ndarray:
    return _closed_form(basis, hsecond_matrix_element, p)


def in_eigenbasis(basis: FockBasis, H: np.ndarray, theta: float) -> np.ndarray:
    """``Rᵀ H R`` with ``R`` the analytic eigenvectors of ``H0``."""
    R = eigenbasis(basis, theta)
    return R.T @ H @ R
