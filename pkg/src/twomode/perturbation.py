"""Rayleigh-Schrödinger corrections to the analytic spectrum.

The perturbation is ``V = H' + H''`` taken together. Matrix elements come
either from the closed forms (``elements="closed_form"``, the default) or
from ``Rᵀ V R`` evaluated numerically (``elements="rotated"``). The rotated
route keeps the same selection rules but drops the small-θ approximation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analytic import eigenenergy, hprime_closed_form, hsecond_closed_form, in_eigenbasis
from .fock import FockBasis, FockState, build_basis
from .hamiltonian import ModelParams, build_Hprime, build_Hsecond

# nonzero off-diagonal couplings connect index steps 1 and 2 (|Δd| = 2, 4)
COUPLED_STEPS = (1, 2)


class DegenerateSpectrum(ArithmeticError):
    def __init__(self, pairs):
        self.pairs = list(pairs)
        listing = ", ".join(f"{a}~{b}" for a, b in self.pairs)
        super().__init__(f"degenerate coupled states: {listing}; use exact diagonalization")


@dataclass(frozen=True)
class PerturbationReport:
    basis: FockBasis
    E0: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    state_correction: np.ndarray  # column n: first-order coefficients of |Φ_n>
    degenerate_pairs: list = field(default_factory=list)

    @property
    def total(self) -> np.ndarray:
        return self.E0 + self.E1 + self.E2


def unperturbed_energies(basis: FockBasis, p: ModelParams) -> np.ndarray:
    return np.array([eigenenergy(s.n1, s.n2, p.A1, p.A2) for s in basis])


def detect_degeneracies(p: ModelParams, rel_tol: float = 1e-8) -> list[tuple[FockState, FockState]]:
    basis = build_basis(p.N)
    E = unperturbed_energies(basis, p)
    scale = max(abs(p.A1), abs(p.A2), float(np.max(np.abs(E))) if E.size else 0.0)
    if scale == 0.0:
        scale = 1.0
    pairs = []
    for i in range(basis.dim):
        for j in range(i + 1, basis.dim):
            if abs(E[i] - E[j]) < rel_tol * scale:
                pairs.append((basis.states[i], basis.states[j]))
    return pairs


def perturbation_matrix(basis: FockBasis, p: ModelParams, elements: str = "closed_form") -> np.ndarray:
    """Matrix of ``V`` between analytic eigenstates, in basis order."""
    if elements == "closed_form":
        return hprime_closed_form(basis, p) + hsecond_closed_form(basis, p)
    if elements == "rotated":
        V = build_Hprime(basis, p) + build_Hsecond(basis, p)
        return in_eigenbasis(basis, V, p.theta)
    raise ValueError(f"unknown elements source {elements!r}")


def first_order(p: ModelParams, elements: str = "closed_form") -> np.ndarray:
    """Diagonal elements ``-(3/2) ε θ (n1 - n2) + 4 n1 n2 I1`` (closed form)."""
    basis = build_basis(p.N)
    return np.diag(perturbation_matrix(basis, p, elements)).copy()


def _coupled_degeneracies(basis, pairs):
    coupled = []
    for a, b in pairs:
        if abs(basis.index(a) - basis.index(b)) in COUPLED_STEPS:
            coupled.append((a, b))
    return coupled


def second_order(
    p: ModelParams, rel_tol: float = 1e-8, elements: str = "closed_form"
) -> tuple[np.ndarray, np.ndarray]:
    """Second-order energies and first-order state coefficients.

    Returns ``(E2, C)`` where ``C[k, n] = V_kn / (E0_n - E0_k)`` and
    ``C[n, n] = 0`` (intermediate normalization). Only the ``|Δd| ∈ {2, 4}``
    neighbours enter the sums.

    Raises
    ------
    DegenerateSpectrum
        If two states linked by the selection rules are degenerate.
    """
    basis = build_basis(p.N)
    E0 = unperturbed_energies(basis, p)
    bad = _coupled_degeneracies(basis, detect_degeneracies(p, rel_tol))
    if bad:
        raise DegenerateSpectrum(bad)
    V = perturbation_matrix(basis, p, elements)
    E2 = np.zeros(basis.dim)
    C = np.zeros((basis.dim, basis.dim))
    for n in range(basis.dim):
        for step in COUPLED_STEPS:
            for k in (n - step, n + step):
                if 0 <= k < basis.dim:
                    gap = E0[n] - E0[k]
                    E2[n] += V[k, n] ** 2 / gap
                    C[k, n] = V[k, n] / gap
    return E2, C


def perturbation_report(
    p: ModelParams, rel_tol: float = 1e-8, elements: str = "closed_form"
) -> PerturbationReport:
    basis = build_basis(p.N)
    E2, C = second_order(p, rel_tol, elements)
    return PerturbationReport(
        basis=basis,
        E0=unperturbed_energies(basis, p),
        E1=first_order(p, elements),
        E2=E2,
        state_correction=C,
        degenerate_pairs=detect_degeneracies(p, rel_tol),
    )
