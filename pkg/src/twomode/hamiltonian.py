"""Generic two-mode Hamiltonian and the solvable model's three pieces.

Interaction couplings are assumed to already carry the ``g/2`` prefactor of
the contact interaction. ``U2212`` names the integral of ``phi2^3 phi1``
(the integrand is symmetric under index reordering, so it equals the
``U1222`` integral).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import astuple, dataclass, fields

import numpy as np

from .fock import (
    ASSIST_1,
    ASSIST_2,
    CROSS,
    HOP_12,
    N1,
    N2,
    ONSITE_1,
    ONSITE_2,
    PAIR,
    FockBasis,
    monomial_matrix,
)


@dataclass(frozen=True)
class CouplingSet:
    E1: float = 0.0
    E2: float = 0.0
    E12: float = 0.0
    U1111: float = 0.0
    U2222: float = 0.0
    U1212: float = 0.0
    U1112: float = 0.0
    U2212: float = 0.0
    U1122: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValueError(f"coupling {f.name} must be finite, got {v}")

    def __add__(self, other: "CouplingSet") -> "CouplingSet":
        return CouplingSet(*(a + b for a, b in zip(astuple(self), astuple(other))))

    def scaled(self, factor: float) -> "CouplingSet":
        return CouplingSet(*(factor * a for a in astuple(self)))

    def as_dict(self) -> dict[str, float]:
        return {f.name: float(getattr(self, f.name)) for f in fields(self)}


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the solvable model.

    ``theta`` is expected small (``sin θ ≈ θ``) but that is not enforced, so
    callers can probe outside the validity regime.
    """

    N: int
    theta: float
    A1: float
    A2: float
    epsilon: float = 0.0
    I1: float = 0.0
    I2: float = 0.0
    I3: float = 0.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 0:
            raise ValueError(f"N must be a non-negative integer, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        for name in ("theta", "A1", "A2", "epsilon", "I1", "I2", "I3"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def replace(self, **changes) -> "ModelParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ModelParams(**values)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _with_hc(m: np.ndarray) -> np.ndarray:
    return m + m.T


def build_generic(basis: FockBasis, c: CouplingSet) -> np.ndarray:
    """Two-mode Hamiltonian H1 + H2 with coefficient multiplicities
    ``4 U1212``, ``2 U1112``, ``2 U2212``, ``U1122`` on the listed monomials."""
    M = lambda mono: monomial_matrix(basis, mono)  # noqa: E731
    H = c.E1 * M(N1) + c.E2 * M(N2) + c.E12 * _with_hc(M(HOP_12))
    H += c.U1111 * M(ONSITE_1) + c.U2222 * M(ONSITE_2)
    H += 4.0 * c.U1212 * M(CROSS)
    H += 2.0 * c.U1112 * _with_hc(M(ASSIST_1))
    H += 2.0 * c.U2212 * _with_hc(M(ASSIST_2))
    H += c.U1122 * _with_hc(M(PAIR))
    return H


def h0_couplings(p: ModelParams) -> CouplingSet:
    c, s = math.cos(p.theta), math.sin(p.theta)
    return CouplingSet(
        E1=p.A1 * c,
        E2=-p.A1 * c,
        E12=p.A1 * s,
        U1111=p.A2 * (1.0 + c * c),
        U2222=p.A2 * (1.0 + c * c),
        U1212=p.A2 * s * s,
        U1112=p.A2 * c * s,
        U2212=-p.A2 * c * s,
        U1122=p.A2 * s * s,
    )


def hprime_couplings(p: ModelParams) -> CouplingSet:
    half = 0.5 * p.epsilon * p.theta
    return CouplingSet(E1=-half, E2=half, E12=-p.epsilon)


def hsecond_couplings(p: ModelParams) -> CouplingSet:
    return CouplingSet(U1212=p.I1, U1112=p.I2, U2212=p.I3, U1122=p.I1)


def build_H0(basis: FockBasis, p: ModelParams) -> np.ndarray:
    """Diagonalizable part of the model Hamiltonian."""
    return build_generic(basis, h0_couplings(p))


def build_Hprime(basis: FockBasis, p: ModelParams) -> np.ndarray:
    """First-order perturbation ``-ε(θ/2 (n1 - n2) + c1†c2 + c2†c1)`` (small-θ form)."""
    return build_generic(basis, hprime_couplings(p))


def build_Hsecond(basis: FockBasis, p: ModelParams) -> np.ndarray:
    """Second-order perturbation from the mixed fourth-order integrals.

    The O(θ) remainder is not included.
    """
    return build_generic(basis, hsecond_couplings(p))


def build_total(basis: FockBasis, p: ModelParams) -> np.ndarray:
    return build_generic(basis, h0_couplings(p) + hprime_couplings(p) + hsecond_couplings(p))


def build_theta0(basis: FockBasis, Ea: float, Eb: float, Uaa: float, Ubb: float) -> np.ndarray:
    return build_generic(basis, CouplingSet(E1=Ea, E2=Eb, U1111=Uaa, U2222=Ubb))


def rotate_couplings(
    Ea: float,
    Eb: float,
    epsilon: float,
    Uaa: float,
    Ubb: float,
    I1: float,
    I2: float,
    I3: float,
    theta: float,
) -> CouplingSet:
    """Exact couplings in the rotated modes ``phi1, phi2`` built from
    quasilocalized-mode integrals.

    ``phi1 = cos(θ/2) phia - sin(θ/2) phib``, ``phi2 = cos(θ/2) phib + sin(θ/2) phia``.
    No small-angle approximation is made, so comparing the resulting generic
    Hamiltonian with ``H0 + H' + H''`` measures what the printed model drops.
    """
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    # rows: phi1, phi2; columns: phia, phib
    O = np.array([[c, -s], [s, c]])
    h = np.array([[Ea, epsilon], [epsilon, Eb]])
    h_rot = O @ h @ O.T

    # fully symmetric quartic tensor, indexed by how many b's appear
    by_b_count = [Uaa, I2, I1, I3, Ubb]
    u = np.empty((2, 2, 2, 2))
    for idx in itertools.product((0, 1), repeat=4):
        u[idx] = by_b_count[sum(idx)]
    u_rot = np.einsum("ia,jb,kc,ld,abcd->ijkl", O, O, O, O, u)

    return CouplingSet(
        E1=h_rot[0, 0],
        E2=h_rot[1, 1],
        E12=h_rot[0, 1],
        U1111=u_rot[0, 0, 0, 0],
        U2222=u_rot[1, 1, 1, 1],
        U1212=u_rot[0, 1, 0, 1],
        U1112=u_rot[0, 0, 0, 1],
        U2212=u_rot[1, 1, 0, 1],
        U1122=u_rot[0, 0, 1, 1],
    )
