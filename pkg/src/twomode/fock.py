"""Fixed-N two-mode Fock basis and ladder-operator monomials.

States are ordered by descending ``n1``: ``(N, 0), (N-1, 1), ..., (0, N)``.
Every other module indexes matrices through :func:`build_basis`, so
this ordering is the single source of truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class NonConservingMonomial(ValueError):
    """Raised when a monomial changes the total particle number."""


@dataclass(frozen=True, order=True)
class FockState:
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError(f"occupations must be non-negative, got {self}")

    @property
    def N(self) -> int:
        return self.n1 + self.n2

    @property
    def d(self) -> int:
        """Imbalance n1 - n2."""
        return self.n1 - self.n2

    def __str__(self) -> str:
        return f"({self.n1},{self.n2})"


@dataclass(frozen=True)
class FockBasis:
    N: int
    states: tuple[FockState, ...]

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, state: FockState) -> int:
        if state.N != self.N:
            raise KeyError(f"{state} is not in the N={self.N} basis")
        # descending n1 ordering
        return self.N - state.n1

    def imbalances(self) -> np.ndarray:
        return np.array([s.d for s in self.states], dtype=float)

    def __iter__(self):
        return iter(self.states)

    def __len__(self) -> int:
        return len(self.states)


def build_basis(N: int) -> FockBasis:
    """All two-mode number states with ``n1 + n2 = N``, descending in n1."""
    N = int(N)
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    return FockBasis(N, tuple(FockState(N - k, k) for k in range(N + 1)))


@dataclass(frozen=True)
class Monomial:
    """Normal-ordered ``c1†^p1 c2†^p2 c1^q1 c2^q2``."""

    p1: int = 0
    p2: int = 0
    q1: int = 0
    q2: int = 0

    def __post_init__(self):
        if min(self.p1, self.p2, self.q1, self.q2) < 0:
            raise ValueError(f"powers must be non-negative: {self}")
        if self.p1 + self.p2 != self.q1 + self.q2:
            raise NonConservingMonomial(
                f"c1†^{self.p1} c2†^{self.p2} c1^{self.q1} c2^{self.q2} "
                "does not conserve particle number"
            )

    def adjoint(self) -> "Monomial":
        return Monomial(self.q1, self.q2, self.p1, self.p2)


def _falling(n: int, k: int) -> int:
    # n (n-1) ... (n-k+1)
    return math.prod(range(n - k + 1, n + 1)) if k else 1


def monomial_matrix(basis: FockBasis, mono: Monomial) -> np.ndarray:
    """Dense matrix of a number-conserving monomial in ``basis``.

    The amplitude ``<m|c1†^p1 c2†^p2 c1^q1 c2^q2|n>`` is the square root of an
    integer product, accumulated exactly and converted to float once.
    """
    if not isinstance(mono, Monomial):
        mono = Monomial(*mono)
    out = np.zeros((basis.dim, basis.dim))
    for j, s in enumerate(basis.states):
        if s.n1 < mono.q1 or s.n2 < mono.q2:
            continue
        m1, m2 = s.n1 - mono.q1, s.n2 - mono.q2
        squared = (
            _falling(s.n1, mono.q1)
            * _falling(s.n2, mono.q2)
            * _falling(m1 + mono.p1, mono.p1)
            * _falling(m2 + mono.p2, mono.p2)
        )
        i = basis.index(FockState(m1 + mono.p1, m2 + mono.p2))
        out[i, j] = math.sqrt(squared)
    return out


def number_matrices(basis: FockBasis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n1 = np.diag([float(s.n1) for s in basis.states])
    n2 = np.diag([float(s.n2) for s in basis.states])
    return n1, n2, n1 - n2


# Frequently used monomials.
N1 = Monomial(1, 0, 1, 0)
N2 = Monomial(0, 1, 0, 1)
HOP_12 = Monomial(1, 0, 0, 1)  # c1† c2
HOP_21 = Monomial(0, 1, 1, 0)  # c2† c1
ONSITE_1 = Monomial(2, 0, 2, 0)  # c1†² c1²
ONSITE_2 = Monomial(0, 2, 0, 2)
CROSS = Monomial(1, 1, 1, 1)  # c1† c2† c1 c2
ASSIST_1 = Monomial(2, 0, 1, 1)  # c1†² c1 c2
ASSIST_2 = Monomial(0, 2, 1, 1)  # c2†² c1 c2
PAIR = Monomial(2, 0, 0, 2)  # c1†² c2²
