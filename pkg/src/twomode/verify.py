"""Property suite run by ``twomode verify``.

Each property reports its worst-case residual over a deterministic
parameter grid along with the limit it is held to.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .analytic import (
    eigenbasis,
    eigenenergy,
    fit_offset,
    hprime_closed_form,
    offset_constant,
    rotation_matrix,
)
from .eigensolver import jacobi_eigh, spectrum_distance
from .fock import HOP_12, HOP_21, Monomial, build_basis, monomial_matrix, number_matrices
from .hamiltonian import (
    CouplingSet,
    ModelParams,
    build_generic,
    build_H0,
    build_Hprime,
    build_Hsecond,
    h0_couplings,
)
from .perturbation import COUPLED_STEPS, detect_degeneracies, first_order, second_order

DEFAULT_THETAS = (0.05, 0.1, 0.2)
A1_GRID = (0.5, 1.0)
A2_GRID = (0.05, 0.1)


@dataclass(frozen=True)
class PropertyResult:
    name: str
    worst: float
    limit: float
    passed: bool

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name:<40s} worst={self.worst:.3e}  limit={self.limit:.1e}"


def _faulty_h0(basis, p: ModelParams):
    # canary: tunnelling sign flipped
    c = h0_couplings(p)
    return build_generic(basis, replace(c, E12=-c.E12))


def _monomials(max_degree=2):
    for p1, p2, q1, q2 in itertools.product(range(max_degree + 1), repeat=4):
        if p1 + p2 == q1 + q2 and p1 + p2 <= max_degree:
            yield Monomial(p1, p2, q1, q2)


def _scale(H):
    return max(np.max(np.abs(H)), 1e-300)


def run_suite(
    max_n: int = 8,
    thetas=DEFAULT_THETAS,
    inject_fault: bool = False,
) -> list[PropertyResult]:
    h0: Callable = _faulty_h0 if inject_fault else build_H0
    worst: dict[str, float] = {}
    limits = {
        "fock.adjoint_transpose": 0.0,
        "fock.commutator": 1e-12,
        "fock.number_conservation": 0.0,
        "hamiltonian.symmetric": 0.0,
        "hamiltonian.h0_theta0_diagonal": 1e-14,
        "hamiltonian.linearity": 1e-12,
        "analytic.rotation_orthogonal": 1e-12,
        "analytic.rotation_group": 1e-10,
        "analytic.h0_diagonalized": 1e-10,
        "analytic.spectrum_offset_spread": 1e-9,
        "analytic.offset_constant": 1e-10,
        "analytic.hprime_closed_form_theta2": 0.2,
        "eigensolver.residual": 1e-10,
        "eigensolver.orthogonality": 1e-10,
        "eigensolver.trace": 1e-10,
        "perturbation.second_order_scaling": 1e-12,
        "perturbation.first_order_closed_form": 0.0,
    }
    worst = {k: 0.0 for k in limits}

    def bump(key, value):
        worst[key] = max(worst[key], float(value))

    for N in range(1, max_n + 1):
        basis = build_basis(N)
        n1, n2, d = number_matrices(basis)
        for m in _monomials():
            bump("fock.adjoint_transpose", np.max(np.abs(monomial_matrix(basis, m).T - monomial_matrix(basis, m.adjoint()))))
        up, down = monomial_matrix(basis, HOP_12), monomial_matrix(basis, HOP_21)
        bump("fock.commutator", np.max(np.abs(up @ down - down @ up - d)))
        bump("fock.number_conservation", np.max(np.abs(n1 + n2 - N * np.eye(basis.dim))))

        base = ModelParams(N, 0.0, 1.0, 0.1)
        H = h0(basis, base)
        bump("hamiltonian.h0_theta0_diagonal", np.max(np.abs(H - np.diag(np.diag(H)))) / _scale(H))

        c1 = CouplingSet(0.3, -0.2, 0.1, 0.05, 0.04, 0.03, 0.02, 0.01, 0.005)
        c2 = CouplingSet(-0.1, 0.4, 0.2, -0.05, 0.01, 0.02, -0.03, 0.04, 0.01)
        lhs = build_generic(basis, c1 + c2)
        bump("hamiltonian.linearity",
             np.max(np.abs(lhs - build_generic(basis, c1) - build_generic(basis, c2))) / _scale(lhs))

        for theta in thetas:
            R = rotation_matrix(basis, theta)
            bump("analytic.rotation_orthogonal", np.max(np.abs(R.T @ R - np.eye(basis.dim))))
            bump("analytic.rotation_group", np.max(np.abs(R @ R - rotation_matrix(basis, 2 * theta))))

            for A1, A2 in itertools.product(A1_GRID, A2_GRID):
                p = ModelParams(N, theta, A1, A2, epsilon=0.01 * A1 * theta, I1=1e-4, I2=5e-5, I3=3e-5)
                H = h0(basis, p)
                for M in (H, build_Hprime(basis, p), build_Hsecond(basis, p)):
                    bump("hamiltonian.symmetric", np.max(np.abs(M - M.T)))
                scale = np.max(np.sum(np.abs(H), axis=1))
                Rv = eigenbasis(basis, theta)
                D = Rv.T @ H @ Rv
                bump("analytic.h0_diagonalized", np.max(np.abs(D - np.diag(np.diag(D)))) / scale)

                dec = jacobi_eigh(H)
                analytic = np.sort([eigenenergy(s.n1, s.n2, A1, A2) for s in basis])
                _, spread = spectrum_distance(dec.eigenvalues, analytic)
                bump("analytic.spectrum_offset_spread", spread / scale)
                bump("analytic.offset_constant",
                     abs(fit_offset(dec.eigenvalues, analytic) - offset_constant(N, A2)) / scale)

                resid = H @ dec.eigenvectors - dec.eigenvectors * dec.eigenvalues
                bump("eigensolver.residual", np.max(np.abs(resid)) / scale)
                bump("eigensolver.orthogonality",
                     np.max(np.abs(dec.eigenvectors.T @ dec.eigenvectors - np.eye(basis.dim))))
                bump("eigensolver.trace", abs(np.sum(dec.eigenvalues) - np.trace(H)) / max(abs(np.trace(H)), scale))

                bump("perturbation.first_order_closed_form",
                     np.max(np.abs(first_order(p) - np.array(
                         [-1.5 * p.epsilon * theta * s.d + 4 * s.n1 * s.n2 * p.I1 for s in basis]))))
                if not _coupled_degenerate(p):
                    q = p.replace(I1=0.0, I2=0.0, I3=0.0)
                    e_full, _ = second_order(q)
                    e_half, _ = second_order(q.replace(epsilon=q.epsilon / 2))
                    nz = np.abs(e_full) > 0
                    if np.any(nz):
                        bump("perturbation.second_order_scaling", np.max(np.abs(e_half[nz] / e_full[nz] - 0.25)) * 4)

            if N <= 8 and theta / 2 >= 0.01:
                p = ModelParams(N, theta, 1.0, 0.1, epsilon=0.01)
                ratio = _hprime_residual(basis, p) / _hprime_residual(basis, p.replace(theta=theta / 2))
                bump("analytic.hprime_closed_form_theta2", abs(ratio / 4.0 - 1.0))

    return [PropertyResult(k, worst[k], limits[k], worst[k] <= limits[k]) for k in limits]


def _coupled_degenerate(p):
    basis = build_basis(p.N)
    return any(abs(basis.index(a) - basis.index(b)) in COUPLED_STEPS for a, b in detect_degeneracies(p))


def _hprime_residual(basis, p):
    Rv = eigenbasis(basis, p.theta)
    return np.max(np.abs(Rv.T @ build_Hprime(basis, p) @ Rv - hprime_closed_form(basis, p)))


def format_results(results: list[PropertyResult], elapsed: float | None = None) -> str:
    lines = [r.line() for r in results]
    failed = sum(not r.passed for r in results)
    summary = f"{len(results) - failed}/{len(results)} properties passed"
    if elapsed is not None:
        summary += f" in {elapsed:.1f} s"
    return "\n".join(lines + [summary]) + "\n"


def timed_suite(**kwargs) -> tuple[list[PropertyResult], float]:
    t0 = time.perf_counter()
    res = run_suite(**kwargs)
    return res, time.perf_counter() - t0
