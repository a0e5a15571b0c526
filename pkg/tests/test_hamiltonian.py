import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twomode.fock import HOP_12, HOP_21, build_basis, monomial_matrix, number_matrices
from twomode.hamiltonian import (
    CouplingSet,
    ModelParams,
    build_generic,
    build_H0,
    build_Hprime,
    build_Hsecond,
    build_theta0,
    build_total,
    h0_couplings,
    rotate_couplings,
)

finite = st.floats(-2, 2, allow_nan=False)


def test_couplings_reject_nonfinite():
    with pytest.raises(ValueError):
        CouplingSet(E1=math.nan)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(-1, 0.1, 1.0, 0.1)
    with pytest.raises(ValueError):
        ModelParams(2, math.inf, 1.0, 0.1)


def test_single_particle_block():
    # N = 1 is the 2x2 matrix [[E1, E12], [E12, E2]]
    H = build_generic(build_basis(1), CouplingSet(E1=0.3, E2=-0.7, E12=0.2, U1111=5.0, U1212=9.0))
    np.testing.assert_allclose(H, [[0.3, 0.2], [0.2, -0.7]], atol=1e-15)


def test_two_particle_expansion_by_hand():
    # states |2,0>, |1,1>, |0,2>
    c = CouplingSet(E1=1.0, E2=2.0, E12=0.5, U1111=0.1, U2222=0.2, U1212=0.3,
                    U1112=0.04, U2212=0.05, U1122=0.06)
    H = build_generic(build_basis(2), c)
    r2 = math.sqrt(2.0)
    expected = np.array([
        [2 * 1.0 + 2 * 0.1, r2 * 0.5 + 2 * r2 * 0.04, 2 * 0.06],
        [0, 1.0 + 2.0 + 4 * 0.3, r2 * 0.5 + 2 * r2 * 0.05],
        [0, 0, 2 * 2.0 + 2 * 0.2],
    ])
    expected = np.triu(expected) + np.triu(expected, 1).T
    np.testing.assert_allclose(H, expected, atol=1e-14)


def test_h0_identity_with_rotated_imbalance():
    # H0 = A1 D + A2 D^2 + A2 N (N - 2), D = cos(θ) d + sin(θ)(c1†c2 + c2†c1)
    for N in (1, 3, 6):
        b = build_basis(N)
        _, _, d = number_matrices(b)
        X = monomial_matrix(b, HOP_12) + monomial_matrix(b, HOP_21)
        for theta in (0.0, 0.3, 1.1):
            p = ModelParams(N, theta, 0.7, 0.13)
            D = math.cos(theta) * d + math.sin(theta) * X
            rhs = p.A1 * D + p.A2 * D @ D + p.A2 * N * (N - 2) * np.eye(b.dim)
            np.testing.assert_allclose(build_H0(b, p), rhs, atol=1e-12)


def test_h0_at_zero_theta_is_diagonal():
    b = build_basis(5)
    H = build_H0(b, ModelParams(5, 0.0, 1.0, 0.1))
    assert np.array_equal(H, np.diag(np.diag(H)))


@settings(max_examples=30, deadline=None)
@given(N=st.integers(0, 8), theta=st.floats(-1, 1), A1=finite, A2=finite,
       eps=finite, I1=finite, I2=finite, I3=finite)
def test_symmetric_and_additive(N, theta, A1, A2, eps, I1, I2, I3):
    b = build_basis(N)
    p = ModelParams(N, theta, A1, A2, eps, I1, I2, I3)
    parts = [build_H0(b, p), build_Hprime(b, p), build_Hsecond(b, p)]
    for M in parts:
        assert np.array_equal(M, M.T)
    np.testing.assert_allclose(build_total(b, p), sum(parts), atol=1e-12)


def test_generic_is_linear():
    b = build_basis(4)
    c1 = CouplingSet(0.3, -0.2, 0.1, 0.05, 0.04, 0.03, 0.02, 0.01, 0.005)
    c2 = c1.scaled(-1.5) + CouplingSet(E12=2.0)
    np.testing.assert_allclose(build_generic(b, c1 + c2),
                               build_generic(b, c1) + build_generic(b, c2), atol=1e-13)


def test_rotation_of_symmetric_integrals_reproduces_h0():
    # with no tunnelling or exchange and equal wells the rotated model is H0 + const
    Ea, Eb, U, theta, N = 0.4, -0.4, 0.2, 0.35, 5
    rot = rotate_couplings(Ea, Eb, 0.0, U, U, 0.0, 0.0, 0.0, theta)
    b = build_basis(N)
    p = ModelParams(N, theta, A1=0.5 * (Ea - Eb), A2=0.5 * U)
    diff = build_generic(b, rot) - build_H0(b, p)
    np.testing.assert_allclose(diff - diff[0, 0] * np.eye(b.dim), 0.0, atol=1e-12)


def test_rotation_zero_angle_is_identity():
    rot = rotate_couplings(1.0, 0.5, 0.01, 0.3, 0.25, 1e-3, 2e-3, 3e-3, 0.0)
    assert rot.as_dict() == pytest.approx(dict(
        E1=1.0, E2=0.5, E12=0.01, U1111=0.3, U2222=0.25,
        U1212=1e-3, U1112=2e-3, U2212=3e-3, U1122=1e-3))


def test_theta0_builder():
    b = build_basis(3)
    H = build_theta0(b, 1.0, -1.0, 0.2, 0.3)
    n1, n2, _ = number_matrices(b)
    expected = n1 - n2 + 0.2 * n1 @ (n1 - np.eye(4)) + 0.3 * n2 @ (n2 - np.eye(4))
    np.testing.assert_allclose(H, expected, atol=1e-14)


def test_h0_couplings_table():
    c = h0_couplings(ModelParams(2, 0.5, 1.0, 0.1))
    cs, sn = math.cos(0.5), math.sin(0.5)
    assert c.E1 == pytest.approx(cs) and c.E2 == pytest.approx(-cs) and c.E12 == pytest.approx(sn)
    assert c.U1111 == pytest.approx(0.1 * (1 + cs**2))
    assert c.U1112 == pytest.approx(0.1 * cs * sn) and c.U2212 == pytest.approx(-0.1 * cs * sn)
