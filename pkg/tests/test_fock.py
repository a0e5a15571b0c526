import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twomode.fock import (
    ASSIST_1,
    CROSS,
    HOP_12,
    HOP_21,
    PAIR,
    FockState,
    Monomial,
    NonConservingMonomial,
    build_basis,
    monomial_matrix,
    number_matrices,
)


def ladder_oracle(N, mono):
    """Same operator built from truncated single-mode ladders and a Kronecker
    product, then restricted to the fixed-N block."""
    cap = N + 1
    a = np.diag(np.sqrt(np.arange(1, cap)), 1)
    ad = a.T
    eye = np.eye(cap)
    c1, c2 = np.kron(a, eye), np.kron(eye, a)
    c1d, c2d = np.kron(ad, eye), np.kron(eye, ad)
    mp = np.linalg.matrix_power
    op = mp(c1d, mono.p1) @ mp(c2d, mono.p2) @ mp(c1, mono.q1) @ mp(c2, mono.q2)
    idx = [n1 * cap + (N - n1) for n1 in range(N, -1, -1)]
    return op[np.ix_(idx, idx)]


def test_basis_order_and_size():
    b = build_basis(3)
    assert b.dim == 4
    assert [(s.n1, s.n2) for s in b] == [(3, 0), (2, 1), (1, 2), (0, 3)]
    assert list(b.imbalances()) == [3, 1, -1, -3]
    assert b.index(FockState(1, 2)) == 2


def test_vacuum_basis():
    b = build_basis(0)
    assert b.dim == 1 and b.states[0] == FockState(0, 0)


def test_negative_occupations_rejected():
    with pytest.raises(ValueError):
        FockState(-1, 2)


def test_index_rejects_other_sector():
    with pytest.raises(KeyError):
        build_basis(2).index(FockState(2, 1))


def test_nonconserving_monomial():
    with pytest.raises(NonConservingMonomial):
        Monomial(1, 0, 0, 0)


@pytest.mark.parametrize("mono", [HOP_12, HOP_21, CROSS, ASSIST_1, PAIR, Monomial(1, 1, 0, 2)])
@pytest.mark.parametrize("N", [1, 2, 5, 9])
def test_matches_ladder_oracle(N, mono):
    np.testing.assert_allclose(monomial_matrix(build_basis(N), mono), ladder_oracle(N, mono), atol=1e-12)


def test_hop_elements_by_hand():
    # c1† c2 |1,1> = sqrt(2) |2,0>
    M = monomial_matrix(build_basis(2), HOP_12)
    assert M[0, 1] == pytest.approx(np.sqrt(2.0), abs=0)
    assert M[1, 2] == pytest.approx(np.sqrt(2.0), abs=0)
    assert np.count_nonzero(M) == 2


@settings(max_examples=40, deadline=None)
@given(N=st.integers(0, 12), p1=st.integers(0, 2), q1=st.integers(0, 2), p2=st.integers(0, 2))
def test_adjoint_is_transpose(N, p1, q1, p2):
    q2 = p1 + p2 - q1
    if q2 < 0:
        return
    m = Monomial(p1, p2, q1, q2)
    b = build_basis(N)
    assert np.array_equal(monomial_matrix(b, m).T, monomial_matrix(b, m.adjoint()))


@settings(max_examples=20, deadline=None)
@given(N=st.integers(1, 15))
def test_su2_commutator(N):
    b = build_basis(N)
    up, down = monomial_matrix(b, HOP_12), monomial_matrix(b, HOP_21)
    _, _, d = number_matrices(b)
    np.testing.assert_allclose(up @ down - down @ up, d, atol=1e-12)


def test_number_operators():
    n1, n2, d = number_matrices(build_basis(4))
    np.testing.assert_array_equal(n1 + n2, 4 * np.eye(5))
    np.testing.assert_array_equal(np.diag(d), [4, 2, 0, -2, -4])
