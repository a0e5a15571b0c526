import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twomode.eigensolver import jacobi_eigh
from twomode.fock import FockState, build_basis
from twomode.hamiltonian import ModelParams, build_H0, build_Hprime
from twomode.perturbation import (
    DegenerateSpectrum,
    detect_degeneracies,
    first_order,
    perturbation_matrix,
    perturbation_report,
    second_order,
)


def test_single_particle_second_order():
    # two levels split by 2 A1 and coupled by -ε: E2 = ±ε²/(2 A1)
    p = ModelParams(1, 0.1, 1.0, 0.1, epsilon=0.01)
    E2, C = second_order(p)
    np.testing.assert_allclose(E2, [5e-5, -5e-5], rtol=1e-12)
    assert C[1, 0] == pytest.approx(-0.01 / 2.0)


def test_first_order_closed_form():
    p = ModelParams(3, 0.2, 1.0, 0.1, epsilon=0.01, I1=1e-3)
    d = np.array([3, 1, -1, -3])
    n1n2 = np.array([0, 2, 2, 0])
    np.testing.assert_allclose(first_order(p), -1.5 * 0.01 * 0.2 * d + 4e-3 * n1n2, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(N=st.integers(1, 8), theta=st.floats(0.02, 0.4), eps=st.floats(1e-5, 1e-2))
def test_second_order_quadratic_in_epsilon(N, theta, eps):
    p = ModelParams(N, theta, 1.0, 0.1, epsilon=eps)
    try:
        full, _ = second_order(p)
    except DegenerateSpectrum:
        return
    half, _ = second_order(p.replace(epsilon=eps / 2))
    np.testing.assert_allclose(half, full / 4, rtol=1e-12, atol=0)


def test_vacuum_has_no_corrections():
    rep = perturbation_report(ModelParams(0, 0.1, 1.0, 0.1, epsilon=0.01))
    assert rep.total.tolist() == [0.0]


def test_degeneracy_detection_and_refusal():
    # A1 d + A2 d² with A2 = 0.1: d = -4 and d = -6 collide at N = 6
    p = ModelParams(6, 0.1, 1.0, 0.1, epsilon=1e-3)
    pairs = detect_degeneracies(p)
    assert (FockState(1, 5), FockState(0, 6)) in pairs
    with pytest.raises(DegenerateSpectrum) as info:
        second_order(p)
    assert info.value.pairs


def test_uncoupled_degeneracy_is_tolerated():
    # at N = 8, d = -2 and d = -8 coincide but are three steps apart
    p = ModelParams(8, 0.1, 1.0, 0.1, epsilon=1e-3)
    b = build_basis(8)
    steps = {abs(b.index(x) - b.index(y)) for x, y in detect_degeneracies(p)}
    assert 3 in steps


def test_rotated_elements_converge_cubically():
    # exact eigenbasis elements make the remainder O(ε³)
    b = build_basis(3)
    gaps = []
    for eps in (1e-3, 5e-4):
        p = ModelParams(3, 0.1, 1.0, 0.1, epsilon=eps)
        rep = perturbation_report(p, elements="rotated")
        exact = jacobi_eigh(build_H0(b, p) + build_Hprime(b, p)).eigenvalues
        diff = exact - np.sort(rep.total)
        gaps.append(np.ptp(diff))
    assert gaps[0] / gaps[1] > 6


def test_perturbation_matrix_sources():
    b = build_basis(2)
    p = ModelParams(2, 0.1, 1.0, 0.1, epsilon=1e-3)
    closed, rotated = perturbation_matrix(b, p), perturbation_matrix(b, p, "rotated")
    assert np.max(np.abs(closed - rotated)) < 1e-4
    with pytest.raises(ValueError):
        perturbation_matrix(b, p, "bogus")
