import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twomode.eigensolver import (
    LengthMismatch,
    NoConvergence,
    NotSymmetric,
    jacobi_eigh,
    spectrum_distance,
)


def random_symmetric(n, seed):
    A = np.random.default_rng(seed).standard_normal((n, n))
    return 0.5 * (A + A.T)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 40), seed=st.integers(0, 2**20))
def test_agrees_with_lapack(n, seed):
    A = random_symmetric(n, seed)
    dec = jacobi_eigh(A)
    np.testing.assert_allclose(dec.eigenvalues, np.linalg.eigvalsh(A), atol=1e-11 * max(1.0, np.abs(A).max()))
    V = dec.eigenvectors
    assert np.max(np.abs(A @ V - V * dec.eigenvalues)) < 1e-10 * np.linalg.norm(A, np.inf)
    assert np.max(np.abs(V.T @ V - np.eye(n))) < 1e-12


def test_diagonal_input_needs_no_sweeps():
    dec = jacobi_eigh(np.diag([3.0, -1.0, 2.0]))
    assert dec.sweeps == 0
    assert list(dec.eigenvalues) == [-1.0, 2.0, 3.0]


def test_degenerate_subspace_is_orthonormal():
    Q, _ = np.linalg.qr(np.random.default_rng(1).standard_normal((6, 6)))
    A = Q @ np.diag([1.0, 1.0, 1.0, 2.0, 2.0, 5.0]) @ Q.T
    dec = jacobi_eigh(0.5 * (A + A.T))
    np.testing.assert_allclose(dec.eigenvalues, [1, 1, 1, 2, 2, 5], atol=1e-12)
    np.testing.assert_allclose(dec.eigenvectors.T @ dec.eigenvectors, np.eye(6), atol=1e-12)


def test_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        jacobi_eigh([[1.0, 2.0], [0.0, 1.0]])


def test_rejects_non_square():
    with pytest.raises(ValueError):
        jacobi_eigh(np.zeros((2, 3)))


def test_sweep_budget():
    with pytest.raises(NoConvergence) as info:
        jacobi_eigh(random_symmetric(30, 0), max_sweeps=1)
    assert info.value.max_sweeps == 1 and info.value.off > 0


def test_does_not_touch_input():
    A = random_symmetric(5, 3)
    before = A.copy()
    jacobi_eigh(A)
    assert np.array_equal(A, before)


def test_spectrum_distance():
    assert spectrum_distance([1.0, 2.0], [0.5, 1.0]) == (1.0, 0.5)
    assert spectrum_distance([], []) == (0.0, 0.0)
    with pytest.raises(LengthMismatch):
        spectrum_distance([1.0], [1.0, 2.0])
