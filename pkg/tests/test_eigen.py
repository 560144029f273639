import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsdcnet.eigen import ConvergenceError, jacobi_eigh


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


@pytest.mark.parametrize("n", [1, 2, 3, 4, 8, 16])
def test_matches_lapack(n):
    rng = np.random.default_rng(n)
    a = random_hermitian(rng, n)
    w, v = jacobi_eigh(a)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(a), atol=1e-10)
    for lam, vec in zip(w, v.T):
        assert np.linalg.norm(a @ vec - lam * vec) < 1e-9
    np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-10)


def test_already_diagonal():
    w, v = jacobi_eigh(np.diag([0.75, 0.25]))
    np.testing.assert_allclose(w, [0.25, 0.75])
    np.testing.assert_allclose(np.abs(v), [[0, 1], [1, 0]])


def test_purely_imaginary_offdiagonal():
    sy = np.array([[0, -1j], [1j, 0]])
    w, _ = jacobi_eigh(sy)
    np.testing.assert_allclose(w, [-1, 1], atol=1e-14)


def test_rejects_non_hermitian():
    with pytest.raises(ValueError, match="Hermitian"):
        jacobi_eigh(np.array([[0, 1], [0, 0]]))


def test_sweep_cap():
    rng = np.random.default_rng(0)
    with pytest.raises(ConvergenceError):
        jacobi_eigh(random_hermitian(rng, 8), max_sweeps=1)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=16), st.integers(min_value=0, max_value=2**32 - 1))
def test_eigenpair_residuals(n, seed):
    a = random_hermitian(np.random.default_rng(seed), n)
    w, v = jacobi_eigh(a)
    assert np.max(np.linalg.norm(a @ v - v * w, axis=0)) < 1e-9
