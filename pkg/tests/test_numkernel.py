import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coalab import numkernel as nk
from coalab.errors import NonzeroTrace, NotHermitian, NotPSD, NotSymmetric
from coalab.states import ghz, partial_trace

from conftest import random_complex, random_hermitian


def test_eig_diagonal_input_sorted_descending():
    w, v = nk.eig_hermitian(np.diag([1.0, 2.0]))
    assert np.allclose(w, [2, 1])
    assert np.allclose(np.abs(v), [[0, 1], [1, 0]])


def test_eig_pauli_x():
    w, _ = nk.eig_hermitian(np.array([[0, 1], [1, 0]]))
    assert np.allclose(w, [1, -1])


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eig_reconstruction_random_8x8(rng, method):
    h = random_hermitian(rng, 8)
    w, v = nk.eig_hermitian(h, method=method)
    assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - h)) < 1e-10
    assert np.max(np.abs(v.conj().T @ v - np.eye(8))) < 1e-12
    assert np.all(np.diff(w) <= 0)


def test_jacobi_agrees_with_lapack(rng):
    for n in range(1, 9):
        h = random_hermitian(rng, n)
        assert np.allclose(nk.jacobi_eigh(h).eigenvalues, np.linalg.eigvalsh(h)[::-1], atol=1e-12)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        nk.eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_sqrt_psd_examples():
    assert np.allclose(nk.sqrt_psd(np.eye(3)), np.eye(3))
    assert np.allclose(nk.sqrt_psd(np.diag([4.0, 9.0])), np.diag([2, 3]))
    rho = partial_trace(ghz(), "AB")
    s = nk.sqrt_psd(rho)
    assert np.max(np.abs(s @ s - rho)) < 1e-9


def test_sqrt_psd_rejects_negative():
    with pytest.raises(NotPSD):
        nk.sqrt_psd(np.diag([1.0, -1e-6]))


def test_takagi_examples():
    u, lam = nk.takagi(np.diag([3.0, 1.0]))
    assert np.allclose(lam, [3, 1])
    assert np.allclose(u @ np.diag(lam) @ u.T, np.diag([3, 1]))
    _, lam = nk.takagi(np.array([[0, 1], [1, 0]]))
    assert np.allclose(lam, [1, 1])


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
def test_takagi_random_symmetric(rng, n):
    a = random_complex(rng, n, n)
    s = a + a.T
    u, lam = nk.takagi(s)
    assert np.max(np.abs(u @ np.diag(lam) @ u.T - s)) < 1e-9
    assert np.max(np.abs(lam - np.linalg.svd(s, compute_uv=False))) < 1e-10
    assert np.max(np.abs(u.conj().T @ u - np.eye(n))) < 1e-12


def test_takagi_rank_deficient(rng):
    x = random_complex(rng, 4, 2)
    s = x @ x.T
    u, lam = nk.takagi(s)
    assert np.allclose(lam[2:], 0, atol=1e-12)
    assert np.max(np.abs(u @ np.diag(lam) @ u.T - s)) < 1e-10
    assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-12


def test_takagi_rejects_non_symmetric():
    with pytest.raises(NotSymmetric):
        nk.takagi(np.array([[0, 1], [2, 0]]))


def test_zero_diagonal_pauli_z():
    z = np.diag([1.0, -1.0])
    u = nk.zero_diagonal_unitary(z)
    assert np.allclose(np.diag(u @ z @ u.conj().T), 0)


def test_zero_diagonal_already_zero():
    m = np.array([[0, 1j], [2, 0]])
    u = nk.zero_diagonal_unitary(m)
    assert np.allclose(np.diag(u @ m @ u.conj().T), 0)


@pytest.mark.parametrize("n", range(2, 9))
def test_zero_diagonal_random(rng, n):
    m = random_complex(rng, n, n)
    m -= np.trace(m) / n * np.eye(n)
    u = nk.zero_diagonal_unitary(m)
    assert np.max(np.abs(np.diag(u @ m @ u.conj().T))) < 1e-10 * np.linalg.norm(m)
    assert np.max(np.abs(u @ u.conj().T - np.eye(n))) < 1e-12


def test_zero_diagonal_real_symmetric_gives_orthogonal(rng):
    a = rng.normal(size=(5, 5))
    m = a + a.T
    m -= np.trace(m) / 5 * np.eye(5)
    u = nk.zero_diagonal_unitary(m)
    assert np.isrealobj(u)
    assert np.max(np.abs(np.diag(u @ m @ u.T))) < 1e-12


def test_zero_diagonal_rejects_trace():
    with pytest.raises(NonzeroTrace):
        nk.zero_diagonal_unitary(np.eye(2))


def test_singular_values_examples(rng):
    assert np.allclose(nk.singular_values(np.eye(3)), [1, 1, 1])
    assert np.allclose(nk.singular_values(np.diag([0.2, 0.8])), [0.8, 0.2])
    m = random_complex(rng, 4, 4)
    s = nk.singular_values(m)
    assert np.max(np.abs(s**2 - np.linalg.eigvalsh(m.conj().T @ m)[::-1])) < 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_zero_diagonal_property(n, seed):
    rng = np.random.default_rng(seed)
    m = random_complex(rng, n, n)
    m -= np.trace(m) / n * np.eye(n)
    u = nk.zero_diagonal_unitary(m)
    assert np.max(np.abs(np.diag(u @ m @ u.conj().T))) < 1e-10 * np.linalg.norm(m)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_sqrt_psd_squares_back(n, seed):
    rng = np.random.default_rng(seed)
    x = random_complex(rng, n, max(1, n - 1))
    m = x @ x.conj().T
    s = nk.sqrt_psd(m)
    assert np.max(np.abs(s @ s - m)) < 1e-9 * max(1.0, np.linalg.norm(m))
