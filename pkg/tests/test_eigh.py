import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bisection_eigenvalues
from wignerlab.ensemble import gue
from wignerlab.spectral import ConvergenceError, NotHermitianError, eigh, eigvalsh
from wignerlab.spectral import _kernels


def random_hermitian(n, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (a + a.conj().T) / 2


def invariants(h, dec):
    n = h.shape[0]
    v, mu = dec.eigenvectors, dec.eigenvalues
    resid = np.max(np.linalg.norm(h @ v - v * mu, axis=0))
    orth = np.max(np.abs(v.conj().T @ v - np.eye(n)))
    trace = abs(mu.sum() - np.trace(h).real)
    return resid / max(1.0, np.linalg.norm(h)), orth, trace


def test_diagonal():
    dec = eigh(np.diag([3.0, 1.0, 2.0]).astype(complex))
    assert np.allclose(dec.eigenvalues, [1, 2, 3], atol=1e-15)
    assert np.allclose(np.abs(dec.eigenvectors), np.eye(3)[:, [1, 2, 0]], atol=1e-15)


def test_pauli_x():
    dec = eigh(np.array([[0, 1], [1, 0]], dtype=complex))
    assert np.allclose(dec.eigenvalues, [-1, 1], atol=1e-15)
    v = dec.eigenvectors
    assert np.allclose(np.abs(v), 1 / np.sqrt(2), atol=1e-15)
    assert abs(v[0, 0] + v[1, 0]) < 1e-15 and abs(v[0, 1] - v[1, 1]) < 1e-15


def test_one_by_one_and_real_input():
    dec = eigh(np.array([[2.5]]))
    assert dec.eigenvalues[0] == 2.5 and dec.eigenvectors[0, 0] == 1
    h = random_hermitian(6, 1).real.copy()
    h = (h + h.T) / 2
    assert np.allclose(eigvalsh(h), np.linalg.eigvalsh(h), atol=1e-13)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_bisection_oracle(n):
    for seed in range(5):
        h = random_hermitian(n, 100 * n + seed)
        assert np.max(np.abs(eigvalsh(h) - bisection_eigenvalues(h))) <= 1e-10


@given(st.integers(1, 48), st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_decomposition_invariants(n, seed):
    h = random_hermitian(n, seed)
    dec = eigh(h)
    resid, orth, trace = invariants(h, dec)
    assert resid <= 1e-10 and orth <= 1e-10 and trace <= 1e-9 * n
    assert np.all(np.diff(dec.eigenvalues) >= 0)


def test_invariants_n256():
    h = gue(256, 11)
    resid, orth, trace = invariants(h, eigh(h))
    assert resid <= 1e-10 and orth <= 1e-10 and trace <= 1e-9 * 256


def test_phase_convention():
    dec = eigh(random_hermitian(20, 3))
    v = dec.eigenvectors
    idx = np.argmax(np.abs(v), axis=0)
    lead = v[idx, np.arange(20)]
    assert np.all(np.abs(lead.imag) < 1e-15) and np.all(lead.real > 0)


@given(st.integers(2, 24), st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_permutation_covariance(n, seed):
    h = random_hermitian(n, seed)
    p = np.random.default_rng(seed).permutation(n)
    assert np.max(np.abs(eigvalsh(h) - eigvalsh(h[np.ix_(p, p)]))) <= 1e-12 * max(1, np.abs(h).max() * n)


def test_degenerate_spectra():
    for h in (np.eye(5, dtype=complex), np.zeros((4, 4)), np.diag([1.0, 1, 2, 2, 2])):
        dec = eigh(h)
        resid, orth, _ = invariants(h, dec)
        assert resid <= 1e-12 and orth <= 1e-12
    # rank-one: one eigenvalue n, rest zero
    v = np.ones(6) / np.sqrt(6)
    dec = eigh(6 * np.outer(v, v).astype(complex))
    assert np.allclose(dec.eigenvalues, [0] * 5 + [6], atol=1e-13)


def test_scale_extremes():
    for scale in (1e-150, 1e150):
        h = random_hermitian(10, 2, scale)
        ref = np.linalg.eigvalsh(h)
        assert np.allclose(eigvalsh(h), ref, rtol=0, atol=1e-12 * np.abs(ref).max())


def test_not_hermitian():
    with pytest.raises(NotHermitianError):
        eigh(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(NotHermitianError):
        eigh(np.zeros((2, 3)))


def test_convergence_error_carries_index():
    d = np.array([1.0, 2.0, 3.0, 4.0])
    e = np.array([1.0, 1.0, 1.0, 0.0])
    assert _kernels.tridiagonal_ql(d.copy(), e.copy(), np.eye(4), True, 0) >= 0
    err = ConvergenceError(2)
    assert err.index == 2 and "2" in str(err)


def test_agrees_with_lapack():
    h = gue(120, 5)
    assert np.max(np.abs(eigvalsh(h) - np.linalg.eigvalsh(h))) <= 1e-12
