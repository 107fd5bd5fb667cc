"""Dense Hermitian eigensolver: Householder tridiagonalization + implicit QL."""
from dataclasses import dataclass

import numpy as np

from wignerlab.spectral import _kernels

MAX_SWEEPS = 60
WY_BLOCK = 32


class NotHermitianError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    """QL iteration did not converge; ``index`` is the offending eigenvalue."""

    def __init__(self, index, sweeps=MAX_SWEEPS):
        super().__init__(f"eigenvalue {index} did not converge after {sweeps} sweeps")
        self.index = index


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = None

    @property
    def n(self):
        return self.eigenvalues.shape[0]


def check_hermitian(h, atol=0.0):
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {h.shape}")
    if h.shape[0] == 0:
        raise NotHermitianError("empty matrix")
    scale = max(1.0, float(np.max(np.abs(h))))
    dev = float(np.max(np.abs(h - h.conj().T)))
    if dev > atol * scale:
        raise NotHermitianError(f"matrix is not Hermitian (max |H - H*| = {dev:.3e})")
    return h


def _tridiagonal(h):
    h = np.asarray(h)
    ar = np.ascontiguousarray(h.real, dtype=np.float64).copy()
    if np.iscomplexobj(h):
        ai = np.ascontiguousarray(h.imag, dtype=np.float64).copy()
    else:
        ai = np.zeros_like(ar)
    d, er, ei, hs = _kernels.tridiagonalize(ar, ai)
    sub = er + 1j * ei
    offdiag = np.abs(sub)
    # diagonal unitary D making D^* T D real: phi_{k+1} = phi_k * e_k / |e_k|
    n = d.shape[0]
    phase = np.ones(n, dtype=np.complex128)
    for k in range(n - 1):
        unit = sub[k] / offdiag[k] if offdiag[k] > 0 else 1.0
        phase[k + 1] = phase[k] * unit
    reflectors = (ar + 1j * ai, hs)
    return d, offdiag, phase, reflectors


def _apply_reflectors(reflectors, w):
    """Overwrite ``w`` with ``P_0 P_1 ... P_{n-3} w`` using blocked WY updates."""
    a, hs = reflectors
    n = a.shape[0]
    nref = hs.shape[0]
    for stop in range(nref, 0, -WY_BLOCK):
        start = max(0, stop - WY_BLOCK)
        idx = [j for j in range(start, stop) if hs[j] != 0.0]
        if not idx:
            continue
        top = idx[0] + 1
        u = np.zeros((n - top, len(idx)), dtype=np.complex128)
        for c, j in enumerate(idx):
            u[j + 1 - top:, c] = a[j + 1:, j]
        tau = 1.0 / hs[idx]
        # forward product P_j1 P_j2 ... = I - U T U^*
        t = np.zeros((len(idx), len(idx)), dtype=np.complex128)
        gram = u.conj().T @ u
        for c in range(len(idx)):
            t[c, c] = tau[c]
            if c:
                t[:c, c] = -tau[c] * (t[:c, :c] @ gram[:c, c])
        block = w[top:]
        block -= u @ (t @ (u.conj().T @ block))
    return w


def _fix_phase(vectors):
    # largest-magnitude component made real positive
    idx = np.argmax(np.abs(vectors), axis=0)
    lead = vectors[idx, np.arange(vectors.shape[1])]
    vectors *= (lead.conj() / np.abs(lead))[None, :]
    return vectors


def eigh(h, vectors=True, check=True):
    """Eigendecomposition of a dense Hermitian matrix.

    Eigenvalues come back ascending. Eigenvectors (columns) are orthonormal
    with their largest-magnitude component real and positive.

    Raises :class:`NotHermitianError` for non-Hermitian input and
    :class:`ConvergenceError` if the QL iteration stalls.
    """
    h = np.asarray(h)
    if check:
        check_hermitian(h, atol=1e-12)
    n = h.shape[0]
    d, offdiag, phase, reflectors = _tridiagonal(h)
    e = np.zeros(n)
    e[: n - 1] = offdiag
    zt = np.eye(n) if vectors else np.zeros((1, 1))
    status = _kernels.tridiagonal_ql(d, e, zt, vectors, MAX_SWEEPS)
    if status >= 0:
        raise ConvergenceError(int(status))
    order = np.argsort(d, kind="stable")
    evals = d[order]
    if not vectors:
        return EigenDecomposition(evals)
    z = zt[order].T
    w = phase[:, None] * z
    w = _apply_reflectors(reflectors, w)
    return EigenDecomposition(evals, _fix_phase(w))


def eigvalsh(h, check=True):
    return eigh(h, vectors=False, check=check).eigenvalues
