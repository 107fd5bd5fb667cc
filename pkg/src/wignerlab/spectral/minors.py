"""Principal minors and the interlacing properties they satisfy.

Indices are 0-based: ``minor(h, 0)`` removes the first row and column.
"""
from dataclasses import dataclass

import numpy as np


class EmptyMinorError(ValueError):
    pass


@dataclass(frozen=True)
class MinorExtraction:
    """``b``: H without row/column k; ``a``: column k of H without entry k."""

    b: np.ndarray
    a: np.ndarray
    h_kk: float
    k: int


def minor(h, k):
    h = np.asarray(h)
    n = h.shape[0]
    if n < 2:
        raise EmptyMinorError("a 1x1 matrix has no (N-1)x(N-1) minor")
    if not 0 <= k < n:
        raise IndexError(f"minor index {k} out of range for N={n}")
    keep = np.r_[0:k, k + 1:n]
    return MinorExtraction(
        b=h[np.ix_(keep, keep)].copy(),
        a=h[keep, k].copy(),
        h_kk=float(h[k, k].real),
        k=k,
    )


def reassemble(m):
    """Inverse of :func:`minor`: put row/column k back in place."""
    n = m.b.shape[0] + 1
    k = m.k
    keep = np.r_[0:k, k + 1:n]
    h = np.zeros((n, n), dtype=np.result_type(m.b, m.a, np.complex128))
    h[np.ix_(keep, keep)] = m.b
    h[keep, k] = m.a
    h[k, keep] = m.a.conj()
    h[k, k] = m.h_kk
    return h


def _values(spec):
    return np.asarray(getattr(spec, "eigenvalues", spec), dtype=float)


def interlacing_check(full, minor_spec):
    """Largest violation of mu_a <= lambda_a <= mu_{a+1}; 0 when interlaced.

    Accepts decompositions or plain ascending eigenvalue arrays.
    """
    mu = _values(full)
    lam = _values(minor_spec)
    if lam.shape[0] != mu.shape[0] - 1:
        raise ValueError(f"minor spectrum has {lam.shape[0]} values, expected {mu.shape[0] - 1}")
    if lam.size == 0:
        return 0.0
    viol = np.maximum(mu[:-1] - lam, lam - mu[1:])
    return float(max(viol.max(), 0.0))


def counting_function(eigs, x):
    """Unnormalized counting function #{alpha: mu_alpha <= x} (vectorized in x)."""
    return np.searchsorted(np.sort(_values(eigs)), x, side="right")


def cdf_defect(full, minor_spec):
    """max_x |N F(x) - (N-1) F^(k)(x)|, scanned over every jump point."""
    mu = np.sort(_values(full))
    lam = np.sort(_values(minor_spec))
    jumps = np.concatenate([mu, lam])
    diff = counting_function(mu, jumps) - counting_function(lam, jumps)
    return int(np.max(np.abs(diff))) if diff.size else 0
