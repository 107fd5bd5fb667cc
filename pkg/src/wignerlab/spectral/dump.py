"""Binary cache format for eigendecompositions.

Layout (little-endian)::

    b"WLEV1"                       5-byte magic
    uint64  n                      dimension
    uint64  ncols                  number of stored eigenvectors (0 or n)
    float64 eigenvalues[n]
    float64 vectors[n][ncols][2]   row-major, (re, im) interleaved
"""
import struct

import numpy as np

from wignerlab.spectral.eigh import EigenDecomposition

MAGIC = b"WLEV1"
_HEADER = struct.Struct("<5sQQ")


def dumps(decomp):
    evals = np.ascontiguousarray(decomp.eigenvalues, dtype="<f8")
    n = evals.shape[0]
    vecs = decomp.eigenvectors
    ncols = 0 if vecs is None else vecs.shape[1]
    parts = [_HEADER.pack(MAGIC, n, ncols), evals.tobytes()]
    if ncols:
        parts.append(np.ascontiguousarray(vecs, dtype="<c16").tobytes())
    return b"".join(parts)


def loads(blob):
    if len(blob) < _HEADER.size:
        raise ValueError("truncated WLEV1 header")
    magic, n, ncols = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if ncols not in (0, n):
        raise ValueError(f"inconsistent vector count {ncols} for n={n}")
    expected = _HEADER.size + 8 * n + 16 * n * ncols
    if len(blob) != expected:
        raise ValueError(f"WLEV1 payload is {len(blob)} bytes, expected {expected}")
    off = _HEADER.size
    evals = np.frombuffer(blob, dtype="<f8", count=n, offset=off).astype(np.float64)
    vecs = None
    if ncols:
        vecs = np.frombuffer(blob, dtype="<c16", count=n * ncols, offset=off + 8 * n)
        vecs = vecs.reshape(n, ncols).astype(np.complex128)
    return EigenDecomposition(evals, vecs)


def save(path, decomp):
    with open(path, "wb") as fh:
        fh.write(dumps(decomp))


def load(path):
    with open(path, "rb") as fh:
        return loads(fh.read())
