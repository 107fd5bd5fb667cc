"""Projection-norm concentration for i.i.d. vectors and a Khintchine-type bound.

Entries of ``z`` are ``x + i y`` with ``x, y`` i.i.d. from an
:class:`EntryDistribution` of variance 1/2, so ``a = E|z_i|^2 = 1``.
"""
import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from wignerlab.delocalization import complex_entries, wilson
from wignerlab.ensemble import EntryDistribution
from wignerlab.rng import derive_seed, stream

MOMENT_HEADER = "q,m,n,dist,ratio,stderr"


class MomentRangeWarning(UserWarning):
    """q >= m lies outside the range where the moment bound is asserted."""


@dataclass(frozen=True)
class Projection:
    n: int
    m: int
    p: np.ndarray
    basis: np.ndarray

    def check(self):
        """(||P^2 - P||_F, ||P - P*||_max, |tr P - m|)."""
        p = self.p
        return (
            float(np.linalg.norm(p @ p - p)),
            float(np.max(np.abs(p - p.conj().T))) if p.size else 0.0,
            float(abs(np.trace(p).real - self.m)),
        )

    def column_weights(self):
        """|P e_i|^2 = P_ii."""
        return np.sum(np.abs(self.basis) ** 2, axis=1)


def projection_from_basis(q):
    n, m = q.shape
    return Projection(n, m, q @ q.conj().T, q)


def random_projection(n, m, seed):
    """Rank-m orthogonal projection onto the span of m complex Gaussian columns."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 0 <= m <= n:
        raise ValueError(f"rank {m} outside [0, {n}]")
    if m == 0:
        return Projection(n, 0, np.zeros((n, n), dtype=complex), np.zeros((n, 0), dtype=complex))
    gen = stream(seed, 4)
    g = gen.standard_normal((n, m)) + 1j * gen.standard_normal((n, m))
    q, _ = np.linalg.qr(g)
    return projection_from_basis(q)


def eigenvector_projection(decomp, indices):
    """Projection onto the span of the selected eigenvectors."""
    return projection_from_basis(np.ascontiguousarray(decomp.eigenvectors[:, list(indices)]))


def proj_norm_sq(proj, z):
    """||P z||^2 computed as ||Q* z||^2 with Q an orthonormal basis of range(P).

    ``z`` may be one vector or a stack of row vectors.
    """
    z = np.asarray(z)
    if z.shape[-1] != proj.n:
        raise ValueError(f"vector length {z.shape[-1]} != {proj.n}")
    return np.sum(np.abs(z @ proj.basis.conj()) ** 2, axis=-1)


def proj_norm_expansion(proj, z, a=1.0):
    """Same quantity split as a m + sum_i (|z_i|^2 - a) P_ii + sum_{i != j} conj(z_i) P_ij z_j.

    Returns (total, diagonal_centered, off_diagonal).
    """
    z = np.asarray(z)
    w = proj.column_weights()
    diag = np.sum((np.abs(z) ** 2 - a) * w, axis=-1)
    full = np.einsum("...i,ij,...j->...", z.conj(), proj.p, z).real
    off = full - np.sum(np.abs(z) ** 2 * w, axis=-1)
    return a * proj.m + diag + off, diag, off


@dataclass(frozen=True)
class MomentSample:
    values: np.ndarray
    a: float
    m: int

    def mean(self):
        return float(self.values.mean())

    def stderr(self):
        return float(self.values.std(ddof=1) / math.sqrt(self.values.size))


def sample_norms(proj, trials, dist, seed, chunk=16384):
    gen = stream(seed, 5)
    out = np.empty(trials)
    for start in range(0, trials, chunk):
        size = min(chunk, trials - start)
        out[start:start + size] = proj_norm_sq(proj, complex_entries(dist, gen, (size, proj.n)))
    return MomentSample(out, 2 * dist.variance, proj.m)


def lower_tail_estimate(n, m, delta, trials, dist=None, seed=0, refresh=100):
    """Empirical P(||Pz||^2 <= delta m) over (P, z) pairs, with Wilson CI.

    A fresh random projection is drawn every ``refresh`` vectors
    (``refresh=1`` gives a new P for every draw).
    """
    if trials < 1000:
        raise ValueError("need at least 1000 trials")
    dist = dist or EntryDistribution("rademacher", 0.5)
    if dist.kind not in ("rademacher", "gaussian"):
        raise ValueError("lower-tail estimates take bounded (rademacher) or gaussian entries")
    hits = 0
    gen = stream(seed, 6)
    for block, start in enumerate(range(0, trials, refresh)):
        size = min(refresh, trials - start)
        proj = random_projection(n, m, derive_seed(seed, 6, block))
        vals = proj_norm_sq(proj, complex_entries(dist, gen, (size, n)))
        hits += int(np.count_nonzero(vals <= delta * m))
    return wilson(hits, trials, delta, m)


@dataclass(frozen=True)
class MomentRatio:
    q: int
    m: int
    n: int
    dist: str
    ratio: float
    stderr: float

    def row(self):
        return [self.q, self.m, self.n, self.dist, self.ratio, self.stderr]


def _moment_ratio(dev, q, scale):
    """[E|dev|^q]^{1/q} / scale with a delta-method standard error."""
    pw = np.abs(dev) ** q
    mom = pw.mean()
    if mom == 0:
        return 0.0, 0.0
    se_mom = pw.std(ddof=1) / math.sqrt(pw.size)
    est = mom ** (1 / q)
    return float(est / scale), float(est * se_mom / (q * mom) / scale)


def moment_ratio(sample, q):
    """(ratio, stderr) of the centered q-th moment for an existing sample."""
    return _moment_ratio(sample.values - sample.a * sample.m, q, math.sqrt(q * sample.m))


def centered_moment_ratio(n, m, q, trials, dist=None, seed=0, proj=None):
    """[E| ||Pz||^2 - a m |^q]^{1/q} / (sqrt(q) sqrt(m)) for one projection."""
    if q < 2 or q % 2:
        raise ValueError("q must be an even integer >= 2")
    if q >= m:
        warnings.warn(f"q={q} >= m={m}: outside the range of the moment bound", MomentRangeWarning, stacklevel=2)
    dist = dist or EntryDistribution("rademacher", 0.5)
    proj = proj if proj is not None else random_projection(n, m, seed)
    ratio, se = moment_ratio(sample_norms(proj, trials, dist, seed), q)
    return MomentRatio(q, proj.m, proj.n, dist.kind, ratio, se)


def khintchine_ratio(coeffs, q, trials=None, dist=None, seed=0, exact=False):
    """||sum_j a_j x_j||_q / (sqrt(q) ||X||_2) with ||X||_2^2 = sum |a_j|^2 E x^2.

    ``x_j`` are real i.i.d. draws of ``dist``. With ``exact=True`` (rademacher
    only) the q-th moment is an exact average over all sign patterns.
    Returns (ratio, stderr); the stderr is 0 for exact enumeration.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if not np.any(coeffs):
        raise ValueError("coefficients are all zero")
    if q < 2 or q % 2:
        raise ValueError("q must be an even integer >= 2")
    dist = dist or EntryDistribution("rademacher", 0.5)
    norm2 = math.sqrt(float(np.sum(np.abs(coeffs) ** 2)) * dist.variance)
    scale = math.sqrt(q) * norm2
    if exact:
        if dist.kind != "rademacher":
            raise ValueError("exact enumeration needs rademacher entries")
        if coeffs.size > 24:
            raise ValueError("exact enumeration limited to 24 coefficients")
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=coeffs.size)))
        x = signs * math.sqrt(dist.variance)
        mom = np.mean(np.abs(x @ coeffs) ** q)
        return float(mom ** (1 / q) / scale), 0.0
    if trials is None:
        raise ValueError("Monte Carlo estimate needs a trial count")
    gen = stream(seed, 7)
    sums = np.empty(trials, dtype=complex)
    chunk = max(1, 2**22 // coeffs.size)
    for start in range(0, trials, chunk):
        size = min(chunk, trials - start)
        sums[start:start + size] = dist.sample(gen, (size, coeffs.size)) @ coeffs
    return _moment_ratio(sums, q, scale)
