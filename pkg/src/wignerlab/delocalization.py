"""Eigenvector delocalization statistics and related tail/occupancy checks."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from wignerlab.ensemble import EntryDistribution, WignerConfig, sample_wigner
from wignerlab.rng import stream
from wignerlab.spectral import eigh, minor
from wignerlab.stieltjes import counting, rho_sc

EIGENVECTOR_HEADER = "mu,sup_norm,l4_norm,in_bulk"
DEGENERACY_GAP = 1e-8


@dataclass(frozen=True)
class EigenvectorStats:
    """Per-eigenvector norms, one entry per column of the decomposition."""

    mu: np.ndarray
    sup_norm: np.ndarray
    l4_norm: np.ndarray
    in_bulk: np.ndarray
    l2_norm: np.ndarray

    @property
    def n(self):
        return self.mu.size

    def normalized_sup(self):
        """sqrt(N / log N) * ||v||_inf (undefined for N = 1)."""
        n = self.n
        if n < 2:
            return np.full(n, math.nan)
        return math.sqrt(n / math.log(n)) * self.sup_norm

    def normalized_l4(self):
        return self.n**0.25 * self.l4_norm

    def rows(self):
        return np.column_stack([self.mu, self.sup_norm, self.l4_norm, self.in_bulk.astype(int)])

    def summary(self, bulk_only=True):
        vals = self.normalized_sup()
        if bulk_only:
            vals = vals[self.in_bulk]
        if vals.size == 0:
            return {"count": 0}
        q50, q90, q99 = np.quantile(vals, [0.5, 0.9, 0.99])
        return {"count": int(vals.size), "q50": float(q50), "q90": float(q90), "q99": float(q99), "max": float(vals.max())}


def eigenvector_stats(decomp, kappa):
    v = decomp.eigenvectors
    mag = np.abs(v)
    return EigenvectorStats(
        mu=decomp.eigenvalues.copy(),
        sup_norm=mag.max(axis=0),
        l4_norm=np.sum(mag**4, axis=0) ** 0.25,
        in_bulk=np.abs(decomp.eigenvalues) <= 2 - kappa,
        l2_norm=np.sqrt(np.sum(mag**2, axis=0)),
    )


@dataclass(frozen=True)
class V1Check:
    max_abs_diff: float
    checked: int
    skipped: int


def v1_identity_check(h, decomp, minor_data=None, k=0):
    """|v_k|^2 against 1 / (1 + (1/N) sum_a xi_a / (mu - lambda_a)^2).

    Eigenvectors whose eigenvalue lies within 1e-8 of a minor eigenvalue are
    skipped and counted rather than compared.
    """
    h = np.asarray(h)
    n = h.shape[0]
    if n < 2:
        raise ValueError("need N >= 2")
    if minor_data is None:
        mx = minor(h, k)
        md = eigh(mx.b)
        lam = md.eigenvalues
        xi = n * np.abs(md.eigenvectors.conj().T @ mx.a) ** 2
    else:
        k = minor_data.k
        lam, xi = minor_data.lam, minor_data.xi
    worst = 0.0
    checked = skipped = 0
    for alpha, mu in enumerate(decomp.eigenvalues):
        gaps = mu - lam
        if np.min(np.abs(gaps)) <= DEGENERACY_GAP:
            skipped += 1
            continue
        predicted = 1.0 / (1.0 + np.sum(xi / gaps**2) / n)
        worst = max(worst, abs(abs(decomp.eigenvectors[k, alpha]) ** 2 - predicted))
        checked += 1
    return V1Check(float(worst), checked, skipped)


TAIL_HEADER = "m,delta,trials,hits,phat,ci_lo,ci_hi"


@dataclass(frozen=True)
class TailEstimate:
    m: int
    delta: float
    trials: int
    hits: int
    phat: float
    ci_lo: float
    ci_hi: float

    def row(self):
        return [self.m, self.delta, self.trials, self.hits, self.phat, self.ci_lo, self.ci_hi]

    def contains(self, p):
        return self.ci_lo <= p <= self.ci_hi


def wilson(hits, trials, delta=0.0, m=0, confidence=0.95):
    ci = binomtest(int(hits), int(trials)).proportion_ci(confidence_level=confidence, method="wilson")
    return TailEstimate(int(m), float(delta), int(trials), int(hits), hits / trials, float(ci.low), float(ci.high))


def bulk_basis(n, m, seed, kappa=0.5):
    """m eigenvectors of a sampled GUE matrix with eigenvalues nearest 0."""
    dec = eigh(sample_wigner(WignerConfig(n=n, seed=seed)))
    idx = np.argsort(np.abs(dec.eigenvalues))[:m]
    return dec.eigenvectors[:, np.sort(idx)]


def complex_entries(dist, gen, shape):
    """x + i y with x, y i.i.d. from ``dist``; E|.|^2 = 2 * variance."""
    return dist.sample(gen, shape) + 1j * dist.sample(gen, shape)


def xi_sums(basis, trials, dist, seed, chunk=65536):
    """Draws of sum_{a in A} |b . u_a|^2 for b with i.i.d. complex entries."""
    n = basis.shape[0]
    gen = stream(seed, 3)
    out = np.empty(trials)
    for start in range(0, trials, chunk):
        size = min(chunk, trials - start)
        b = complex_entries(dist, gen, (size, n))
        out[start:start + size] = np.sum(np.abs(b @ basis.conj()) ** 2, axis=1)
    return out


def xi_lower_tail(m_rank, delta, trials, dist=None, seed=0, n=None, basis=None):
    """Empirical P(sum_{a in A} xi_a <= delta m) for |A| = m, with Wilson CI.

    ``xi_a = N |a . u_a|^2 = |b . u_a|^2`` with ``b = sqrt(N) a``. The
    orthonormal vectors default to the m bulk eigenvectors of a sampled GUE
    matrix of dimension ``n`` (default ``max(4m, 64)``).
    """
    if trials < 1000:
        raise ValueError("need at least 1000 trials")
    if not 0 <= delta:
        raise ValueError("delta must be nonnegative")
    dist = dist or EntryDistribution("gaussian", 0.5)
    if basis is None:
        n = n or max(4 * m_rank, 64)
        basis = bulk_basis(n, m_rank, seed)
    sums = xi_sums(basis, trials, dist, seed)
    hits = int(np.count_nonzero(sums <= delta * m_rank))
    return wilson(hits, trials, delta, m_rank)


@dataclass(frozen=True)
class IntervalOccupancy:
    eta: float
    start: int
    counts: np.ndarray

    @property
    def max_count(self):
        return int(self.counts.max()) if self.counts.size else 0

    def intervals(self):
        idx = self.start + np.arange(self.counts.size)
        return np.column_stack([idx * self.eta, (idx + 1) * self.eta])


def interval_max_count(eigs, eta, lo=None, hi=None):
    """Counts over I_n = [n eta, (n+1) eta) covering [lo, hi] (default: the spectrum)."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    mu = np.asarray(getattr(eigs, "eigenvalues", eigs), dtype=float)
    if lo is None or hi is None:
        if mu.size == 0:
            return IntervalOccupancy(eta, 0, np.zeros(0, dtype=int))
        lo = mu.min() if lo is None else lo
        hi = mu.max() if hi is None else hi
    first = int(math.floor(lo / eta))
    last = int(math.floor(hi / eta))
    idx = np.floor(mu / eta).astype(int)
    idx = idx[(idx >= first) & (idx <= last)]
    counts = np.bincount(idx - first, minlength=last - first + 1)
    return IntervalOccupancy(float(eta), first, counts)


COUNTING_HEADER = "E,count,normalized,rho_sc"


@dataclass(frozen=True)
class CountingLaw:
    sup_dev: float
    argmax: float
    energies: np.ndarray
    counts: np.ndarray
    eta_star: float
    n: int

    @property
    def normalized(self):
        return self.counts / (2 * self.n * self.eta_star)

    def rows(self):
        return np.column_stack([self.energies, self.counts, self.normalized, rho_sc(self.energies)])


def counting_law_check(eigs, kappa, eta_star):
    """sup over E in [-(2-kappa), 2-kappa] (step eta*/4) of |N(E)/(2N eta*) - rho_sc(E)|."""
    mu = np.asarray(getattr(eigs, "eigenvalues", eigs), dtype=float)
    half = 2 - kappa
    npts = int(math.ceil(2 * half / (eta_star / 4))) + 1
    es = np.linspace(-half, half, npts)
    counts = counting(mu, es, eta_star)
    dev = np.abs(counts / (2 * mu.size * eta_star) - rho_sc(es))
    i = int(np.argmax(dev))
    return CountingLaw(float(dev[i]), float(es[i]), es, counts, float(eta_star), mu.size)


@dataclass(frozen=True)
class Exchangeability:
    """Trial-level comparison of N|v_1|^2 and N|v_j|^2 over bulk eigenvectors.

    Averaging over every eigenvector would be uninformative (each row of a
    unitary has unit norm), so only bulk eigenvectors enter.
    """

    j: int
    mean_first: float
    mean_other: float
    diff: float
    stderr: float
    trials: int

    @property
    def z_score(self):
        if self.stderr == 0:
            return 0.0 if self.diff == 0 else math.inf
        return self.diff / self.stderr


def component_means(decomp, kappa, j):
    v = decomp.eigenvectors
    n = v.shape[0]
    bulk = np.abs(decomp.eigenvalues) <= 2 - kappa
    if not bulk.any():
        raise ValueError("no bulk eigenvectors")
    return n * np.mean(np.abs(v[0, bulk]) ** 2), n * np.mean(np.abs(v[j, bulk]) ** 2)


def exchangeability(pairs, j):
    """``pairs``: per-trial (first, other) means as from :func:`component_means`."""
    pairs = np.asarray(pairs, dtype=float).reshape(-1, 2)
    t = pairs.shape[0]
    d = pairs[:, 0] - pairs[:, 1]
    se = float(np.std(d, ddof=1) / math.sqrt(t)) if t > 1 else math.inf
    return Exchangeability(j, float(pairs[:, 0].mean()), float(pairs[:, 1].mean()), float(d.mean()), se, t)
