"""Self-consistent resolvent machinery: minors, X_k, delta_k and the ladder.

Notation follows the resolvent recursion for Wigner matrices: for minor
``B`` (row/column k removed) with eigenpairs ``(lambda_a, u_a)`` and removed
column ``a``, ``xi_a = N |a . u_a|^2`` and

    X_k = (1/N) sum_a (xi_a - 1) / (lambda_a - z)
    G_kk = 1 / (h_kk - z - (1/N) sum_a xi_a / (lambda_a - z))
    delta_k = h_kk + m - (1 - 1/N) m^(k) - X_k

so that ``m = (1/N) sum_k 1 / (-m - z + delta_k)`` holds exactly.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from wignerlab.rng import stream
from wignerlab.spectral import eigh, minor
from wignerlab.stieltjes import _as_z, fixed_point_residual, m_empirical, m_sc


@dataclass(frozen=True)
class MinorData:
    k: int
    lam: np.ndarray
    u: np.ndarray
    a: np.ndarray
    h_kk: float
    xi: np.ndarray
    m_minor: complex
    x_k: complex
    delta_k: complex = None
    n_full: int = 0


def xi_coefficients(a, u, n_full):
    a = np.asarray(a)
    u = np.asarray(u)
    if u.shape[0] != a.shape[0]:
        raise ValueError(f"vector of length {a.shape[0]} does not match basis of dimension {u.shape[0]}")
    return n_full * np.abs(u.conj().T @ a) ** 2


def x_statistic(xi, lam, z, n_full):
    z = complex(_as_z(z))
    return complex(np.sum((np.asarray(xi) - 1.0) / (np.asarray(lam) - z)) / n_full)


def y_statistic(xi, lam, z, n_full):
    z = complex(_as_z(z))
    return float(np.sum(np.asarray(xi) / np.abs(np.asarray(lam) - z)) / n_full)


def minor_data(h, k, z, m_full=None):
    """Everything the recursion needs about minor k at spectral parameter z.

    ``delta_k`` is filled in only when the full-matrix transform ``m_full``
    is supplied.
    """
    z = complex(_as_z(z))
    n = h.shape[0]
    mx = minor(h, k)
    dec = eigh(mx.b)
    xi = xi_coefficients(mx.a, dec.eigenvectors, n)
    m_minor = complex(np.mean(1.0 / (dec.eigenvalues - z)))
    x_k = x_statistic(xi, dec.eigenvalues, z, n)
    d = None
    if m_full is not None:
        d = delta_k_value(mx.h_kk, m_full, m_minor, x_k, n)
    return MinorData(k, dec.eigenvalues, dec.eigenvectors, mx.a, mx.h_kk, xi, m_minor, x_k, d, n)


def delta_k_value(h_kk, m_full, m_minor, x_k, n_full):
    return complex(h_kk + m_full - (1 - 1 / n_full) * m_minor - x_k)


def drift_bound(n_full, eta):
    # (1/N) * integral dx / |x - z|^2 = pi / (N eta)
    return math.pi / (n_full * eta)


def delta_k(md, m_full, z):
    """(delta_k, drift_ok) with drift |m - (1-1/N) m^(k)| checked against pi/(N eta)."""
    z = complex(_as_z(z))
    n = md.n_full
    drift = abs(m_full - (1 - 1 / n) * md.m_minor)
    return delta_k_value(md.h_kk, m_full, md.m_minor, md.x_k, n), drift <= drift_bound(n, z.imag)


def resolvent_diag_identity(h, k, z):
    """Compare G_z(k,k) from dense inversion with the minor-spectral formula."""
    z = complex(_as_z(z))
    h = np.asarray(h)
    n = h.shape[0]
    lhs = complex(np.linalg.inv(h - z * np.eye(n))[k, k])
    if n == 1:
        rhs = 1.0 / (h[0, 0].real - z)
    else:
        md = minor_data(h, k, z)
        rhs = 1.0 / (md.h_kk - z - np.sum(md.xi / (md.lam - z)) / n)
    return lhs, complex(rhs), abs(lhs - rhs)


@dataclass(frozen=True)
class Sweep:
    """Per-k quantities for one matrix at one spectral parameter."""

    z: complex
    m: complex
    x: np.ndarray
    m_minor: np.ndarray
    delta: np.ndarray
    drift: np.ndarray
    drift_bound: float

    SWEEP_HEADER = "k,re_Xk,im_Xk,abs_delta_k,drift,drift_bound"

    def rows(self):
        k = np.arange(self.x.size)
        return np.column_stack(
            [k, self.x.real, self.x.imag, np.abs(self.delta), self.drift, np.full(k.size, self.drift_bound)]
        )

    def recursion(self):
        """(1/N) sum_k 1/(-m - z + delta_k); equals m exactly."""
        return complex(np.mean(1.0 / (-self.m - self.z + self.delta)))

    def residual_bound(self):
        """Upper bound on |m + 1/(m+z)| from eps = max|delta_k| (None if vacuous)."""
        eps = float(np.max(np.abs(self.delta)))
        im = (self.m + self.z).imag
        if im <= eps:
            return None
        return eps / (im * (im - eps))


def sweep_from_minors(h, z):
    """All-k sweep by explicit minor eigendecompositions (O(N^4))."""
    z = complex(_as_z(z))
    n = h.shape[0]
    m = m_empirical(eigh(h, vectors=False).eigenvalues, z)
    data = [minor_data(h, k, z, m) for k in range(n)]
    x = np.array([d.x_k for d in data])
    mm = np.array([d.m_minor for d in data])
    delta = np.array([d.delta_k for d in data])
    return Sweep(z, m, x, mm, delta, np.abs(m - (1 - 1 / n) * mm), drift_bound(n, z.imag))


def sweep_from_resolvent(h, decomp, z):
    """All-k sweep from one eigendecomposition of H via Schur complements.

    a^*(B-z)^{-1}a = h_kk - z - 1/G_kk and Tr (B-z)^{-1} = Tr G - (G^2)_kk / G_kk,
    so every X_k costs O(N) once |V|^2 is formed.
    """
    z = complex(_as_z(z))
    h = np.asarray(h)
    n = h.shape[0]
    r = 1.0 / (decomp.eigenvalues - z)
    w = np.abs(decomp.eigenvectors) ** 2
    g = w @ r
    g2 = w @ (r * r)
    tr = r.sum()
    hkk = h.diagonal().real
    quad = hkk - z - 1.0 / g
    tr_minor = tr - g2 / g
    x = quad - tr_minor / n
    mm = tr_minor / (n - 1)
    m = tr / n
    delta = hkk + m - (1 - 1 / n) * mm - x
    return Sweep(z, complex(m), x, mm, delta, np.abs(m - (1 - 1 / n) * mm), drift_bound(n, z.imag))


@dataclass(frozen=True)
class PerturbedRoot:
    value: complex
    flagged: bool


def _roots(z, delta):
    s = np.sqrt(z * z - 4 + 2 * z * delta + delta * delta)
    return (-z + s) / 2 + delta / 2, (-z - s) / 2 + delta / 2


def perturbed_root(z, delta, steps=32):
    """Root of M + 1/(M+z) = delta continued from m_sc(z) along t*delta.

    At each step the root nearest the previous one is kept. The result is
    flagged when the two roots come within 1e-8 of each other on the path or
    the final root leaves the upper half plane.
    """
    z = complex(_as_z(z))
    delta = complex(delta)
    cur = m_sc(z)
    flagged = False
    for t in np.linspace(0, 1, steps + 1)[1:]:
        r1, r2 = _roots(z, t * delta)
        if abs(r1 - r2) < 1e-8:
            flagged = True
        cur = r1 if abs(r1 - cur) <= abs(r2 - cur) else r2
    # polish on the quadratic M^2 + (z - delta) M + 1 - delta z = 0
    for _ in range(2):
        f = cur * cur + (z - delta) * cur + 1 - delta * z
        df = 2 * cur + z - delta
        if df != 0:
            cur = cur - f / df
    if cur.imag <= 0:
        flagged = True
    return PerturbedRoot(complex(cur), flagged)


def perturbed_residual(m, z, delta):
    return abs(m + 1.0 / (m + z) - delta)


def stability_constant(kappa, delta_max=0.1, eta_min=1e-3, n_e=31, n_eta=7, n_delta=24, seed=0):
    """Empirical C_kappa = max |M(z, delta) - m_sc(z)| / |delta| over a bulk sweep."""
    rng = stream(seed, 13)
    es = np.linspace(-(2 - kappa), 2 - kappa, n_e)
    etas = np.geomspace(eta_min, 1.0, n_eta)
    worst = 0.0
    for e in es:
        for eta in etas:
            z = complex(e, eta)
            base = m_sc(z)
            radii = delta_max * np.sqrt(rng.uniform(0, 1, n_delta))
            phases = rng.uniform(0, 2 * np.pi, n_delta)
            for d in radii * np.exp(1j * phases):
                if d == 0:
                    continue
                root = perturbed_root(z, d)
                worst = max(worst, abs(root.value - base) / abs(d))
    return worst


@dataclass(frozen=True)
class LadderLevel:
    n: int
    z: complex
    m: complex
    im_ratio: float
    residual: float


@dataclass(frozen=True)
class LadderReport:
    e: float
    eta0: float
    levels: list = field(default_factory=list)

    LADDER_HEADER = "n,eta_n,re_m,im_m,residual,halving_ratio"

    def rows(self):
        return np.array([[lv.n, lv.z.imag, lv.m.real, lv.m.imag, lv.residual, lv.im_ratio] for lv in self.levels])

    def min_ratio(self):
        ratios = [lv.im_ratio for lv in self.levels if not math.isnan(lv.im_ratio)]
        return min(ratios) if ratios else math.nan

    def violations(self, tol=1e-12):
        return sum(1 for lv in self.levels if not math.isnan(lv.im_ratio) and lv.im_ratio < 0.5 - tol)


def ladder_depth(eta0):
    return int(math.floor(math.log2(1.0 / eta0)))


def bootstrap_ladder(eigs, e, eta0):
    """Dyadic ladder z_n = E + i 2^n eta0, n = floor(log2(1/eta0)), ..., 0.

    ``im_ratio`` at level n is Im m(z_{n-1}) / Im m(z_n) (NaN at n = 0).
    """
    if not 0 < eta0 < 1:
        raise ValueError("eta0 must lie in (0, 1)")
    top = ladder_depth(eta0)
    ns = np.arange(top, -1, -1)
    zs = e + 1j * eta0 * 2.0**ns
    ms = np.atleast_1d(m_empirical(eigs, zs))
    res = fixed_point_residual(ms, zs)
    levels = []
    for i, n in enumerate(ns):
        ratio = ms[i + 1].imag / ms[i].imag if i + 1 < len(ns) else math.nan
        levels.append(LadderLevel(int(n), complex(zs[i]), complex(ms[i]), float(ratio), float(res[i])))
    return LadderReport(float(e), float(eta0), levels)


def grad_im_x(xi, lam, z, n_full):
    """|grad Im X|^2 w.r.t. real and imaginary parts of b = sqrt(N) a (closed form)."""
    z = complex(_as_z(z))
    d = np.abs(np.asarray(lam) - z)
    return float(4 * z.imag**2 / n_full**2 * np.sum(np.asarray(xi) / d**4))


def _im_x_of_c(c, lam, z, n_full):
    return float(np.sum((np.abs(c) ** 2 - 1.0) / (lam - z)).imag / n_full)


def gradient_identity_check(a, minor_decomp, z, n_full, step=1e-6):
    """Closed-form |grad Im X|^2 against central finite differences.

    The gradient is taken with respect to the unnormalized coupling
    ``b = sqrt(N) a`` (so that ``xi_a = |b . u_a|^2``), the variable in which
    the closed form holds. A step along e_j moves ``c = U* b`` by
    ``step * conj(U[j, :])``, so each difference costs O(N).
    Returns ``(analytic, numeric, rel_err)``.
    """
    z = complex(_as_z(z))
    lam = minor_decomp.eigenvalues
    u = minor_decomp.eigenvectors
    b = math.sqrt(n_full) * np.asarray(a, dtype=np.complex128)
    c = u.conj().T @ b
    analytic = grad_im_x(np.abs(c) ** 2, lam, z, n_full)
    total = 0.0
    for j in range(b.size):
        row = u[j].conj()
        for direction in (1.0, 1j):
            dc = step * direction * row
            diff = (_im_x_of_c(c + dc, lam, z, n_full) - _im_x_of_c(c - dc, lam, z, n_full)) / (2 * step)
            total += diff * diff
    scale = max(analytic, np.finfo(float).tiny)
    rel = abs(analytic - total) / scale if analytic > 0 else abs(total)
    return analytic, total, rel


def holder_weights(lam, z, nu, n_full=None):
    """Hoelder exponents c_a = rho N |lambda_a - z| / nu with sum 1/c_a = 1.

    ``rho = (nu/N) sum 1/|lambda_a - z|``; N defaults to ``len(lam)``.
    """
    if not nu > 0:
        raise ValueError("nu must be positive")
    z = complex(_as_z(z))
    lam = np.asarray(lam, dtype=float)
    n_full = lam.size if n_full is None else n_full
    d = np.abs(lam - z)
    rho = nu / n_full * np.sum(1.0 / d)
    return rho * n_full * d / nu, float(rho)


def exponential_moment(xi_draws, tau):
    """Empirical E exp(tau xi) with its standard error."""
    v = np.exp(tau * np.asarray(xi_draws))
    return float(v.mean()), float(v.std() / math.sqrt(v.size))
