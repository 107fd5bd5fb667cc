"""Stieltjes transforms, densities of states and the spectral-parameter grid."""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.optimize import brentq


class CoarseGridWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SpectralParameter:
    e: float
    eta: float

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"spectral parameter needs eta > 0, got {self.eta}")

    @property
    def z(self):
        return complex(self.e, self.eta)

    def __complex__(self):
        return self.z


def _as_z(z):
    z = np.asarray(complex(z) if isinstance(z, SpectralParameter) else z, dtype=np.complex128)
    if np.any(z.imag <= 0):
        raise ValueError("spectral parameter must have positive imaginary part")
    return z


def _eigs(eigs):
    eigs = np.asarray(getattr(eigs, "eigenvalues", eigs), dtype=float).ravel()
    if eigs.size == 0:
        raise ValueError("empty spectrum")
    return eigs


@njit(cache=True, nogil=True)
def _resolvent_sums(eigs, es, etas):
    # sum_a 1/(mu_a - z) = sum_a (mu_a - E + i eta) / ((mu_a - E)^2 + eta^2)
    npt = es.shape[0]
    re = np.empty(npt)
    im = np.empty(npt)
    for p in range(npt):
        e = es[p]
        eta = etas[p]
        eta2 = eta * eta
        sr = 0.0
        si = 0.0
        for mu in eigs:
            x = mu - e
            inv = 1.0 / (x * x + eta2)
            sr += x * inv
            si += inv
        re[p] = sr
        im[p] = si * eta
    return re, im


def m_empirical(eigs, z):
    """(1/N) sum_a 1/(mu_a - z); ``z`` may be an array of points."""
    eigs = _eigs(eigs)
    z = _as_z(z)
    flat = z.ravel()
    re, im = _resolvent_sums(eigs, np.ascontiguousarray(flat.real), np.ascontiguousarray(flat.imag))
    out = (re + 1j * im) / eigs.size
    return out.reshape(z.shape) if z.shape else complex(out[0])


def rho_eta(eigs, e, eta):
    """Cauchy-regularized density of states at energy ``e`` and width ``eta``."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    eigs = _eigs(eigs)
    e = np.asarray(e, dtype=float)
    x = eigs - e[..., None]
    val = np.sum(eta / (x * x + eta * eta), axis=-1) / (eigs.size * math.pi)
    return float(val) if val.ndim == 0 else val


def m_sc(z):
    """Stieltjes transform of the semicircle law.

    Both roots of ``M^2 + zM + 1 = 0`` are formed (the small one as the
    reciprocal of the large one, since their product is 1) and the root in
    the upper half plane is returned. On the real axis the boundary value is
    used: ``Im M > 0`` inside ``[-2, 2]``, ``|M| < 1`` outside.
    """
    z = np.asarray(complex(z) if isinstance(z, SpectralParameter) else z, dtype=np.complex128)
    s = np.sqrt(z * z - 4)
    big_plus = -z + s
    big_minus = -z - s
    big = np.where(np.abs(big_plus) >= np.abs(big_minus), big_plus, big_minus) / 2
    small = 1.0 / big
    pick_small = (small.imag > 0) | ((small.imag == 0) & (big.imag <= 0))
    root = np.where(pick_small, small, big)
    return complex(root) if root.ndim == 0 else root


def fixed_point_residual(m, z):
    """|M + 1/(M + z)|: zero exactly at the semicircle transform."""
    m = np.asarray(m)
    z = np.asarray(complex(z) if isinstance(z, SpectralParameter) else z)
    return np.abs(m + 1.0 / (m + z))


def rho_sc(e):
    e = np.asarray(e, dtype=float)
    out = np.where(np.abs(e) <= 2, np.sqrt(np.clip(4 - e * e, 0, None)) / (2 * math.pi), 0.0)
    return float(out) if out.ndim == 0 else out


def semicircle_cdf(x):
    x = np.clip(np.asarray(x, dtype=float), -2, 2)
    out = 0.5 + (x * np.sqrt(4 - x * x)) / (4 * math.pi) + np.arcsin(x / 2) / math.pi
    return float(out) if out.ndim == 0 else out


def semicircle_quantiles(n):
    """Deterministic spectrum mu_a = F_sc^{-1}((a - 1/2)/n), a = 1..n."""
    probs = (np.arange(1, n + 1) - 0.5) / n
    return np.array([brentq(lambda x, p=p: semicircle_cdf(x) - p, -2, 2, xtol=1e-15) for p in probs])


def counting(eigs, e, eta_star):
    """Number of eigenvalues in [E - eta*, E + eta*] (vectorized in E)."""
    if not eta_star > 0:
        raise ValueError("eta_star must be positive")
    mu = np.sort(np.asarray(getattr(eigs, "eigenvalues", eigs), dtype=float))
    e = np.asarray(e, dtype=float)
    out = np.searchsorted(mu, e + eta_star, side="right") - np.searchsorted(mu, e - eta_star, side="left")
    return int(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpectralGrid:
    """Points of S_{kappa, eta_min}: uniform in E, dyadic in eta.

    Level n has ``eta_n = eta_min * 2**n`` (up to 1) and E-spacing
    ``resolution * 4**n``, which keeps the ratio spacing / eta_n**2 fixed
    across levels. ``spacing`` is the finest (level 0) E-spacing.
    """

    kappa: float
    eta_min: float
    resolution: float
    etas: tuple = field(default_factory=tuple)
    energies: tuple = field(default_factory=tuple)

    @property
    def spacing(self):
        if len(self.energies[0]) < 2:
            return 0.0
        return float(self.energies[0][1] - self.energies[0][0])

    @property
    def e(self):
        return np.concatenate(self.energies)

    @property
    def eta(self):
        return np.concatenate([np.full(len(es), eta) for eta, es in zip(self.etas, self.energies)])

    @property
    def z(self):
        return self.e + 1j * self.eta

    def __len__(self):
        return sum(len(es) for es in self.energies)


def spectral_grid(kappa, eta_min, resolution, eta_max=1.0):
    if not 0 < kappa < 2:
        raise ValueError("kappa must lie in (0, 2)")
    if not 0 < eta_min <= eta_max:
        raise ValueError("need 0 < eta_min <= eta_max")
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    half = 2.0 - kappa
    etas, energies = [], []
    level = 0
    while True:
        eta = eta_min * 2.0**level
        if eta > eta_max * (1 + 1e-12):
            break
        h = resolution * 4.0**level
        npts = max(int(math.ceil(2 * half / h)) + 1, 2)
        etas.append(eta)
        energies.append(np.linspace(-half, half, npts))
        level += 1
    return SpectralGrid(kappa, eta_min, resolution, tuple(etas), tuple(energies))


@dataclass(frozen=True)
class GridDeviation:
    sup: float
    argmax: SpectralParameter
    coarse: bool
    grid: SpectralGrid
    m: np.ndarray = None
    msc: np.ndarray = None

    def rows(self):
        """Rows of the plot-data table ``E,eta,re_m,im_m,re_msc,im_msc,abs_dev``."""
        e, eta = self.grid.e, self.grid.eta
        dev = np.abs(self.m - self.msc)
        return np.column_stack([e, eta, self.m.real, self.m.imag, self.msc.real, self.msc.imag, dev])


GRID_HEADER = "E,eta,re_m,im_m,re_msc,im_msc,abs_dev"


def grid_sup_deviation(eigs, kappa, eta_min, resolution=None, eta_max=1.0, keep=False):
    """sup over the grid of |m_N(z) - m_sc(z)| and where it is attained.

    ``resolution`` defaults to ``eta_min**2 / 4``; anything coarser is
    allowed but flagged (``coarse=True`` plus a :class:`CoarseGridWarning`),
    since the deviation may then be underestimated between grid points.
    """
    limit = eta_min**2 / 4
    if resolution is None:
        resolution = limit
    coarse = resolution > limit * (1 + 1e-12)
    if coarse:
        warnings.warn(
            f"grid resolution {resolution:g} exceeds eta_min^2/4 = {limit:g}; "
            "deviation may be underestimated between grid points",
            CoarseGridWarning,
            stacklevel=2,
        )
    grid = spectral_grid(kappa, eta_min, resolution, eta_max)
    z = grid.z
    m = m_empirical(eigs, z)
    msc = m_sc(z)
    dev = np.abs(m - msc)
    i = int(np.argmax(dev))
    return GridDeviation(
        sup=float(dev[i]),
        argmax=SpectralParameter(float(z[i].real), float(z[i].imag)),
        coarse=coarse,
        grid=grid,
        m=m if keep else None,
        msc=msc if keep else None,
    )
