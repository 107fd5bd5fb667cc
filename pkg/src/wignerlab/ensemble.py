"""Hermitian Wigner ensembles with reproducible per-row random streams.

Off-diagonal entries are ``h_ij = (x_ij + i y_ij) / sqrt(N)`` for ``i < j`` with
``x, y`` i.i.d. of variance 1/2, diagonal entries ``h_ii = x_ii / sqrt(N)``.
Row ``i`` of the upper triangle is drawn from its own stream keyed by
``(seed, 0, i)`` and the diagonal from ``(seed, 1)``; entry ``(i, j)`` is the
``(j - i - 1)``-th pair of row ``i``'s stream, so samples do not depend on the
order rows are generated in.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from wignerlab.rng import stream

KINDS = ("gaussian", "smoothed_uniform", "rademacher")

# smoothing Gaussian sd as a fraction of the uniform support width
SMOOTHING_WIDTH = 0.05


class InvalidDimensionError(ValueError):
    pass


@dataclass(frozen=True)
class EntryDistribution:
    """Centered real law used for the real/imaginary parts of entries.

    ``smoothed_uniform`` is the uniform law on ``[-w, w]`` convolved with a
    Gaussian of sd ``0.05 * 2w``, with ``w`` fixed by the variance. It has a
    smooth, strictly positive density. ``rademacher`` takes the values
    ``+-sqrt(variance)``; it has no density and is only meant for the
    bounded-entry concentration experiments.
    """

    kind: str = "gaussian"
    variance: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution {self.kind!r}; expected one of {KINDS}")
        if not self.variance > 0:
            raise ValueError("variance must be positive")

    @property
    def has_density(self):
        return self.kind != "rademacher"

    @property
    def bounded(self):
        return self.kind == "rademacher"

    @property
    def _uniform_halfwidth(self):
        # w^2/3 + (0.1 w)^2 = variance
        return math.sqrt(self.variance / (1.0 / 3.0 + (2 * SMOOTHING_WIDTH) ** 2))

    @property
    def _smoothing_sd(self):
        return 2 * SMOOTHING_WIDTH * self._uniform_halfwidth

    def sample(self, gen, size):
        if self.kind == "gaussian":
            return math.sqrt(self.variance) * gen.standard_normal(size)
        if self.kind == "smoothed_uniform":
            w = self._uniform_halfwidth
            return gen.uniform(-w, w, size) + self._smoothing_sd * gen.standard_normal(size)
        signs = 2.0 * gen.integers(0, 2, size=size) - 1.0
        return math.sqrt(self.variance) * signs

    def density(self, x):
        """Probability density; ``None`` for the atomic rademacher law."""
        x = np.asarray(x, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-x * x / (2 * self.variance)) / math.sqrt(2 * math.pi * self.variance)
        if self.kind == "smoothed_uniform":
            w, s = self._uniform_halfwidth, self._smoothing_sd
            # symmetric; evaluate at -|x| so the tail difference does not cancel
            x = -np.abs(x)
            return (ndtr((x + w) / s) - ndtr((x - w) / s)) / (2 * w)
        return None

    @classmethod
    def named(cls, name, variance=0.5):
        return cls(kind=name, variance=variance)


@dataclass(frozen=True)
class WignerConfig:
    n: int
    off_diag: EntryDistribution = EntryDistribution("gaussian", 0.5)
    diag: EntryDistribution = EntryDistribution("gaussian", 1.0)
    seed: int = 0
    allow_bounded: bool = False

    def __post_init__(self):
        if int(self.n) < 1:
            raise InvalidDimensionError(f"matrix dimension must be >= 1, got {self.n}")
        if not math.isclose(self.off_diag.variance, 0.5, rel_tol=0, abs_tol=1e-15):
            raise ValueError("off-diagonal components must have variance 1/2")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not self.allow_bounded and (self.off_diag.bounded or self.diag.bounded):
            raise ValueError(
                "rademacher entries lack a density; pass allow_bounded=True "
                "for bounded-entry experiments"
            )


def sample_wigner(config):
    """Draw one Hermitian Wigner matrix as a dense complex array."""
    n = int(config.n)
    if n < 1:
        raise InvalidDimensionError(f"matrix dimension must be >= 1, got {n}")
    scale = 1.0 / math.sqrt(n)
    h = np.zeros((n, n), dtype=np.complex128)
    for i in range(n - 1):
        xy = config.off_diag.sample(stream(config.seed, 0, i), (n - i - 1, 2))
        row = scale * (xy[:, 0] + 1j * xy[:, 1])
        h[i, i + 1:] = row
        h[i + 1:, i] = row.conj()
    diag = config.diag.sample(stream(config.seed, 1), n)
    h[np.arange(n), np.arange(n)] = scale * diag
    return h


def gue(n, seed=0):
    return sample_wigner(WignerConfig(n=n, seed=seed))


@dataclass(frozen=True)
class MomentReport:
    mean: float
    variance: float
    fourth_moment: float
    mean_se: float
    variance_se: float
    fourth_moment_se: float
    samples: int


def moment_report(dist, samples, seed=0):
    """Empirical mean, variance and raw fourth moment with standard errors."""
    samples = int(samples)
    if samples < 1000:
        raise ValueError("moment_report needs at least 1000 samples")
    x = dist.sample(stream(seed, 2), samples)
    mean = float(x.mean())
    c = x - mean
    var = float(np.mean(c * c))
    m4c = float(np.mean(c**4))
    x4 = x**4
    return MomentReport(
        mean=mean,
        variance=var,
        fourth_moment=float(x4.mean()),
        mean_se=math.sqrt(var / samples),
        variance_se=math.sqrt(max(m4c - var * var, 0.0) / samples),
        fourth_moment_se=float(x4.std() / math.sqrt(samples)),
        samples=samples,
    )
