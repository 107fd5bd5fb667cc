import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import density_moment
from wignerlab.ensemble import (
    EntryDistribution,
    InvalidDimensionError,
    WignerConfig,
    gue,
    moment_report,
    sample_wigner,
)
from wignerlab.rng import stream


def test_n1_is_real_scalar():
    h = sample_wigner(WignerConfig(n=1, seed=3))
    assert h.shape == (1, 1) and h[0, 0].imag == 0


@given(st.integers(1, 40), st.integers(0, 2**64 - 1))
@settings(max_examples=30, deadline=None)
def test_hermitian_bit_exact_and_reproducible(n, seed):
    h = sample_wigner(WignerConfig(n=n, seed=seed))
    assert np.array_equal(h, h.conj().T)
    assert np.all(h.diagonal().imag == 0)
    assert np.array_equal(h, sample_wigner(WignerConfig(n=n, seed=seed)))


def test_entry_independent_of_dimension():
    # entry (i, j) comes from row i's stream, so growing N only appends
    small = gue(10, 4)
    big = gue(12, 4) * math.sqrt(12) / math.sqrt(10)
    assert np.allclose(small[0, 1:10], big[0, 1:10], rtol=0, atol=1e-15)


def test_zero_dimension_rejected():
    with pytest.raises(InvalidDimensionError):
        WignerConfig(n=0)


def test_off_diagonal_variance_enforced():
    with pytest.raises(ValueError):
        WignerConfig(n=4, off_diag=EntryDistribution("gaussian", 1.0))


def test_rademacher_needs_opt_in():
    rad = EntryDistribution("rademacher", 0.5)
    with pytest.raises(ValueError):
        WignerConfig(n=4, off_diag=rad)
    h = sample_wigner(WignerConfig(n=4, off_diag=rad, allow_bounded=True))
    assert np.allclose(np.abs(h[0, 1]) ** 2, 1 / 4)


def test_unknown_kind():
    with pytest.raises(ValueError):
        EntryDistribution("cauchy")


def test_second_moment_of_off_diagonal_entry():
    # component variance 1/2 gives E|h_ij|^2 = 1/N
    n, reps = 100, 10000
    vals = np.empty(reps)
    for r in range(reps):
        xy = EntryDistribution("gaussian", 0.5).sample(stream(r, 0, 0), (1, 2))
        vals[r] = (xy[0, 0] ** 2 + xy[0, 1] ** 2) / n
    se = vals.std() / math.sqrt(reps)
    assert abs(vals.mean() - 1 / n) <= 4 * se


def test_second_moment_sample_wigner_pooled():
    hs = [gue(30, s) for s in range(40)]
    vals = np.concatenate([np.abs(h[np.triu_indices(30, 1)]) ** 2 for h in hs])
    se = vals.std() / math.sqrt(vals.size)
    assert abs(vals.mean() - 1 / 30) <= 4 * se


@pytest.mark.parametrize("kind,var", [("rademacher", 1.0), ("gaussian", 0.5), ("smoothed_uniform", 0.5)])
def test_moment_report_mean_and_variance(kind, var):
    r = moment_report(EntryDistribution(kind, var), 20000, seed=1)
    assert abs(r.mean) <= 4 * r.mean_se
    assert abs(r.variance - var) <= 4 * r.variance_se


def test_moment_report_needs_samples():
    with pytest.raises(ValueError):
        moment_report(EntryDistribution(), 999)


def test_smoothed_uniform_density_normalized_and_variance():
    d = EntryDistribution("smoothed_uniform", 0.5)
    assert density_moment(d.density, 0, -5, 5) == pytest.approx(1, abs=1e-10)
    assert density_moment(d.density, 2, -5, 5) == pytest.approx(0.5, rel=1e-9)
    assert np.all(d.density(np.linspace(-3, 3, 101)) > 0)


def test_smoothed_uniform_fourth_moment_against_quadrature():
    d = EntryDistribution("smoothed_uniform", 0.5)
    oracle = density_moment(d.density, 4, -5, 5)
    r = moment_report(d, 400000, seed=9)
    assert r.fourth_moment == pytest.approx(oracle, rel=0.01)


def test_rademacher_has_no_density():
    d = EntryDistribution("rademacher")
    assert d.density(0.0) is None and d.bounded and not d.has_density
