import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chi2, ks_2samp

from wignerlab import concentration as cc
from wignerlab.ensemble import EntryDistribution, gue
from wignerlab.rng import stream
from wignerlab.spectral import eigh

RAD = EntryDistribution("rademacher", 0.5)
GAUSS = EntryDistribution("gaussian", 0.5)


@given(st.integers(1, 30), st.data())
@settings(max_examples=30, deadline=None)
def test_projection_invariants(n, data):
    m = data.draw(st.integers(0, n))
    p = cc.random_projection(n, m, data.draw(st.integers(0, 10**6)))
    idem, herm, tr = p.check()
    assert idem <= 1e-10 and herm <= 1e-12 and tr <= 1e-9


def test_projection_extremes():
    assert np.allclose(cc.random_projection(6, 6, 1).p, np.eye(6), atol=1e-14)
    assert not np.any(cc.random_projection(6, 0, 1).p)
    with pytest.raises(ValueError):
        cc.random_projection(3, 4, 0)


def test_eigenvector_projection():
    dec = eigh(gue(30, 2))
    p = cc.eigenvector_projection(dec, range(10, 20))
    assert max(p.check()) <= 1e-10
    v = dec.eigenvectors[:, 12]
    assert np.allclose(p.p @ v, v, atol=1e-12)


def test_proj_norm_cases():
    z = stream(1, 0).standard_normal(8) + 0j
    assert cc.proj_norm_sq(cc.random_projection(8, 8, 1), z) == pytest.approx(np.vdot(z, z).real)
    p = cc.random_projection(8, 3, 2)
    kernel = z - p.p @ z
    assert cc.proj_norm_sq(p, kernel) == pytest.approx(0, abs=1e-24)
    with pytest.raises(ValueError):
        cc.proj_norm_sq(p, np.ones(7))


def test_expansion_matches():
    p = cc.random_projection(40, 7, 3)
    z = cc.complex_entries(RAD, stream(2, 0), (5, 40))
    total, diag, off = cc.proj_norm_expansion(p, z, a=1.0)
    assert np.allclose(total, cc.proj_norm_sq(p, z), atol=1e-12)
    # unit-modulus entries: the centered diagonal part vanishes identically
    assert np.allclose(diag, 0, atol=1e-12)


def test_mean_is_am():
    # centered terms vanish in mean: E|Pz|^2 = a m with a = 1
    p = cc.random_projection(500, 50, 4)
    s = cc.sample_norms(p, 10000, RAD, 5)
    assert s.a == 1.0
    assert abs(s.mean() - 50) <= 4 * s.stderr()


def test_gaussian_norm_is_half_chi_square_and_unitarily_invariant():
    n, m = 60, 8
    p = cc.random_projection(n, m, 6)
    s1 = cc.sample_norms(p, 10000, GAUSS, 7).values
    q, _ = np.linalg.qr(stream(8, 0).standard_normal((n, n)) + 1j * stream(8, 1).standard_normal((n, n)))
    rotated = cc.projection_from_basis(q @ p.basis)
    s2 = cc.sample_norms(rotated, 10000, GAUSS, 9).values
    assert ks_2samp(s1, s2).statistic <= 0.02
    assert ks_2samp(2 * s1, chi2(2 * m).rvs(size=10000, random_state=1)).statistic <= 0.03


def test_lower_tail():
    assert cc.lower_tail_estimate(50, 5, 10.0, 1000, RAD, seed=1).phat == 1.0
    est = cc.lower_tail_estimate(500, 50, 0.1, 2000, GAUSS, seed=2)
    assert est.hits == 0 and est.contains(chi2.cdf(10, 100))
    probs = [cc.lower_tail_estimate(200, m, 0.5, 5000, RAD, seed=3).phat for m in (2, 4, 8, 16)]
    assert all(a > b for a, b in zip(probs, probs[1:]))
    with pytest.raises(ValueError):
        cc.lower_tail_estimate(10, 2, 0.5, 1000, EntryDistribution("smoothed_uniform"))


def test_centered_moment_gaussian_q2():
    r = cc.centered_moment_ratio(200, 40, 2, 100000, GAUSS, seed=1)
    assert r.ratio == pytest.approx(1 / math.sqrt(2), rel=0.02)


def test_centered_moment_scalar_rademacher():
    with pytest.warns(cc.MomentRangeWarning):
        r = cc.centered_moment_ratio(1, 1, 2, 1000, RAD, seed=1, proj=cc.random_projection(1, 1, 0))
    assert r.ratio == 0 and r.stderr == 0


def test_centered_moment_domain():
    with pytest.raises(ValueError):
        cc.centered_moment_ratio(10, 5, 3, 1000)
    with pytest.warns(cc.MomentRangeWarning):
        cc.centered_moment_ratio(10, 4, 4, 1000, RAD)


def test_khintchine_q2_exact_and_values():
    c = np.ones(16) / 4
    assert cc.khintchine_ratio(c, 2, exact=True)[0] == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    for q in (4, 8):
        assert cc.khintchine_ratio(c, q, exact=True)[0] <= 1.0
    # E (sum s_j)^4 over n signs is 3 n^2 - 2 n; x_j = s_j sqrt(1/2), a_j = 1/4
    m4 = (3 * 16**2 - 2 * 16) * 0.25 / 16**2
    assert cc.khintchine_ratio(c, 4, exact=True)[0] == pytest.approx(m4**0.25 / (2 * math.sqrt(0.5)), rel=1e-12)


def test_khintchine_gaussian_q4():
    c = stream(3, 0).standard_normal(10)
    r, se = cc.khintchine_ratio(c, 4, 400000, GAUSS, seed=4)
    assert r == pytest.approx(3**0.25 / 2, rel=0.01)


def test_khintchine_monte_carlo_vs_enumeration():
    c = np.ones(16) / 4
    for q in (2, 4, 8):
        exact = cc.khintchine_ratio(c, q, exact=True)[0]
        mc, se = cc.khintchine_ratio(c, q, 200000, RAD, seed=q)
        assert mc == pytest.approx(exact, rel=0.01)


def test_khintchine_errors():
    with pytest.raises(ValueError):
        cc.khintchine_ratio(np.zeros(3), 2, 100)
    with pytest.raises(ValueError):
        cc.khintchine_ratio(np.ones(3), 3, 100)
    with pytest.raises(ValueError):
        cc.khintchine_ratio(np.ones(3), 2, exact=True, dist=GAUSS)
