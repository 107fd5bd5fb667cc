"""Concentration of |Pz|^2 for a rank-m projection and a random vector.

|Pz|^2 has mean a m and fluctuations of order sqrt(q m) in L^q; its lower
tail decays exponentially in m. Both are estimated here for Rademacher and
Gaussian z, and compared with the Khintchine constants.

    python demos/projection_lemma.py
"""
import math

import numpy as np
from scipy.stats import chi2

from wignerlab.concentration import (
    centered_moment_ratio,
    khintchine_ratio,
    lower_tail_estimate,
    random_projection,
    sample_norms,
)
from wignerlab.ensemble import EntryDistribution

rad = EntryDistribution("rademacher", 0.5)
gau = EntryDistribution("gaussian", 0.5)
n, m = 500, 100

p = random_projection(n, m, seed=1)
idem, herm, tr = p.check()
print(f"Haar projection n={n} m={m}: |P^2-P|={idem:.1e} |P-P*|={herm:.1e} |tr P-m|={tr:.1e}")

s = sample_norms(p, 20000, rad, seed=2)
v = s.values
print(f"|Pz|^2 over {v.size} Rademacher draws: mean {v.mean():.2f} +- {v.std(ddof=1) / math.sqrt(v.size):.2f} (a m = {s.a * m:g})")

print("\nq   ||Pz|^2 - a m||_q / sqrt(q m)")
for q in (2, 4, 6, 8):
    r = centered_moment_ratio(n, m, q, 50000, rad, seed=3, proj=p)
    print(f"{q}   {r.ratio:.3f} +- {r.stderr:.3f}")
g = centered_moment_ratio(n, m, 2, 50000, gau, seed=4, proj=p)
print(f"Gaussian q=2: {g.ratio:.4f} (1/sqrt 2 = {1 / math.sqrt(2):.4f})")

print("\nlower tail P(|Pz|^2 <= m/2), Rademacher, fresh projections")
for mm in (2, 4, 8, 16):
    est = lower_tail_estimate(64, mm, 0.5, 20000, rad, seed=5)
    print(f"m={mm:2d}  {est.phat:.4f}  [{est.ci_lo:.4f}, {est.ci_hi:.4f}]")
print(f"Gaussian oracle for m=8: {chi2.cdf(8, 16):.4f}")

c = np.ones(16) / 4
print("\nKhintchine ratios ||sum c_i z_i||_q / (sqrt q |c|), flat coefficients n=16")
for q in (2, 4, 8):
    exact = khintchine_ratio(c, q, exact=True)[0]
    mc = khintchine_ratio(c, q, 200000, rad, seed=6)[0]
    print(f"q={q}  enumeration {exact:.4f}  Monte Carlo {mc:.4f}")
