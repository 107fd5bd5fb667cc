"""Eigenvector delocalization and the first-component identity.

Every bulk eigenvector of a GUE matrix should have sup norm of order
sqrt(log N / N) and l4 norm of order N^{-1/4}. The squared first component
is also a closed-form function of the minor spectrum, which is checked here
eigenvector by eigenvector.

    python demos/delocalization.py [N] [seed]
"""
import math
import sys

import numpy as np

from wignerlab.delocalization import eigenvector_stats, interval_max_count, v1_identity_check
from wignerlab.ensemble import gue
from wignerlab.spectral import eigh, interlacing_check, minor

n = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 3
kappa = 0.5

h = gue(n, seed)
dec = eigh(h)
st = eigenvector_stats(dec, kappa)
bulk = st.in_bulk
nsup = st.normalized_sup()[bulk]
nl4 = st.normalized_l4()[bulk]
print(f"N={n}: {bulk.sum()} bulk eigenvectors (|mu| <= {2 - kappa})")
print(f"sqrt(N/log N) |v|_inf   min {nsup.min():.3f}  median {np.median(nsup):.3f}  max {nsup.max():.3f}")
print(f"N^(1/4) |v|_4           min {nl4.min():.3f}  median {np.median(nl4):.3f}  max {nl4.max():.3f}")
print(f"a Gaussian vector would give N^(1/4)|v|_4 ~ 2^(1/4) = {2 ** 0.25:.3f}")

# the same statistic for a localized vector, for scale
print(f"a standard basis vector would score {math.sqrt(n / math.log(n)):.1f} on the sup statistic")

chk = v1_identity_check(h, dec)
print(f"\n|v_1|^2 identity: max diff {chk.max_abs_diff:.1e} over {chk.checked} eigenvectors ({chk.skipped} skipped)")

mx = minor(h, 0)
il = interlacing_check(dec.eigenvalues, eigh(mx.b, vectors=False).eigenvalues)
print(f"largest interlacing violation against the first minor: {il:.1e}")

eta = 20 / n
occ = interval_max_count(dec, eta)
print(f"\nlargest count in an interval of width {eta:g}: {occ.max_count} "
      f"(N eta rho_sc(0) = {n * eta / math.pi:.1f})")
