"""Compiled inner loops of the Hermitian eigensolver.

The matrix is carried as two float64 arrays (real and imaginary parts) so the
inner loops stay contiguous and vectorize. Only the lower triangle is read or
written.
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def tridiagonalize(ar, ai):
    """Reduce a Hermitian matrix to tridiagonal form by Householder reflectors.

    ``ar``/``ai`` hold the lower triangle and are overwritten: column k below
    the subdiagonal ends up storing reflector k (``u_k`` with support on
    rows k+1..n-1). Each reflector is ``P_k = I - u_k u_k^* / h_k``.

    Returns ``(d, er, ei, h)``: real diagonal, complex subdiagonal split into
    parts, and the reflector normalizers (0 for a skipped reflector).

    The rank-2 update of step k-1 is fused with the matrix-vector product of
    step k so the trailing block is streamed once per step.
    """
    n = ar.shape[0]
    d = np.zeros(n)
    er = np.zeros(max(n - 1, 0))
    ei = np.zeros(max(n - 1, 0))
    hs = np.zeros(max(n - 2, 0))
    if n == 0:
        return d, er, ei, hs
    # pending rank-2 update A <- A - u q^* - q u^*
    ur = np.zeros(n)
    ui = np.zeros(n)
    qr = np.zeros(n)
    qi = np.zeros(n)
    vr = np.zeros(n)
    vi = np.zeros(n)
    pr = np.zeros(n)
    pi = np.zeros(n)

    for k in range(n - 2):
        # a. pending update on column k
        uqr = qr[k]
        uqi = qi[k]
        ukr = ur[k]
        uki = ui[k]
        for i in range(k, n):
            ar[i, k] -= ur[i] * uqr + ui[i] * uqi + qr[i] * ukr + qi[i] * uki
            ai[i, k] -= ui[i] * uqr - ur[i] * uqi + qi[i] * ukr - qr[i] * uki
        d[k] = ar[k, k]

        # b. reflector annihilating a[k+2:, k]
        alr = ar[k + 1, k]
        ali = ai[k + 1, k]
        tail = 0.0
        for i in range(k + 2, n):
            tail += ar[i, k] * ar[i, k] + ai[i, k] * ai[i, k]
        for i in range(n):
            vr[i] = 0.0
            vi[i] = 0.0
        h = 0.0
        if tail == 0.0:
            er[k] = alr
            ei[k] = ali
        else:
            aabs = np.hypot(alr, ali)
            xnorm = np.sqrt(aabs * aabs + tail)
            if aabs == 0.0:
                phr = 1.0
                phi = 0.0
            else:
                phr = alr / aabs
                phi = ali / aabs
            vr[k + 1] = alr + phr * xnorm
            vi[k + 1] = ali + phi * xnorm
            for i in range(k + 2, n):
                vr[i] = ar[i, k]
                vi[i] = ai[i, k]
            h = xnorm * (xnorm + aabs)
            er[k] = -phr * xnorm
            ei[k] = -phi * xnorm
        hs[k] = h

        # c. fused: apply pending update to A[k+1:, k+1:] and form p = A v
        for i in range(n):
            pr[i] = 0.0
            pi[i] = 0.0
        for i in range(k + 1, n):
            uir = ur[i]
            uii = ui[i]
            qir = qr[i]
            qii = qi[i]
            vir = vr[i]
            vii = vi[i]
            sr = 0.0
            si = 0.0
            for j in range(k + 1, i):
                nr = ar[i, j] - (uir * qr[j] + uii * qi[j] + qir * ur[j] + qii * ui[j])
                ni = ai[i, j] - (uii * qr[j] - uir * qi[j] + qii * ur[j] - qir * ui[j])
                ar[i, j] = nr
                ai[i, j] = ni
                sr += nr * vr[j] - ni * vi[j]
                si += nr * vi[j] + ni * vr[j]
                pr[j] += nr * vir + ni * vii
                pi[j] += nr * vii - ni * vir
            # diagonal stays real
            nr = ar[i, i] - 2.0 * (uir * qir + uii * qii)
            ar[i, i] = nr
            ai[i, i] = 0.0
            pr[i] += sr + nr * vir
            pi[i] += si + nr * vii

        # d. next pending update
        if h == 0.0:
            for i in range(n):
                ur[i] = 0.0
                ui[i] = 0.0
                qr[i] = 0.0
                qi[i] = 0.0
        else:
            kk = 0.0
            for i in range(k + 1, n):
                pr[i] /= h
                pi[i] /= h
                kk += vr[i] * pr[i] + vi[i] * pi[i]
            kk /= 2.0 * h
            for i in range(n):
                ur[i] = vr[i]
                ui[i] = vi[i]
                qr[i] = pr[i] - kk * vr[i]
                qi[i] = pi[i] - kk * vi[i]
        # store reflector in the annihilated column
        for i in range(k + 1, n):
            ar[i, k] = vr[i]
            ai[i, k] = vi[i]

    # last 2x2 (or 1x1) block
    k = max(n - 2, 0)
    for i in range(k, n):
        for j in range(k, i + 1):
            ar[i, j] -= ur[i] * qr[j] + ui[i] * qi[j] + qr[i] * ur[j] + qi[i] * ui[j]
            ai[i, j] -= ui[i] * qr[j] - ur[i] * qi[j] + qi[i] * ur[j] - qr[i] * ui[j]
    for i in range(k, n):
        d[i] = ar[i, i]
    if n >= 2:
        er[n - 2] = ar[n - 1, n - 2]
        ei[n - 2] = ai[n - 1, n - 2]
    return d, er, ei, hs


@njit(cache=True, nogil=True)
def tridiagonal_ql(d, e, zt, want_vectors, max_iter):
    """Implicit-shift QL on a real symmetric tridiagonal matrix.

    ``d`` (diagonal) and ``e`` (subdiagonal, ``e[i]`` couples i and i+1,
    padded to length n) are overwritten; on exit ``d`` holds the eigenvalues
    in no particular order. When ``want_vectors`` the rows of ``zt`` are
    rotated, so starting from the identity row i ends as eigenvector i.

    Returns -1 on success or the index whose eigenvalue failed to converge
    within ``max_iter`` sweeps.
    """
    n = d.shape[0]
    if n <= 1:
        return -1
    e[n - 1] = 0.0
    eps = np.finfo(np.float64).eps
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return l
            it += 1
            # Wilkinson shift from the leading 2x2 block
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if want_vectors:
                    row0 = zt[i]
                    row1 = zt[i + 1]
                    for kcol in range(zt.shape[1]):
                        f1 = row1[kcol]
                        row1[kcol] = s * row0[kcol] + c * f1
                        row0[kcol] = c * row0[kcol] - s * f1
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1
