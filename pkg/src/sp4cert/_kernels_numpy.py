"""Vectorized numpy kernels; same contracts as ``_kernels_numba``."""
import math

import numpy as np

TWO_PI = 2.0 * math.pi
_CHUNK = 1 << 16


def first_hit(r1, r2, big_m, bound, start=1):
    lo = start
    while lo <= big_m:
        hi = min(big_m, lo + _CHUNK - 1)
        m = np.arange(lo, hi + 1, dtype=np.float64)
        p1 = m * r1
        p2 = m * r2
        ok = np.abs(p1 - TWO_PI * np.floor(p1 / TWO_PI + 0.5)) < bound
        ok &= np.abs(p2 - TWO_PI * np.floor(p2 / TWO_PI + 0.5)) < bound
        nz = np.flatnonzero(ok)
        if nz.size:
            return int(lo + nz[0])
        lo = hi + 1
    return 0


def qr4_batch(a):
    """Householder QR over a stack of 4x4 matrices, shape (n, 4, 4)."""
    r = np.array(a, dtype=np.float64, copy=True)
    n = r.shape[0]
    q = np.zeros((n, 4, 4))
    q[:, range(4), range(4)] = 1.0
    for k in range(3):
        v = r[:, k:, k].copy()
        sub = np.einsum("ni,ni->n", v[:, 1:], v[:, 1:])
        active = sub != 0.0
        if not active.any():
            continue
        x0 = v[:, 0]
        alpha = np.sqrt(x0 * x0 + sub)
        v[:, 0] = x0 + np.copysign(alpha, np.where(x0 >= 0.0, 1.0, -1.0))
        vn2 = np.einsum("ni,ni->n", v, v)
        beta = np.divide(2.0, vn2, out=np.zeros(n), where=active)
        vb = v * beta[:, None]
        r[:, k:, :] -= v[:, :, None] * np.matmul(vb[:, None, :], r[:, k:, :])
        q[:, :, k:] -= np.matmul(q[:, :, k:], vb[:, :, None]) * v[:, None, :]
        r[active, k + 1:, k] = 0.0
    d = np.diagonal(r, axis1=1, axis2=2)
    sgn = np.where(d < 0.0, -1.0, 1.0)
    r *= sgn[:, :, None]
    q *= sgn[:, None, :]
    return q, r


def qr4(a):
    q, r = qr4_batch(np.asarray(a, dtype=np.float64)[None])
    return q[0], r[0]


def lyap_chunk(mats, idx, frames, sums, step0, burn_in):
    n_rep, n_t = idx.shape
    for t in range(n_t):
        b = np.matmul(mats[idx[:, t]], frames)
        q, r = qr4_batch(b)
        d = np.diagonal(r, axis1=1, axis2=2)
        bad = np.flatnonzero((d == 0.0).any(axis=1))
        if bad.size:
            return int(bad[0]), step0 + t
        frames[...] = q
        if step0 + t >= burn_in:
            sums += np.log(d)
    return -1, -1
