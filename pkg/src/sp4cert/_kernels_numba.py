"""Scalar-loop kernels compiled with numba.

Mirrors ``_kernels_numpy`` operation for operation; the two backends are
checked against each other in the test suite.
"""
import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi


@njit(cache=True, nogil=True)
def first_hit(r1, r2, big_m, bound, start):
    """Smallest m in [start, big_m] with both m*r_i within bound of 2*pi*Z, else 0."""
    for m in range(start, big_m + 1):
        p1 = m * r1
        x1 = math.floor(p1 / TWO_PI + 0.5)
        if abs(p1 - TWO_PI * x1) >= bound:
            continue
        p2 = m * r2
        x2 = math.floor(p2 / TWO_PI + 0.5)
        if abs(p2 - TWO_PI * x2) < bound:
            return m
    return 0


@njit(cache=True, nogil=True)
def _qr4_inplace(b, q, diag):
    """Householder QR of the 4x4 ``b``; Q into ``q``, diag(R) >= 0 into ``diag``.

    ``b`` is overwritten with R.
    """
    for i in range(4):
        for j in range(4):
            q[i, j] = 1.0 if i == j else 0.0
    v = np.empty(4)
    for k in range(3):
        sub = 0.0
        for i in range(k + 1, 4):
            sub += b[i, k] * b[i, k]
        if sub == 0.0:
            continue
        x0 = b[k, k]
        alpha = math.sqrt(x0 * x0 + sub)
        s = 1.0 if x0 >= 0.0 else -1.0
        v[k] = x0 + s * alpha
        vn2 = v[k] * v[k]
        for i in range(k + 1, 4):
            v[i] = b[i, k]
            vn2 += v[i] * v[i]
        beta = 2.0 / vn2
        for j in range(k, 4):
            t = 0.0
            for i in range(k, 4):
                t += v[i] * b[i, j]
            t *= beta
            for i in range(k, 4):
                b[i, j] -= t * v[i]
        for i in range(4):
            t = 0.0
            for j in range(k, 4):
                t += q[i, j] * v[j]
            t *= beta
            for j in range(k, 4):
                q[i, j] -= t * v[j]
        for i in range(k + 1, 4):
            b[i, k] = 0.0
    for k in range(4):
        if b[k, k] < 0.0:
            for j in range(4):
                b[k, j] = -b[k, j]
            for i in range(4):
                q[i, k] = -q[i, k]
        diag[k] = b[k, k]


@njit(cache=True, nogil=True)
def qr4(a):
    b = a.copy()
    q = np.empty((4, 4))
    diag = np.empty(4)
    _qr4_inplace(b, q, diag)
    return q, b


@njit(cache=True, nogil=True)
def lyap_chunk(mats, idx, frames, sums, step0, burn_in):
    """Advance every replica frame through one chunk of sampled steps.

    Returns (replica, step) of the first collapsed frame, or (-1, -1).
    """
    n_rep, n_t = idx.shape
    b = np.empty((4, 4))
    q = np.empty((4, 4))
    diag = np.empty(4)
    for r in range(n_rep):
        fr = frames[r]
        for t in range(n_t):
            a = mats[idx[r, t]]
            for i in range(4):
                for j in range(4):
                    acc = 0.0
                    for k in range(4):
                        acc += a[i, k] * fr[k, j]
                    b[i, j] = acc
            _qr4_inplace(b, q, diag)
            for i in range(4):
                if diag[i] == 0.0:
                    return r, step0 + t
            for i in range(4):
                for j in range(4):
                    fr[i, j] = q[i, j]
            if step0 + t >= burn_in:
                for i in range(4):
                    sums[r, i] += math.log(diag[i])
    return -1, -1
