"""Fixed-size real linear algebra on 2x2 and 4x4 float64 arrays."""
from __future__ import annotations

import math

import numpy as np

from . import _kernels_numpy
from .errors import ContractViolation

J = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
J.setflags(write=False)
I4 = np.eye(4)
I4.setflags(write=False)


def _as_mat(a, n):
    a = np.asarray(a, dtype=np.float64)
    if a.size == n * n and a.shape != (n, n):
        a = a.reshape(n, n)
    if a.shape != (n, n):
        raise ContractViolation(f"expected a {n}x{n} matrix, got shape {a.shape}")
    return a


def _sign_fix(v):
    if v[0] < 0.0 or (v[0] == 0.0 and v[1] < 0.0):
        return -v
    return v


def sym_eigen_2x2(m):
    """Eigen-decomposition of a real symmetric 2x2 matrix.

    Returns ``(lambda1, lambda2, s)`` with ``lambda1 <= lambda2`` and the
    eigenvectors as the columns of the orthogonal matrix ``s``.  Each
    eigenvector has its first nonzero component positive, which makes ``s``
    unique whenever the eigenvalues are distinct.
    """
    m = _as_mat(m, 2)
    if not np.all(np.isfinite(m)):
        raise ContractViolation("matrix has non-finite entries")
    if abs(m[0, 1] - m[1, 0]) > 1e-12:
        raise ContractViolation("matrix is not symmetric within 1e-12")
    a, d = m[0, 0], m[1, 1]
    b = 0.5 * (m[0, 1] + m[1, 0])
    if b == 0.0:
        if a <= d:
            return float(a), float(d), np.eye(2)
        return float(d), float(a), np.array([[0.0, 1.0], [1.0, 0.0]])
    mean = 0.5 * (a + d)
    rad = math.hypot(0.5 * (a - d), b)
    lam1, lam2 = mean - rad, mean + rad
    # two candidate null vectors of (m - lam1); keep the better-conditioned one
    u = np.array([b, lam1 - a])
    w = np.array([lam1 - d, b])
    v = u if np.dot(u, u) >= np.dot(w, w) else w
    v = v / np.max(np.abs(v))  # rescale first: entries may be subnormal
    v1 = _sign_fix(v / math.hypot(v[0], v[1]))
    v2 = _sign_fix(np.array([-v1[1], v1[0]]))
    return float(lam1), float(lam2), np.column_stack([v1, v2])


def qr_4x4(a):
    """Householder QR with nonnegative diagonal in R."""
    return _kernels_numpy.qr4(_as_mat(a, 4))


def op_norm(a):
    """Spectral norm of a 4x4 matrix.

    Power iteration on ``a.T @ a``, run as repeated squaring of the
    normalized Gram matrix (40 squarings is 2**40 power steps), then one
    Rayleigh quotient on the dominant column.
    """
    a = _as_mat(a, 4)
    g = a.T @ a
    scale = np.max(np.abs(g))
    if scale == 0.0:
        return 0.0
    p = g / scale
    for _ in range(40):
        p = p @ p
        s = np.max(np.abs(p))
        if s == 0.0 or not np.isfinite(s):
            break
        p /= s
    cols = np.sum(p * p, axis=0)
    v = p[:, int(np.argmax(cols))]
    lam = float(v @ g @ v) / float(v @ v)
    return math.sqrt(max(lam, 0.0))


def symplectic_defect(a):
    a = _as_mat(a, 4)
    return float(np.max(np.abs(a.T @ J @ a - J)))


def is_symplectic(a, tol):
    if not tol > 0:
        raise ContractViolation("tol must be positive")
    return symplectic_defect(a) <= tol


def matpow(a, n, extended=False):
    """``a**n`` for integer n >= 0 by binary exponentiation.

    With ``extended`` the products run in ``np.longdouble`` (80-bit on x86)
    and the result is rounded back to float64; rounding error otherwise
    grows linearly in n.
    """
    if n < 0:
        raise ContractViolation("negative power")
    dt = np.longdouble if extended else np.float64
    result = np.eye(a.shape[0], dtype=dt)
    base = np.array(a, dtype=dt)
    first = True
    while n:
        if n & 1:
            result = base.copy() if first else result @ base
            first = False
        n >>= 1
        if n:
            base = base @ base
    return np.asarray(result, dtype=np.float64)


_TAYLOR_ORDER = 18


def expm(a):
    """Matrix exponential by scaling and squaring with a degree-18 Taylor core.

    The argument is scaled to 1-norm <= 1/2, where the truncation error of
    the series is below 1e-22 relative.
    """
    a = np.asarray(a, dtype=np.float64)
    norm = float(np.max(np.sum(np.abs(a), axis=0))) if a.size else 0.0
    s = 0
    if norm > 0.5:
        s = int(math.ceil(math.log2(norm / 0.5)))
    x = a / (2.0 ** s)
    n = a.shape[0]
    # Horner: I + x(I + x/2(I + x/3(...)))
    e = np.eye(n)
    for k in range(_TAYLOR_ORDER, 0, -1):
        e = np.eye(n) + (x @ e) / k
    for _ in range(s):
        e = e @ e
    return e
