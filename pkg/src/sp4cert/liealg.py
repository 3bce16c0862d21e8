"""The Lie algebra sp(4, R): coordinates, logarithms, brackets, and closure rank.

Coordinates are taken in a fixed basis adapted to the splitting into
V1 = {(A, 0; 0, -A^T)} and V2 = {(0, C; B, 0) : B, C symmetric}:

    0..3  A = E11, E12, E21, E22
    4..6  C = E11, E22, E12 + E21   (upper-right block)
    7..9  B = E11, E22, E12 + E21   (lower-left block)

The basis is Frobenius-orthogonal; ``frob_coords`` rescales coordinates so
that the Euclidean inner product on them is the Frobenius one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .diophantine import DiophantineHit
from .errors import ContractViolation, RoundtripFailure
from .model import CONFIGS, BernoulliConfig, as_config, conjugate
from .smallmat import J, expm, matpow

DIM = 10
MEMBERSHIP_TOL = 1e-9
ROUNDTRIP_TOL = 1e-8
DEFAULT_SVD_TOL = 1e-7

_SQ2 = math.sqrt(2.0)
BASIS_NORMS = np.array([_SQ2] * 4 + [1.0, 1.0, _SQ2] * 2)


def membership_defect(z):
    return float(np.max(np.abs(z.T @ J + J @ z)))


def coords_of(z):
    z = np.asarray(z, dtype=np.float64)
    return np.array([
        z[0, 0], z[0, 1], z[1, 0], z[1, 1],
        z[0, 2], z[1, 3], z[0, 3],
        z[2, 0], z[3, 1], z[2, 1],
    ])


def matrix_of(coords):
    a, b, c, d, c11, c22, c12, b11, b22, b12 = (float(v) for v in coords)
    return np.array([
        [a, b, c11, c12],
        [c, d, c12, c22],
        [b11, b12, -a, -c],
        [b12, b22, -b, -d],
    ])


@dataclass(frozen=True, eq=False)
class Sp2Element:
    z: np.ndarray
    coords: np.ndarray = field(repr=False)

    @classmethod
    def from_matrix(cls, z, tol=MEMBERSHIP_TOL):
        z = np.array(z, dtype=np.float64)
        if z.shape != (4, 4):
            raise ContractViolation("sp(4) elements are 4x4")
        scale = max(1.0, float(np.max(np.abs(z))))
        if membership_defect(z) > tol * scale:
            raise ContractViolation("matrix is not in sp(4, R)")
        return cls(z, coords_of(z))

    @classmethod
    def from_coords(cls, coords):
        coords = np.array(coords, dtype=np.float64)
        return cls(matrix_of(coords), coords)

    @property
    def frob_coords(self):
        return self.coords * BASIS_NORMS

    def __add__(self, other):
        return Sp2Element.from_coords(self.coords + other.coords)

    def __sub__(self, other):
        return Sp2Element.from_coords(self.coords - other.coords)

    def __neg__(self):
        return Sp2Element.from_coords(-self.coords)


def basis():
    return [Sp2Element.from_coords(np.eye(DIM)[k]) for k in range(DIM)]


def v1_element(a, b, c, d):
    return Sp2Element.from_coords([a, b, c, d, 0, 0, 0, 0, 0, 0])


def bracket(x, y):
    z = x.z @ y.z - y.z @ x.z
    return Sp2Element(z, coords_of(z))


@dataclass(frozen=True, eq=False)
class LogWitness:
    omega: BernoulliConfig | None
    hit: DiophantineHit
    la: Sp2Element
    roundtrip_err: float


def log_block_matrix(r1, r2, theta1, theta2):
    """theta_i * [[0, 1/r_i], [-r_i, 0]] per channel, (u1, u2, u1', u2') ordering."""
    x = np.zeros((4, 4))
    for i, (r, th) in enumerate(((r1, theta1), (r2, theta2))):
        x[i, i + 2] = th / r
        x[i + 2, i] = -th * r
    return x


_TWO_PI_EXT = 2 * np.arccos(np.longdouble(-1))


def wrapped_angles(r1, r2, hit):
    m = np.longdouble(hit.m)
    th1 = m * np.longdouble(r1) - np.longdouble(hit.x1) * _TWO_PI_EXT
    th2 = m * np.longdouble(r2) - np.longdouble(hit.x2) * _TWO_PI_EXT
    return float(th1), float(th2)


def principal_log_power(tm, hit, power=None, tol=ROUNDTRIP_TOL):
    """Closed-form principal logarithm of ``tm.a ** hit.m``.

    The wrapped angles theta_i = m r_i - 2 pi x_i (the hit's errors, here
    recomputed in long double) give the per-channel rotation generators.
    ``exp`` of the result is compared with the power (computed here by
    binary exponentiation unless given).
    """
    th1, th2 = wrapped_angles(tm.r1, tm.r2, hit)
    if max(abs(th1), abs(th2)) >= math.pi:
        raise ContractViolation("wrapped angle outside the principal branch")
    la = conjugate(tm.s, log_block_matrix(tm.r1, tm.r2, th1, th2))
    if power is None:
        power = matpow(tm.extended(), hit.m, extended=True)
    err = float(np.max(np.abs(expm(la) - power)))
    if not err < tol:
        raise RoundtripFailure(err, tol)
    return LogWitness(tm.omega, hit, Sp2Element(la, coords_of(la)), err)


@dataclass(frozen=True)
class ClosureRank:
    rank: int
    min_kept_sv: float
    depth: int


def _span(rows, svd_tol):
    sv_rows = np.asarray(rows, dtype=np.float64)
    _, sv, vt = np.linalg.svd(sv_rows, full_matrices=False)
    if sv.size == 0 or sv[0] == 0.0:
        return np.zeros((0, DIM)), 1.0
    keep = sv > svd_tol * sv[0]
    k = int(np.count_nonzero(keep))
    return vt[:k], float(sv[k - 1] / sv[0])


def lie_closure_rank(gens, svd_tol=DEFAULT_SVD_TOL):
    """Dimension of the Lie algebra generated by ``gens``.

    Works on Frobenius coordinates.  Each round replaces the current span by
    an orthonormal basis, brackets all pairs of basis elements and takes the
    numerical rank of the union (singular values above ``svd_tol`` times the
    largest).  ``min_kept_sv`` is the smallest relative singular value kept
    in any round; ``depth`` counts rounds that increased the rank.
    """
    gens = list(gens)
    if not 1 <= len(gens) <= 64:
        raise ContractViolation("need between 1 and 64 generators")
    if not svd_tol > 0:
        raise ContractViolation("svd_tol must be positive")
    span, margin = _span([g.frob_coords for g in gens], svd_tol)
    depth = 0
    while 0 < len(span) < DIM:
        elems = [Sp2Element.from_coords(row / BASIS_NORMS) for row in span]
        brackets = [bracket(elems[i], elems[j]).frob_coords
                    for i in range(len(elems)) for j in range(i + 1, len(elems))]
        if not brackets:
            break
        new, new_margin = _span(np.vstack([span, brackets]), svd_tol)
        if len(new) <= len(span):
            break
        span = new
        margin = min(margin, new_margin)
        depth += 1
    return ClosureRank(len(span), margin, depth)


@dataclass(frozen=True)
class PaperCertificate:
    det_v1: float
    det_v2: float
    margin_v1: float
    margin_v2: float
    independent: bool


def _hadamard_ratio(cols):
    m = np.column_stack(cols)
    det = float(np.linalg.det(m))
    norms = np.prod(np.linalg.norm(m, axis=0))
    return det, (float(abs(det) / norms) if norms > 0 else 0.0)


Z1 = v1_element(1, 0, 0, 0)
Z2 = v1_element(0, 0, 0, 1)
Z3 = v1_element(1, 1, 1, 1)


def paper_certificate_path(logs, svd_tol=DEFAULT_SVD_TOL):
    """Explicit 4 + 6 independence test built from the four logarithms.

    ``logs`` maps each configuration (or its tuple) to a LogWitness or
    Sp2Element.  V1 family: [L10, L00], [L01, L00], [L10, L11], [L01, L11],
    tested through their upper-left 2x2 blocks.  V2 family: the differences
    D1 = L10 - L00, D2 = L10 - L11, D3 = L01 - L00 and the brackets
    [D1, Z1], [D2, Z2], [D3, Z3], tested through their V2 coordinates.

    Each determinant is also reported divided by the product of its column
    norms; ``independent`` requires both normalized values above ``svd_tol``.
    """
    la = {}
    for key, val in logs.items():
        la[as_config(key)] = val.la if isinstance(val, LogWitness) else val
    missing = [w for w in CONFIGS if w not in la]
    if missing:
        raise ContractViolation(f"missing logarithms for {missing}")
    l00, l10, l01, l11 = (la[w] for w in CONFIGS)
    fam1 = [bracket(l10, l00), bracket(l01, l00), bracket(l10, l11), bracket(l01, l11)]
    det1, m1 = _hadamard_ratio([f.coords[:4] for f in fam1])
    d1, d2, d3 = l10 - l00, l10 - l11, l01 - l00
    fam2 = [d1, d2, d3, bracket(d1, Z1), bracket(d2, Z2), bracket(d3, Z3)]
    det2, m2 = _hadamard_ratio([f.coords[4:] for f in fam2])
    return PaperCertificate(det1, det2, m1, m2, bool(m1 > svd_tol and m2 > svd_tol))
