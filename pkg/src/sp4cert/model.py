"""Bernoulli potentials and the closed-form one-cell transfer matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, EnergyOutOfRange
from .smallmat import sym_eigen_2x2

# largest eigenvalue of [[w1, 1], [1, w2]] over w in {0,1}^2, reached at (1, 1)
LAMBDA_MAX = 2.0


@dataclass(frozen=True)
class BernoulliConfig:
    omega1: int
    omega2: int

    def __post_init__(self):
        for w in (self.omega1, self.omega2):
            if w not in (0, 1) or isinstance(w, bool):
                raise ContractViolation(f"omega entries must be 0 or 1, got {w!r}")

    @property
    def label(self):
        return f"{self.omega1}{self.omega2}"

    def __iter__(self):
        return iter((self.omega1, self.omega2))


CONFIGS = (
    BernoulliConfig(0, 0),
    BernoulliConfig(1, 0),
    BernoulliConfig(0, 1),
    BernoulliConfig(1, 1),
)


def as_config(omega):
    if isinstance(omega, BernoulliConfig):
        return omega
    w1, w2 = omega
    return BernoulliConfig(int(w1), int(w2))


def potential_matrix(omega):
    w1, w2 = as_config(omega)
    return np.array([[float(w1), 1.0], [1.0, float(w2)]])


@dataclass(frozen=True)
class PotentialEigen:
    lambda1: float
    lambda2: float
    s: np.ndarray


def potential_eigen(omega):
    lam1, lam2, s = sym_eigen_2x2(potential_matrix(omega))
    return PotentialEigen(lam1, lam2, s)


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    e: float
    omega: BernoulliConfig | None
    a: np.ndarray
    r1: float
    r2: float
    s: np.ndarray = field(repr=False)

    def extended(self):
        """The same matrix rebuilt in np.longdouble from (r1, r2, s).

        ``s`` is polished to orthogonality in extended precision first, so
        the result is symplectic to long-double rounding; long powers are
        taken from this copy.
        """
        s = polish_orthogonal(np.asarray(self.s, dtype=np.longdouble))
        return conjugate(s, rotation_block_matrix(self.r1, self.r2, np.longdouble))


def rotation_block_matrix(r1, r2, dtype=np.float64):
    """The cos/sin matrix in (u1, u2, u1', u2') ordering, before conjugation by S."""
    c = np.zeros((4, 4), dtype=dtype)
    for i, r in enumerate((r1, r2)):
        r = dtype(r)
        cs, sn = np.cos(r), np.sin(r)
        c[i, i] = cs
        c[i + 2, i + 2] = cs
        c[i, i + 2] = sn / r
        c[i + 2, i] = -r * sn
    return c


def polish_orthogonal(s, sweeps=3):
    """Newton-Schulz steps s <- s (3I - s^T s) / 2 toward the nearest orthogonal matrix."""
    eye = np.eye(len(s), dtype=s.dtype)
    for _ in range(sweeps):
        s = s @ (3 * eye - s.T @ s) / 2
    return s


def conjugate(s, x):
    """blockdiag(s, s) @ x @ blockdiag(s, s).T for orthogonal s."""
    b = np.zeros((4, 4), dtype=np.result_type(s, x))
    b[:2, :2] = s
    b[2:, 2:] = s
    return b @ x @ b.T


def transfer_from_radii(r1, r2, s=None, e=math.nan, omega=None):
    """Build a transfer matrix from arbitrary wave numbers; also a test hook."""
    if not (r1 > 0 and r2 > 0):
        raise ContractViolation("wave numbers must be positive")
    s = np.eye(2) if s is None else np.asarray(s, dtype=np.float64)
    a = conjugate(s, rotation_block_matrix(r1, r2))
    return TransferMatrix(float(e), omega, a, float(r1), float(r2), s)


def transfer_matrix(e, omega):
    """One-cell transfer matrix at energy ``e > 2`` for the configuration ``omega``."""
    e = float(e)
    if not e > LAMBDA_MAX:
        raise EnergyOutOfRange(f"energy must exceed {LAMBDA_MAX:g}, got {e!r}")
    omega = as_config(omega)
    pe = potential_eigen(omega)
    r1 = math.sqrt(e - pe.lambda1)
    r2 = math.sqrt(e - pe.lambda2)
    return transfer_from_radii(r1, r2, pe.s, e=e, omega=omega)


@dataclass(frozen=True, eq=False)
class MatrixLaw:
    """Finitely supported law on 4x4 matrices, sampled by index."""

    mats: np.ndarray
    weights: np.ndarray
    e: float = math.nan

    def __post_init__(self):
        mats = np.ascontiguousarray(self.mats, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if mats.ndim != 3 or mats.shape[1:] != (4, 4) or len(mats) != len(w):
            raise ContractViolation("need matching (k, 4, 4) matrices and k weights")
        if np.any(w < 0) or not math.isclose(float(w.sum()), 1.0, abs_tol=1e-12):
            raise ContractViolation("weights must be a probability vector")
        object.__setattr__(self, "mats", mats)
        object.__setattr__(self, "weights", w)

    @classmethod
    def single(cls, a, e=math.nan):
        return cls(np.asarray(a, dtype=np.float64)[None], np.ones(1), e)


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    e: float
    p: float
    transfers: tuple
    weights: np.ndarray

    def __getitem__(self, omega):
        omega = as_config(omega)
        return self.transfers[CONFIGS.index(omega)]

    def law(self):
        return MatrixLaw(np.stack([t.a for t in self.transfers]), self.weights, self.e)


def bernoulli_weights(p):
    q = 1.0 - p
    return np.array([q * q, p * q, q * p, p * p])


def generator_set(e, p=0.5):
    if not 0.0 < p < 1.0:
        raise ContractViolation(f"Bernoulli parameter must be in (0, 1), got {p!r}")
    transfers = tuple(transfer_matrix(e, w) for w in CONFIGS)
    return GeneratorSet(float(e), float(p), transfers, bernoulli_weights(p))
