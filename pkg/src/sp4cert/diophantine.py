"""Simultaneous Diophantine search for near-identity powers of transfer matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import ContractViolation, NeighborhoodMiss, NoHitFound
from .smallmat import matpow, op_norm

TWO_PI = 2.0 * math.pi
DEFAULT_BIG_M = 1_000_000
DEFAULT_DELTA = 0.1
DEFAULT_RETRIES = 3


@dataclass(frozen=True)
class DiophantineHit:
    m: int
    x1: int
    x2: int
    err1: float
    err2: float
    bound: float

    @property
    def max_err(self):
        return max(abs(self.err1), abs(self.err2))


def approx_bound(big_m):
    return TWO_PI / math.sqrt(big_m)


def hit_for(r1, r2, m, bound):
    """Assemble the hit record for a given m (no acceptance check)."""
    p1, p2 = m * r1, m * r2
    x1 = math.floor(p1 / TWO_PI + 0.5)
    x2 = math.floor(p2 / TWO_PI + 0.5)
    return DiophantineHit(int(m), int(x1), int(x2), p1 - TWO_PI * x1, p2 - TWO_PI * x2, bound)


def simultaneous_approx(r1, r2, big_m, backend=None):
    """Smallest m in [1, big_m] with m*r1 and m*r2 both within 2*pi/sqrt(big_m) of 2*pi*Z.

    Dirichlet's theorem on simultaneous approximation guarantees a hit, up to
    the strict inequality.
    """
    if big_m < 4:
        raise ContractViolation("big_m must be at least 4")
    if not (r1 > 0 and r2 > 0):
        raise ContractViolation("r1 and r2 must be positive")
    bound = approx_bound(big_m)
    m = _accel.get_backend(backend).first_hit(float(r1), float(r2), int(big_m), bound, 1)
    if m == 0:
        raise NoHitFound(big_m)
    return hit_for(r1, r2, m, bound)


@dataclass(frozen=True, eq=False)
class NeighborhoodPower:
    hit: DiophantineHit
    power: np.ndarray
    dist: float
    big_m: int


def power_in_neighborhood(tm, big_m=DEFAULT_BIG_M, delta=DEFAULT_DELTA,
                          retries=DEFAULT_RETRIES, backend=None):
    """Find m with ``op_norm(A**m - I) < delta``, growing big_m fourfold per retry."""
    if not delta > 0:
        raise ContractViolation("delta must be positive")
    dist = math.inf
    for _ in range(retries + 1):
        try:
            hit = simultaneous_approx(tm.r1, tm.r2, big_m, backend)
        except NoHitFound:
            big_m *= 4
            continue
        power = matpow(tm.extended(), hit.m, extended=True)
        dist = op_norm(power - np.eye(4))
        if dist < delta:
            return NeighborhoodPower(hit, power, dist, big_m)
        big_m *= 4
    raise NeighborhoodMiss(dist, big_m // 4, delta)


def neighborhood_from_hit(tm, hit):
    """Recompute the power for a stored hit (audit replay, no search)."""
    power = matpow(tm.extended(), hit.m, extended=True)
    return NeighborhoodPower(hit, power, op_norm(power - np.eye(4)), 0)
