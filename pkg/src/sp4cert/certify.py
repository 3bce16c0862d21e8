"""Per-energy density certificates and energy sweeps.

A certificate at energy e chains: a near-identity power of each of the four
transfer matrices, the closed-form logarithms of those powers, and the rank
of the Lie algebra they generate.  Rank 10 with all powers inside the
delta-ball means the powers generate a dense subgroup of Sp(4, R),
conditional on the delta-ball lying in the neighborhood where that
criterion holds and on floating-point rank being exact; density of the
transfer-matrix group then gives separated, positive exponents.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .diophantine import (DEFAULT_BIG_M, DEFAULT_DELTA, DEFAULT_RETRIES, DiophantineHit,
                          neighborhood_from_hit, power_in_neighborhood)
from .errors import ContractViolation, EnergyOutOfRange, NeighborhoodMiss, RoundtripFailure
from .liealg import DEFAULT_SVD_TOL, DIM, lie_closure_rank, paper_certificate_path, principal_log_power
from .lyapunov import RngSeed, estimate_spectrum, separation_report
from .model import CONFIGS, LAMBDA_MAX, generator_set, transfer_matrix

SEPARATED = "SeparatedPositiveExponents"
INCONCLUSIVE = "Inconclusive"
REFINE_STEPS = 20


@dataclass(frozen=True)
class CertifyConfig:
    big_m: int = DEFAULT_BIG_M
    delta: float = DEFAULT_DELTA
    svd_tol: float = DEFAULT_SVD_TOL
    retries: int = DEFAULT_RETRIES

    def __post_init__(self):
        if self.big_m < 4:
            raise ContractViolation("big_m must be at least 4")
        if not self.delta > 0 or not self.svd_tol > 0:
            raise ContractViolation("delta and svd_tol must be positive")
        if self.retries < 0:
            raise ContractViolation("retries must be nonnegative")


@dataclass(frozen=True, eq=False)
class DensityCertificate:
    e: float
    certified: bool
    rank: int
    rank_margin: float
    depth: int
    delta: float
    big_m: int
    hits: dict
    dists: dict
    det_v1: float
    det_v2: float
    margin_v1: float
    margin_v2: float
    independent: bool
    implication: str
    diagnostic: str = ""

    @property
    def m_values(self):
        return {k: (h.m if h is not None else 0) for k, h in self.hits.items()}


def _uncertified(e, cfg, hits, dists, diagnostic):
    nan = math.nan
    return DensityCertificate(e, False, 0, 0.0, 0, cfg.delta, cfg.big_m, hits, dists,
                              nan, nan, nan, nan, False, INCONCLUSIVE, diagnostic)


def _assemble(e, cfg, transfers, powers):
    hits = {w.label: p.hit for w, p in zip(CONFIGS, powers)}
    dists = {w.label: p.dist for w, p in zip(CONFIGS, powers)}
    try:
        logs = {w: principal_log_power(t, p.hit, p.power) for w, t, p in zip(CONFIGS, transfers, powers)}
    except RoundtripFailure as exc:
        return _uncertified(e, cfg, hits, dists, f"RoundtripFailure: {exc}")
    closure = lie_closure_rank([lw.la for lw in logs.values()], cfg.svd_tol)
    paper = paper_certificate_path(logs, cfg.svd_tol)
    inside = all(d < cfg.delta for d in dists.values())
    certified = closure.rank == DIM and inside
    diagnostic = "" if certified else f"rank {closure.rank} < {DIM}" if inside else "power outside delta"
    return DensityCertificate(
        e, certified, closure.rank, closure.min_kept_sv, closure.depth, cfg.delta, cfg.big_m,
        hits, dists, paper.det_v1, paper.det_v2, paper.margin_v1, paper.margin_v2,
        paper.independent, SEPARATED if certified else INCONCLUSIVE, diagnostic,
    )


def _transfers(e, generators):
    if generators is None:
        return [transfer_matrix(e, w) for w in CONFIGS]
    return [generators[w] if w in generators else generators[tuple(w)] for w in CONFIGS]


def certify_energy(e, cfg=None, generators=None):
    """Density certificate at energy ``e``.

    ``generators`` optionally replaces the four transfer matrices (mapping
    from configuration to TransferMatrix); used to test failure modes.
    """
    cfg = cfg or CertifyConfig()
    e = float(e)
    if not e > LAMBDA_MAX:
        raise EnergyOutOfRange(f"energy must exceed {LAMBDA_MAX:g}, got {e!r}")
    transfers = _transfers(e, generators)
    powers, hits, dists = [], {}, {}
    for w, t in zip(CONFIGS, transfers):
        try:
            p = power_in_neighborhood(t, cfg.big_m, cfg.delta, cfg.retries)
        except NeighborhoodMiss as exc:
            hits[w.label] = None
            dists[w.label] = exc.dist
            return _uncertified(e, cfg, {**hits, **{c.label: None for c in CONFIGS if c.label not in hits}},
                                dists, f"NeighborhoodMiss[{w.label}]: {exc}")
        hits[w.label] = p.hit
        dists[w.label] = p.dist
        powers.append(p)
    return _assemble(e, cfg, transfers, powers)


def replay_certificate(cert, generators=None, svd_tol=None):
    """Recompute a certificate from its stored hits, skipping the search."""
    if any(h is None for h in cert.hits.values()):
        raise ContractViolation("certificate has no complete set of hits to replay")
    cfg = CertifyConfig(cert.big_m, cert.delta, svd_tol or DEFAULT_SVD_TOL)
    transfers = _transfers(cert.e, generators)
    powers = [neighborhood_from_hit(t, cert.hits[w.label]) for w, t in zip(CONFIGS, transfers)]
    return _assemble(cert.e, cfg, transfers, powers)


@dataclass(frozen=True)
class CrossValidation:
    consistent: bool
    detail: str


def cross_validate(cert, est):
    if not math.isclose(cert.e, est.e, rel_tol=1e-12, abs_tol=0.0):
        raise ContractViolation(f"energy mismatch: certificate {cert.e!r}, estimate {est.e!r}")
    sep = separation_report(est)
    if not cert.certified:
        return CrossValidation(True, "not certified; no constraint on the estimate")
    if sep.significant:
        return CrossValidation(True, f"certified and separated (gap {sep.gap12:.3e}, gamma2 {sep.positivity_margin:.3e})")
    return CrossValidation(False, f"certified but not significantly separated "
                                  f"(gap {sep.gap12:.3e}, gamma2 {sep.positivity_margin:.3e})")


@dataclass(frozen=True)
class LyapunovCheckConfig:
    every: int = 32
    n_steps: int = 1_000_000
    n_replicas: int = 16
    burn_in: int = 1_000
    p: float = 0.5
    seed: int = 0


@dataclass(frozen=True, eq=False)
class SuspectedInterval:
    e_lo: float
    e_hi: float
    min_rank: int
    refined_lo: float
    refined_hi: float
    grid_points: tuple


@dataclass(frozen=True, eq=False)
class LyapunovCheck:
    e: float
    estimate: object
    separation: object
    validation: CrossValidation


@dataclass(eq=False)
class SweepReport:
    grid: np.ndarray
    certificates: list
    suspected_exceptional: list = field(default_factory=list)
    near_exceptional: list = field(default_factory=list)
    refinements: list = field(default_factory=list)
    lyapunov_checks: list = field(default_factory=list)

    @property
    def certified_fraction(self):
        return sum(c.certified for c in self.certificates) / len(self.certificates)


def _safe_certify(e, cfg):
    try:
        return certify_energy(e, cfg)
    except Exception as exc:  # a sweep records failures, it never aborts
        return _uncertified(float(e), cfg, {w.label: None for w in CONFIGS}, {},
                            f"{type(exc).__name__}: {exc}")


def _badness(cert):
    return (cert.certified, cert.rank, cert.rank_margin)


def refine(center, width, cfg, bounds=(LAMBDA_MAX, math.inf), steps=REFINE_STEPS):
    """Shrink [center - width/2, center + width/2] toward the worst certificate.

    The starting bracket is clipped to ``bounds``.  Each step certifies the
    midpoints of both halves and keeps the half whose midpoint has the lower
    (certified, rank, rank_margin).  Returns the final bracket and all
    certificates evaluated.
    """
    lo = max(center - 0.5 * width, bounds[0], np.nextafter(LAMBDA_MAX, math.inf))
    hi = min(center + 0.5 * width, bounds[1])
    seen = []
    for _ in range(steps):
        q = 0.25 * (hi - lo)
        left, right = _safe_certify(lo + q, cfg), _safe_certify(hi - q, cfg)
        seen += [left, right]
        if _badness(left) <= _badness(right):
            hi = lo + 2 * q
        else:
            lo = hi - 2 * q
    return lo, hi, seen


def sweep(e_min, e_max, n_grid, cfg=None, lyapunov=None, jobs=1, near_factor=1e3):
    """Certify an energy grid and bracket the energies where certification fails.

    Uncertified grid points are grouped into runs of consecutive indices;
    each run becomes one suspected interval spanning half a grid spacing
    beyond its end points, with a bisection-refined locus inside.  Grid
    points whose rank margin is a local minimum below ``near_factor *
    svd_tol`` are refined too and listed as near-exceptional.
    """
    cfg = cfg or CertifyConfig()
    if not (LAMBDA_MAX < e_min < e_max):
        raise ContractViolation("need 2 < e_min < e_max")
    if n_grid < 2:
        raise ContractViolation("n_grid must be at least 2")
    grid = np.linspace(e_min, e_max, n_grid)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            certs = list(pool.map(lambda e: _safe_certify(e, cfg), grid))
    else:
        certs = [_safe_certify(e, cfg) for e in grid]
    report = SweepReport(grid, certs)

    spacing = (e_max - e_min) / (n_grid - 1)
    ref_width = (e_max - e_min) / n_grid
    bad = [i for i, c in enumerate(certs) if not c.certified]
    runs = []
    for i in bad:
        if runs and runs[-1][-1] == i - 1:
            runs[-1].append(i)
        else:
            runs.append([i])
    for run in runs:
        worst = min(run, key=lambda i: _badness(certs[i]))
        e_lo = max(e_min, grid[run[0]] - 0.5 * spacing)
        e_hi = min(e_max, grid[run[-1]] + 0.5 * spacing)
        lo, hi, seen = refine(grid[worst], ref_width, cfg, (e_lo, e_hi))
        report.refinements += seen
        min_rank = min([certs[i].rank for i in run] + [c.rank for c in seen])
        report.suspected_exceptional.append(
            SuspectedInterval(float(e_lo), float(e_hi), int(min_rank), float(lo), float(hi),
                              tuple(float(grid[i]) for i in run)))

    near = near_factor * cfg.svd_tol
    margins = [c.rank_margin if c.certified else math.inf for c in certs]
    for i, mg in enumerate(margins):
        if mg >= near:
            continue
        if (i > 0 and margins[i - 1] < mg) or (i + 1 < n_grid and margins[i + 1] < mg):
            continue
        lo, hi, seen = refine(grid[i], ref_width, cfg, (e_min, e_max))
        report.refinements += seen
        worst = min(seen, key=_badness)
        report.near_exceptional.append(
            SuspectedInterval(float(lo), float(hi), int(worst.rank), float(lo), float(hi),
                              (float(grid[i]),)))

    if lyapunov is not None and lyapunov.every > 0:
        ok = [i for i, c in enumerate(certs) if c.certified]
        for i in ok[::lyapunov.every]:
            est = estimate_spectrum(generator_set(grid[i], lyapunov.p), lyapunov.n_steps,
                                    lyapunov.n_replicas, lyapunov.burn_in, RngSeed(lyapunov.seed, i))
            report.lyapunov_checks.append(
                LyapunovCheck(float(grid[i]), est, separation_report(est), cross_validate(certs[i], est)))
    return report
