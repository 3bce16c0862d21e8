"""Acceptance suite: one recorded pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also collected in the terminal summary.
"""
from __future__ import annotations

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from sp4cert.certify import sweep
from sp4cert.cli import main
from sp4cert.diophantine import simultaneous_approx
from sp4cert.liealg import lie_closure_rank, paper_certificate_path, principal_log_power
from sp4cert.lyapunov import (RngSeed, estimate_spectrum, replica_exponents, sample_indices,
                              separation_report, symmetry_defect)
from sp4cert.model import CONFIGS, MatrixLaw, generator_set, transfer_matrix
from sp4cert.smallmat import J, expm, matpow, op_norm

GOLDEN = Path(__file__).parent / "data" / "golden_sweep.json"
BIG_M = 1_000_000
SVD_TOL = 1e-7
# 100 points on (2, 20]: the left endpoint is excluded
GRID = np.linspace(2.0, 20.0, 101)[1:]


@pytest.fixture(scope="module")
def grid_powers():
    """Hits and extended-precision powers for every grid energy and configuration."""
    t0 = time.perf_counter()
    rows = []
    for e in GRID:
        for w in CONFIGS:
            tm = transfer_matrix(e, w)
            hit = simultaneous_approx(tm.r1, tm.r2, BIG_M)
            rows.append((e, w, tm, hit, matpow(tm.extended(), hit.m, extended=True)))
    return rows, time.perf_counter() - t0


@pytest.fixture(scope="module")
def grid_logs(grid_powers):
    rows, _ = grid_powers
    t0 = time.perf_counter()
    logs = {}
    for e, w, tm, hit, power in rows:
        # tol=inf: the roundtrip error is asserted by the criterion itself
        logs.setdefault(e, {})[w] = principal_log_power(tm, hit, power, tol=math.inf)
    return logs, time.perf_counter() - t0


def test_criterion_1_symplecticity(acceptance):
    rng = np.random.default_rng(20240101)
    es = 2.0 + 48.0 * (1.0 - rng.random(1000))  # (2, 50]
    ws = rng.integers(0, 4, 1000)
    t0 = time.perf_counter()
    worst_sym = worst_det = 0.0
    for e, k in zip(es, ws):
        a = transfer_matrix(e, CONFIGS[k]).a
        worst_sym = max(worst_sym, float(np.max(np.abs(a.T @ J @ a - J))))
        worst_det = max(worst_det, abs(np.linalg.det(a) - 1.0))
    dt = time.perf_counter() - t0
    ok = worst_sym < 1e-10 and worst_det < 1e-8 and dt < 1.0
    acceptance(1, "symplecticity suite", ok,
               f"max defect {worst_sym:.2e}, max |det-1| {worst_det:.2e}, {dt:.2f}s")


def test_criterion_2_diophantine(acceptance, grid_powers):
    rows, dt = grid_powers
    bound = 2 * math.pi * 1e-3
    worst_err = worst_dist = 0.0
    for e, w, tm, hit, power in rows:
        worst_err = max(worst_err, hit.max_err)
        worst_dist = max(worst_dist, op_norm(power - np.eye(4)))
    ok = worst_err < bound and worst_dist < 0.1 and dt < 120.0
    acceptance(2, "Diophantine contract", ok,
               f"{len(rows)} hits, max |m r - 2 pi x| {worst_err:.2e} (< {bound:.2e}), "
               f"max op_norm(A^m - I) {worst_dist:.3e}, {dt:.1f}s")


def test_criterion_3_log_roundtrip(acceptance, grid_powers, grid_logs):
    rows, _ = grid_powers
    logs, dt = grid_logs
    worst = 0.0
    for e, w, tm, hit, power in rows:
        worst = max(worst, float(np.max(np.abs(expm(logs[e][w].la.z) - power))))
    ok = worst < 1e-8 and dt < 60.0
    acceptance(3, "logarithm roundtrip", ok, f"max |exp(L) - A^m| {worst:.2e}, {dt:.1f}s")


def test_criterion_4_lie_closure(acceptance, grid_logs):
    from sp4cert.certify import CertifyConfig, certify_energy

    cert = certify_energy(3.0, CertifyConfig(svd_tol=SVD_TOL))
    at3 = cert.rank == 10 and cert.independent and cert.certified
    logs, _ = grid_logs
    violations, n_indep = [], 0
    for e, per in logs.items():
        rank = lie_closure_rank([lw.la for lw in per.values()], SVD_TOL).rank
        indep = paper_certificate_path(per, SVD_TOL).independent
        n_indep += indep
        if indep and rank != 10:
            violations.append(float(e))
    ok = at3 and not violations
    acceptance(4, "Lie closure", ok,
               f"E=3: rank {cert.rank}, independent {cert.independent}; "
               f"grid: {n_indep}/{len(logs)} independent, {len(violations)} with rank < 10")


def test_criterion_5_sweep(acceptance):
    golden = json.loads(GOLDEN.read_text())
    t0 = time.perf_counter()
    rep = sweep(golden["e_min"], golden["e_max"], golden["n_grid"])
    dt = time.perf_counter() - t0
    spacing = (golden["e_max"] - golden["e_min"]) / (golden["n_grid"] - 1)
    certs = rep.certificates
    covered = all(any(iv.e_lo <= c.e <= iv.e_hi for iv in rep.suspected_exceptional)
                  for c in certs if not c.certified)
    narrow = all(iv.refined_hi - iv.refined_lo <= 2 * spacing * (1 + 1e-9)
                 for iv in rep.suspected_exceptional)
    m_now = [[c.m_values[k] for k in ("00", "10", "01", "11")] for c in certs]
    same = (m_now == golden["m"]
            and [c.certified for c in certs] == golden["certified"]
            and [c.rank for c in certs] == golden["rank"]
            and np.allclose([c.rank_margin for c in certs], golden["rank_margin"], rtol=1e-6, atol=0))
    ok = rep.certified_fraction >= 0.95 and covered and narrow and same and dt < 1800.0
    acceptance(5, "sweep discreteness proxy", ok,
               f"certified {rep.certified_fraction:.4f}, {len(rep.suspected_exceptional)} suspected "
               f"intervals, golden match {same}, {dt:.1f}s")


def test_criterion_6_lyapunov_structure(acceptance):
    t0 = time.perf_counter()
    est = estimate_spectrum(generator_set(3.0, 0.5), 1_000_000, 16, seed=RngSeed(0))
    dt = time.perf_counter() - t0
    g, s = est.gammas, est.stderrs
    sep = separation_report(est)
    d14, d23 = symmetry_defect(est)
    sym_ok = d14 < 3 * math.hypot(s[0], s[3]) and d23 < 3 * math.hypot(s[1], s[2])
    ok = sep.significant and sym_ok and dt < 300.0
    acceptance(6, "Lyapunov structure", ok,
               "gammas " + ", ".join(f"{x:.5f}" for x in g)
               + f"; gap {sep.gap12:.2e} vs 3(s1+s2) {3 * (s[0] + s[1]):.2e}"
               + f"; defects {d14:.1e}, {d23:.1e}; {dt:.1f}s")


def test_criterion_7_null_randomness(acceptance):
    gen = generator_set(3.0)
    law = MatrixLaw(gen.law().mats, [1.0, 0.0, 0.0, 0.0], 3.0)  # all mass on (0, 0)
    est = estimate_spectrum(law, 1_000_000, 16, seed=RngSeed(7))
    a = gen.transfers[0].a
    # explicit powers: every power up to 10^4 plus dyadic powers up to 2^20
    worst_norm, p = 0.0, np.eye(4)
    for _ in range(10_000):
        p = a @ p
        worst_norm = max(worst_norm, op_norm(p))
    ext = gen.transfers[0].extended()
    for k in range(14, 21):
        worst_norm = max(worst_norm, op_norm(matpow(ext, 2**k, extended=True)))
    bounded = worst_norm < 1e3
    small = max(abs(x) for x in est.gammas) < 5e-3
    acceptance(7, "null-randomness control", small and bounded,
               f"max |gamma| {max(abs(x) for x in est.gammas):.2e}; "
               f"max op_norm(A^n) {worst_norm:.3f}")


def test_criterion_8_oracle_equivalence(acceptance):
    # Path lengths 2..20; for a single matrix, max log|R_ii| and log sigma_max
    # can differ by about 0.2 by construction, so n = 1 is not an oracle check.
    law = generator_set(3.0, 0.5).law()
    worst, worst_n = 0.0, 0
    for n in range(2, 21):
        for seed in range(100):
            rs = RngSeed(seed)
            qr_top = float(np.max(replica_exponents(law, n, 1, 0, rs)[0]))
            prod = np.eye(4)
            for k in sample_indices(law, rs.generator(0), n):
                prod = law.mats[k] @ prod
            sv = math.log(np.linalg.svd(prod, compute_uv=False)[0]) / n
            if abs(qr_top - sv) > worst:
                worst, worst_n = abs(qr_top - sv), n
    acceptance(8, "oracle equivalence", worst < 0.2,
               f"n in 2..20, 100 paths each, max |gamma1_QR - log(sigma_max)/n| {worst:.3f} at n={worst_n}")


def _run_twice(tmp_path, argv):
    trees = []
    for tag in ("a", "b"):
        root = tmp_path / tag
        assert main(argv + ["--output-dir", str(root)]) in (0, 2)
        trees.append({p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()})
    return trees


def test_criterion_9_determinism(acceptance, tmp_path, capsys):
    sweep_argv = ["sweep", "--emin", "2.1", "--emax", "20", "--grid", "64", "--lyap-every", "16",
                  "--steps", "20000", "--replicas", "4", "--burn-in", "100", "--seed", "3"]
    lyap_argv = ["lyapunov", "--energy", "3.0", "--steps", "100000", "--replicas", "4",
                 "--seed", "11", "--stream", "2"]
    a1, b1 = _run_twice(tmp_path / "sweep", sweep_argv)
    a2, b2 = _run_twice(tmp_path / "lyap", lyap_argv)
    capsys.readouterr()
    ok = bool(a1) and bool(a2) and a1 == b1 and a2 == b2
    acceptance(9, "determinism", ok,
               f"sweep files {sorted(map(str, a1))}, lyapunov files {sorted(map(str, a2))}, identical {ok}")
