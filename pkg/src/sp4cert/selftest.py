"""Built-in invariant checks behind ``sp4cert selftest``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .diophantine import power_in_neighborhood
from .liealg import (Sp2Element, bracket, coords_of, matrix_of, membership_defect,
                     principal_log_power)
from .lyapunov import RngSeed, estimate_spectrum
from .model import CONFIGS, MatrixLaw, potential_matrix, transfer_matrix
from .smallmat import op_norm, qr_4x4, sym_eigen_2x2, symplectic_defect


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tol: float


def _random_sp2(rng):
    return Sp2Element.from_coords(rng.uniform(-1, 1, 10))


def _checks(rng):
    # each yields (name, worst observed error, tolerance); pass iff worst < tol,
    # or worst <= tol for exact (tol == 0) checks
    es = rng.uniform(2.0, 50.0, 1000)
    es[es <= 2.0] = 3.0
    ws = rng.integers(0, 4, 1000)
    sym, det = 0.0, 0.0
    for e, w in zip(es, ws):
        a = transfer_matrix(e, CONFIGS[w]).a
        sym = max(sym, symplectic_defect(a))
        det = max(det, abs(np.linalg.det(a) - 1.0))
    yield "transfer_symplectic", sym, 1e-10
    yield "transfer_det_one", det, 1e-8

    worst = 0.0
    mats = [potential_matrix(w) for w in CONFIGS]
    for _ in range(200):
        x = rng.uniform(-5, 5, (2, 2))
        mats.append(x + x.T)
    for m in mats:
        l1, l2, s = sym_eigen_2x2(m)
        worst = max(worst, float(np.max(np.abs(m - s @ np.diag([l1, l2]) @ s.T))))
    yield "sym_eigen_reconstruction", worst, 1e-10

    rec, orth = 0.0, 0.0
    for _ in range(200):
        a = rng.uniform(-10, 10, (4, 4))
        q, r = qr_4x4(a)
        rec = max(rec, float(np.max(np.abs(q @ r - a))))
        orth = max(orth, float(np.max(np.abs(q.T @ q - np.eye(4)))))
    yield "qr_reconstruction", rec, 1e-10
    yield "qr_orthogonality", orth, 1e-12
    yield "op_norm_diag", abs(op_norm(np.diag([3.0, 1, 1, 1])) - 3.0), 1e-12

    jac, memb, rt = 0.0, 0.0, 0.0
    for _ in range(50):
        x, y, z = (_random_sp2(rng) for _ in range(3))
        j = bracket(x, bracket(y, z)).z + bracket(y, bracket(z, x)).z + bracket(z, bracket(x, y)).z
        jac = max(jac, float(np.max(np.abs(j))))
        memb = max(memb, membership_defect(bracket(x, y).z))
        rt = max(rt, float(np.max(np.abs(matrix_of(coords_of(x.z)) - x.z))))
    yield "jacobi_identity", jac, 1e-8
    yield "bracket_membership", memb, 1e-9
    yield "coords_roundtrip", rt, 1e-10

    worst = 0.0
    for e in (3.0, 7.5, 15.0):
        for w in CONFIGS:
            tm = transfer_matrix(e, w)
            nb = power_in_neighborhood(tm)
            worst = max(worst, principal_log_power(tm, nb.hit, nb.power, tol=math.inf).roundtrip_err)
    yield "log_roundtrip", worst, 1e-8

    est = estimate_spectrum(MatrixLaw.single(np.eye(4)), 1000, 2, 0, RngSeed(1))
    yield "identity_spectrum", max(abs(g) for g in est.gammas), 0.0
    est = estimate_spectrum(MatrixLaw.single(np.diag([2.0, 3.0, 0.5, 1 / 3])), 1000, 2, 0, RngSeed(1))
    want = (math.log(3), math.log(2), -math.log(2), -math.log(3))
    yield "diagonal_spectrum", max(abs(g - w) for g, w in zip(est.gammas, want)), 1e-10

    np_hit = _accel.get_backend("numpy").first_hit(2.0, math.sqrt(2), 10**6, 2 * math.pi * 1e-3, 1)
    act_hit = _accel.kernels.first_hit(2.0, math.sqrt(2), 10**6, 2 * math.pi * 1e-3, 1)
    yield "backend_agreement", float(abs(np_hit - act_hit)), 0.0


def run_selftest(seed=20240601, tol_scale=1.0):
    """Run all checks; ``tol_scale`` multiplies every tolerance (test hook)."""
    rng = np.random.default_rng(seed)
    out = []
    for name, worst, tol in _checks(rng):
        t = tol * tol_scale
        passed = worst <= t if tol == 0.0 else worst < t
        out.append(CheckResult(name, bool(passed), float(worst), float(t)))
    return out
