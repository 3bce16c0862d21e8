"""JSON and CSV emission for certificates, sweeps and Lyapunov runs."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from . import __version__
from ._accel import BACKEND
from .lyapunov import separation_report, symmetry_defect
from .model import CONFIGS


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def make_header(command, config):
    return {"artifact": "sp4cert", "version": __version__, "backend": BACKEND,
            "command": command, "config": config}


def hit_record(hit, dist):
    if hit is None:
        return {"m": None, "x1": None, "x2": None, "err1": None, "err2": None,
                "bound": None, "dist": _num(dist) if dist is not None else None}
    return {"m": hit.m, "x1": hit.x1, "x2": hit.x2, "err1": hit.err1, "err2": hit.err2,
            "bound": hit.bound, "dist": _num(dist)}


def certificate_record(cert):
    return {
        "energy": cert.e,
        "certified": cert.certified,
        "implication": cert.implication,
        "rank": cert.rank,
        "rank_margin": _num(cert.rank_margin),
        "depth": cert.depth,
        "delta": cert.delta,
        "big_m": cert.big_m,
        "det_v1": _num(cert.det_v1),
        "det_v2": _num(cert.det_v2),
        "margin_v1": _num(cert.margin_v1),
        "margin_v2": _num(cert.margin_v2),
        "independent": cert.independent,
        "diagnostic": cert.diagnostic,
        "hits": {k: hit_record(cert.hits.get(k), cert.dists.get(k)) for k in (w.label for w in CONFIGS)},
    }


def estimate_record(est):
    sep = separation_report(est)
    d14, d23 = symmetry_defect(est)
    return {
        "energy": _num(est.e),
        "gammas": list(est.gammas),
        "stderrs": list(est.stderrs),
        "n_steps": est.n_steps,
        "n_replicas": est.n_replicas,
        "burn_in": est.burn_in,
        "symmetry_defect_14": d14,
        "symmetry_defect_23": d23,
        "gap12": sep.gap12,
        "positivity_margin": sep.positivity_margin,
        "significant": sep.significant,
    }


def interval_record(iv):
    return {"e_lo": iv.e_lo, "e_hi": iv.e_hi, "min_rank": iv.min_rank,
            "refined_lo": iv.refined_lo, "refined_hi": iv.refined_hi,
            "grid_points": list(iv.grid_points)}


def sweep_record(report):
    return {
        "n_grid": len(report.grid),
        "certified_fraction": report.certified_fraction,
        "suspected_exceptional": [interval_record(iv) for iv in report.suspected_exceptional],
        "near_exceptional": [interval_record(iv) for iv in report.near_exceptional],
        "certificates": [certificate_record(c) for c in report.certificates],
        "refinements": [certificate_record(c) for c in report.refinements],
        "lyapunov_checks": [
            {"energy": chk.e, "estimate": estimate_record(chk.estimate),
             "consistent": chk.validation.consistent, "detail": chk.validation.detail}
            for chk in report.lyapunov_checks
        ],
    }


SWEEP_COLUMNS = ["kind", "energy", "certified", "rank", "rank_margin", "depth",
                 "det_v1", "det_v2", "margin_v1", "margin_v2", "independent",
                 "m_00", "m_10", "m_01", "m_11"]


def sweep_rows(report):
    rows = []
    for kind, certs in (("grid", report.certificates), ("refine", report.refinements)):
        for c in certs:
            m = c.m_values
            rows.append([kind, c.e, c.certified, c.rank, c.rank_margin, c.depth,
                         c.det_v1, c.det_v2, c.margin_v1, c.margin_v2, c.independent,
                         m["00"], m["10"], m["01"], m["11"]])
    return rows


CERT_COLUMNS = ["energy", "certified", "rank", "rank_margin", "depth", "det_v1", "det_v2",
                "margin_v1", "margin_v2", "independent", "delta", "big_m",
                "m_00", "m_10", "m_01", "m_11", "dist_00", "dist_10", "dist_01", "dist_11",
                "diagnostic"]


def certificate_rows(certs):
    rows = []
    for c in certs:
        m = c.m_values
        rows.append([c.e, c.certified, c.rank, c.rank_margin, c.depth, c.det_v1, c.det_v2,
                     c.margin_v1, c.margin_v2, c.independent, c.delta, c.big_m,
                     *(m[w.label] for w in CONFIGS),
                     *(c.dists.get(w.label, math.nan) for w in CONFIGS),
                     c.diagnostic])
    return rows


LYAP_COLUMNS = ["energy", "gamma1", "gamma2", "gamma3", "gamma4",
                "stderr1", "stderr2", "stderr3", "stderr4",
                "n_steps", "n_replicas", "burn_in",
                "symmetry_defect_14", "symmetry_defect_23", "gap12", "positivity_margin", "significant"]


def estimate_rows(est):
    r = estimate_record(est)
    return [[est.e, *est.gammas, *est.stderrs, est.n_steps, est.n_replicas, est.burn_in,
             r["symmetry_defect_14"], r["symmetry_defect_23"], r["gap12"],
             r["positivity_margin"], r["significant"]]]


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_json(path, header, body):
    path = Path(path)
    text = json.dumps({"header": header, **body}, indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def write_csv(path, header, columns, rows):
    """CSV with a leading '#' comment block holding the run header as JSON."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        for key, val in header.items():
            fh.write(f"# {key}: {json.dumps(val, sort_keys=True)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path
