"""Regenerate tests/data/golden_sweep.json: ``python tests/bless_golden.py``."""
import json
from pathlib import Path

from sp4cert.certify import sweep

OUT = Path(__file__).parent / "data" / "golden_sweep.json"
E_MIN, E_MAX, N_GRID = 2.1, 20.0, 512


def snapshot(rep):
    return {
        "e_min": E_MIN, "e_max": E_MAX, "n_grid": N_GRID,
        "certified_fraction": rep.certified_fraction,
        "suspected_exceptional": [[iv.e_lo, iv.e_hi, iv.min_rank] for iv in rep.suspected_exceptional],
        "certified": [c.certified for c in rep.certificates],
        "rank": [c.rank for c in rep.certificates],
        "m": [[c.m_values[k] for k in ("00", "10", "01", "11")] for c in rep.certificates],
        "rank_margin": [c.rank_margin for c in rep.certificates],
    }


if __name__ == "__main__":
    OUT.write_text(json.dumps(snapshot(sweep(E_MIN, E_MAX, N_GRID)), indent=1) + "\n")
    print(OUT)
