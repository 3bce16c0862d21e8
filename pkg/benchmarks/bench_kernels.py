"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--steps N] [--replicas R] [--big-m M]

The numba timings exclude JIT compilation (one warm-up call first).
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from sp4cert import _accel
from sp4cert.diophantine import approx_bound
from sp4cert.lyapunov import RngSeed, sample_indices
from sp4cert.model import CONFIGS, generator_set, transfer_matrix


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_lyap(kern, law, idx, repeat):
    def run():
        frames = np.broadcast_to(np.eye(4), (idx.shape[0], 4, 4)).copy()
        sums = np.zeros((idx.shape[0], 4))
        kern.lyap_chunk(law.mats, idx, frames, sums, 0, 0)
    return _best_of(run, repeat)


def bench_first_hit(kern, r1, r2, big_m, repeat):
    bound = approx_bound(big_m)
    return _best_of(lambda: kern.first_hit(r1, r2, big_m, bound, 1), repeat)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--replicas", type=int, default=16)
    ap.add_argument("--big-m", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    law = generator_set(3.0).law()
    seed = RngSeed(0)
    idx = np.stack([sample_indices(law, seed.generator(k), args.steps) for k in range(args.replicas)])
    tm = transfer_matrix(7.3, CONFIGS[1])

    rows = []
    for name in ("numba", "numpy"):
        kern = _accel.get_backend(name)
        if name == "numba":
            bench_lyap(kern, law, idx[:, :8], 1)
            bench_first_hit(kern, tm.r1, tm.r2, 1000, 1)
        t_lyap = bench_lyap(kern, law, idx, args.repeat)
        t_hit = bench_first_hit(kern, tm.r1, tm.r2, args.big_m, args.repeat)
        rows.append((name, t_lyap, t_hit))

    n = args.steps * args.replicas
    print(f"{'backend':8s} {'lyap_chunk':>12s} {'ns/step':>9s} {'first_hit':>11s}")
    for name, t_lyap, t_hit in rows:
        print(f"{name:8s} {t_lyap:11.4f}s {1e9 * t_lyap / n:9.1f} {t_hit:10.4f}s")
    (_, l0, h0), (_, l1, h1) = rows
    print(f"speedup  lyap_chunk x{l1 / l0:.1f}, first_hit x{h1 / h0:.1f}")


if __name__ == "__main__":
    main()
