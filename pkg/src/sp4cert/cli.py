"""Command-line interface: ``sp4cert {certify,sweep,lyapunov,selftest}``.

Settings resolve as built-in defaults < ``--config`` file (flat
``key = value`` lines) < command-line flags.  Output goes to
``<output_dir>/<command>-<config digest>/``; the default output directory
comes from ``SP4CERT_OUTPUT_DIR``.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import report
from .certify import CertifyConfig, LyapunovCheckConfig, certify_energy, sweep
from .errors import DegenerateFrame, EnergyOutOfRange
from .lyapunov import RngSeed, estimate_spectrum, separation_report
from .model import generator_set
from .selftest import run_selftest

EXIT_OK, EXIT_FAIL, EXIT_UNCERTIFIED, EXIT_USAGE = 0, 1, 2, 64
OUTPUT_ENV = "SP4CERT_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    e_min: float = 2.1
    e_max: float = 20.0
    n_grid: int = 512
    big_m: int = 1_000_000
    delta: float = 0.1
    svd_tol: float = 1e-7
    retries: int = 3
    p: float = 0.5
    n_steps: int = 1_000_000
    n_replicas: int = 16
    burn_in: int = 1_000
    seed: int = 0
    stream: int = 0
    lyap_every: int = 32
    output_dir: str = ""
    formats: str = "csv,json"
    jobs: int = 1

    def validate(self):
        if not 2.0 < self.e_min < self.e_max:
            raise UsageError("need 2 < emin < emax")
        if self.n_grid < 2:
            raise UsageError("grid needs at least 2 points")
        if self.big_m < 4:
            raise UsageError("big-m must be at least 4")
        if not self.delta > 0 or not self.svd_tol > 0:
            raise UsageError("delta and svd-tol must be positive")
        if self.retries < 0 or self.lyap_every < 0:
            raise UsageError("retries and lyap-every must be nonnegative")
        if not 0.0 < self.p < 1.0:
            raise UsageError("p must lie in (0, 1)")
        if self.n_replicas < 1:
            raise UsageError("replicas must be at least 1")
        if self.burn_in < 0 or self.n_steps < 10 * self.burn_in or self.n_steps <= self.burn_in:
            raise UsageError("need steps >= 10 * burn-in and steps > burn-in")
        if not (0 <= self.seed < 2**64 and 0 <= self.stream < 2**64):
            raise UsageError("seed and stream must be 64-bit unsigned")
        if self.jobs < 1:
            raise UsageError("jobs must be at least 1")
        bad = set(self.format_list()) - {"csv", "json"}
        if bad or not self.format_list():
            raise UsageError(f"formats must be a subset of csv,json (got {self.formats!r})")

    def format_list(self):
        return [f.strip() for f in self.formats.split(",") if f.strip()]

    def certify_config(self):
        return CertifyConfig(self.big_m, self.delta, self.svd_tol, self.retries)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"float": float, "int": int, "str": str}


def load_config_file(path):
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _cast(key, val)
    return values


def _cast(key, val):
    try:
        return _CASTS[_FIELD_TYPES[key]](val)
    except ValueError:
        raise UsageError(f"bad value for {key}: {val!r}") from None


# flag name -> RunConfig field
_FLAG_FIELDS = {
    "emin": "e_min", "emax": "e_max", "grid": "n_grid", "big_m": "big_m", "delta": "delta",
    "svd_tol": "svd_tol", "retries": "retries", "p": "p", "steps": "n_steps",
    "replicas": "n_replicas", "burn_in": "burn_in", "seed": "seed", "stream": "stream",
    "lyap_every": "lyap_every", "output_dir": "output_dir", "format": "formats", "jobs": "jobs",
}


def resolve_config(args):
    values = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    for flag, name in _FLAG_FIELDS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[name] = v
    cfg = RunConfig(**values)
    if not cfg.output_dir:
        cfg.output_dir = os.environ.get(OUTPUT_ENV, "sp4cert-runs")
    return cfg


def _common(p):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--output-dir", help=f"output root (default ${OUTPUT_ENV} or ./sp4cert-runs)")
    p.add_argument("--format", help="comma list from csv,json")
    p.add_argument("--jobs", type=int, help="worker threads for per-energy work")


def _cert_flags(p):
    p.add_argument("--big-m", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--svd-tol", type=float)
    p.add_argument("--retries", type=int)


def _mc_flags(p):
    p.add_argument("--p", type=float, help="Bernoulli parameter")
    p.add_argument("--steps", type=int)
    p.add_argument("--replicas", type=int)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--stream", type=int)


def build_parser():
    parser = _Parser(prog="sp4cert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="density certificate at given energies")
    p.add_argument("--energy", type=float, action="append", required=True)
    _common(p)
    _cert_flags(p)

    p = sub.add_parser("sweep", help="certify an energy grid and locate exceptional energies")
    p.add_argument("--emin", type=float)
    p.add_argument("--emax", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--lyap-every", type=int, help="Lyapunov cross-check every k-th certified point (0: off)")
    _common(p)
    _cert_flags(p)
    _mc_flags(p)

    p = sub.add_parser("lyapunov", help="Monte-Carlo Lyapunov spectrum")
    p.add_argument("--energy", type=float, required=True)
    _common(p)
    _mc_flags(p)

    p = sub.add_parser("selftest", help="run built-in invariant checks")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--tol-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    return parser


def run_dir(cfg, command, extra):
    keyed = {k: v for k, v in asdict(cfg).items() if k != "output_dir"}
    keyed.update(extra)
    digest = hashlib.sha256(json.dumps(keyed, sort_keys=True).encode()).hexdigest()[:12]
    out = Path(cfg.output_dir) / f"{command}-{digest}"
    out.mkdir(parents=True, exist_ok=True)
    return out, keyed


def _emit(cfg, out, name, header, body, columns, rows):
    written = []
    if "json" in cfg.format_list():
        written.append(report.write_json(out / f"{name}.json", header, body))
    if "csv" in cfg.format_list():
        written.append(report.write_csv(out / f"{name}.csv", header, columns, rows))
    for path in written:
        print(path)


def cmd_certify(args, cfg):
    certs = [certify_energy(e, cfg.certify_config()) for e in args.energy]
    out, keyed = run_dir(cfg, "certify", {"energies": args.energy})
    header = report.make_header("certify", keyed)
    body = {"certificates": [report.certificate_record(c) for c in certs]}
    _emit(cfg, out, "certificates", header, body, report.CERT_COLUMNS, report.certificate_rows(certs))
    for c in certs:
        status = "certified" if c.certified else f"uncertified ({c.diagnostic})"
        print(f"E={c.e:.17g}: {status}; rank {c.rank}", file=sys.stderr)
    return EXIT_OK if all(c.certified for c in certs) else EXIT_UNCERTIFIED


def cmd_sweep(args, cfg):
    lyap = LyapunovCheckConfig(cfg.lyap_every, cfg.n_steps, cfg.n_replicas, cfg.burn_in, cfg.p, cfg.seed)
    rep = sweep(cfg.e_min, cfg.e_max, cfg.n_grid, cfg.certify_config(),
                lyapunov=lyap if cfg.lyap_every > 0 else None, jobs=cfg.jobs)
    out, keyed = run_dir(cfg, "sweep", {})
    header = report.make_header("sweep", keyed)
    _emit(cfg, out, "sweep", header, report.sweep_record(rep), report.SWEEP_COLUMNS, report.sweep_rows(rep))
    print(f"certified fraction {rep.certified_fraction:.4f}; "
          f"{len(rep.suspected_exceptional)} suspected exceptional intervals", file=sys.stderr)
    return EXIT_OK if rep.certified_fraction == 1.0 else EXIT_UNCERTIFIED


def cmd_lyapunov(args, cfg):
    gen = generator_set(args.energy, cfg.p)
    est = estimate_spectrum(gen, cfg.n_steps, cfg.n_replicas, cfg.burn_in, RngSeed(cfg.seed, cfg.stream))
    out, keyed = run_dir(cfg, "lyapunov", {"energy": args.energy})
    header = report.make_header("lyapunov", keyed)
    _emit(cfg, out, "lyapunov", header, {"estimate": report.estimate_record(est)},
          report.LYAP_COLUMNS, report.estimate_rows(est))
    sep = separation_report(est)
    print("gammas " + " ".join(f"{g:.6g}" for g in est.gammas), file=sys.stderr)
    return EXIT_OK if sep.significant else EXIT_UNCERTIFIED


def cmd_selftest(args):
    results = run_selftest(tol_scale=args.tol_scale)
    if args.json:
        print(json.dumps({"passed": all(r.passed for r in results),
                          "checks": [asdict(r) for r in results]}, indent=2))
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:28s} worst={r.worst:.3e} tol={r.tol:.1e}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


_COMMANDS = {"certify": cmd_certify, "sweep": cmd_sweep, "lyapunov": cmd_lyapunov}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "selftest":
        return cmd_selftest(args)
    try:
        cfg = resolve_config(args)
        cfg.validate()
    except (UsageError, OSError) as exc:
        parser.print_usage(sys.stderr)
        print(f"sp4cert: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args, cfg)
    except (EnergyOutOfRange, DegenerateFrame, OSError) as exc:
        print(f"sp4cert: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
