"""Command line front-end: ``vcwb {jones,vc-scan,fit,apoly}``.

Configuration precedence is flags, then VCWB_* environment variables, then
defaults.  Failures print one JSON object on stderr and exit with 2
(validation), 3 (numerical) or 4 (I/O).
"""

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass

from . import apoly, vc_analysis
from .errors import DomainError, VCWBError
from .jones_exact import export_table
from .precision import default_digits

SCHEMA_VERSION = 1
FORMATS = ("csv", "gnuplot", "json")
DEFAULT_CACHE = "vc_cache.jsonl"

log = logging.getLogger("vcwb")


class UsageError(DomainError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    start: int = 2
    end: int = 250
    step: int = 1
    digits: int | None = None
    cache: str | None = None
    out: str | None = None
    fmt: str = "csv"
    threads: int = 1
    window: tuple = (21, 250)
    mono_start: int = 30
    grid: int = 128
    tol: float = 1e-6

    def validate(self):
        if self.digits is not None and self.digits < 32:
            raise UsageError(f"--digits must be >= 32, got {self.digits}")
        if self.threads < 1:
            raise UsageError(f"--threads must be >= 1, got {self.threads}")
        if self.fmt not in FORMATS:
            raise UsageError(f"--format must be one of {FORMATS}")
        if self.subcommand == "vc-scan" and not 2 <= self.start <= self.end:
            raise UsageError(f"need 2 <= start <= end, got {self.start}..{self.end}")
        if self.step < 1:
            raise UsageError("--step must be positive")
        lo, hi = self.window
        if not 2 <= lo <= hi:
            raise UsageError(f"invalid window {lo}..{hi}")
        if self.grid < 64:
            raise UsageError("--grid must be >= 64")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        return self

    def digits_for(self, n):
        return default_digits(n) if self.digits is None else self.digits


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _env_int(name):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name}={raw!r} is not an integer") from None


def build_parser():
    p = _Parser(prog="vcwb", description="Colored Jones polynomials of k4_3 and Volume Conjecture numerics.")
    p.add_argument("--log-level", default="WARNING", help="logging level (default WARNING)")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    j = sub.add_parser("jones", help="export exact J(1..n_max) as JSON lines")
    j.add_argument("--n-max", type=int, required=True)
    j.add_argument("--out", default="jones_table.jsonl")

    def common(sp):
        sp.add_argument("--digits", type=int, help="working digits (env VCWB_DIGITS; default policy)")
        sp.add_argument("--cache", help=f"JSONL cache path (env VCWB_CACHE; default {DEFAULT_CACHE})")
        sp.add_argument("--threads", type=int, help="worker processes (env VCWB_THREADS; default 1)")

    s = sub.add_parser("vc-scan", help="scan VC(n) with caching and export plot data")
    s.add_argument("--start", type=int, default=2)
    s.add_argument("--end", type=int, default=250)
    s.add_argument("--step", type=int, default=1)
    s.add_argument("--out", help="output file (default stdout)")
    s.add_argument("--format", dest="fmt", default="csv", choices=FORMATS)
    common(s)

    f = sub.add_parser("fit", help="asymptotic fit and sequence reports from the cache")
    f.add_argument("--window", type=int, nargs=2, default=[21, 250], metavar=("N_MIN", "N_MAX"))
    f.add_argument("--mono-start", type=int, default=30, help="first n of the monotonicity window")
    f.add_argument("--out", help="JSON report path (default stdout)")
    common(f)

    a = sub.add_parser("apoly", help="A-polynomial eigenvalue tracks, volumes and entropy candidates")
    a.add_argument("--grid", type=int, default=128)
    a.add_argument("--tol", type=float, default=1e-6)
    a.add_argument("--csv", dest="out", default="apoly_log_modulus.csv")
    a.add_argument("--report", default="apoly_report.json")
    return p


def resolve_config(args):
    """Merge parsed flags with the environment into a validated RunConfig."""
    cfg = RunConfig(args.subcommand)
    env_digits = _env_int("VCWB_DIGITS")
    env_threads = _env_int("VCWB_THREADS")
    env_cache = os.environ.get("VCWB_CACHE") or None
    if hasattr(args, "digits"):
        cfg.digits = args.digits if args.digits is not None else env_digits
        cfg.threads = args.threads if args.threads is not None else (env_threads or 1)
        cfg.cache = args.cache or env_cache or DEFAULT_CACHE
    for name in ("start", "end", "step", "out", "fmt", "grid", "tol", "mono_start"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if hasattr(args, "window"):
        cfg.window = tuple(args.window)
    return cfg.validate()


def _write_text(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _report_text(obj):
    return json.dumps({"schema_version": SCHEMA_VERSION, **obj}, indent=2, sort_keys=True) + "\n"


def cmd_jones(args):
    if args.n_max < 1:
        raise UsageError("--n-max must be >= 1")

    def progress(N, seconds):
        print(f"J({N}): {seconds:.3f}s", file=sys.stderr)

    export_table(args.n_max, args.out, progress=progress)
    return 0


def cmd_vc_scan(cfg):
    samples = vc_analysis.scan(cfg.start, cfg.end, cfg.step, cfg.digits_for, cfg.cache, threads=cfg.threads)
    if cfg.fmt == "json":
        text = _report_text({"samples": [asdict(s) | {"wall_time": None} for s in samples]})
    else:
        text = vc_analysis.export_string(samples, cfg.fmt)
    _write_text(cfg.out, text)
    return 0


def _cached_window(cfg, lo, hi):
    cache = vc_analysis.load_cache(cfg.cache)
    keys = [(n, cfg.digits_for(n)) for n in range(lo, hi + 1)]
    missing = [n for n, d in keys if (n, d) not in cache]
    if missing:
        raise UsageError(f"cache {cfg.cache} lacks samples for n = {_ranges(missing)}")
    return [cache[k] for k in keys]


def _ranges(ns):
    out, start, prev = [], ns[0], ns[0]
    for n in ns[1:] + [None]:
        if n is not None and n == prev + 1:
            prev = n
            continue
        out.append(str(start) if start == prev else f"{start}-{prev}")
        if n is not None:
            start = prev = n
    return ",".join(out)


def cmd_fit(cfg):
    lo, hi = cfg.window
    samples = _cached_window(cfg, lo, hi)
    fit = vc_analysis.fit_asymptotics(samples, lo, hi)
    report = {
        "fit": fit.to_dict(),
        "volume_consistency": vc_analysis.volume_consistency(fit),
    }
    mono_lo = max(cfg.mono_start, lo)
    report["monotonicity"] = vc_analysis.monotonicity_report(samples, mono_lo, hi)
    if len(samples) >= 2 * vc_analysis.MOVING_WINDOW:
        report["periodicity"] = vc_analysis.periodicity_report(samples)
    _write_text(cfg.out, _report_text(report))
    return 0


def cmd_apoly(cfg, report_path):
    t0 = time.perf_counter()
    tr, report = apoly.analyse(cfg.grid, cfg.tol)
    apoly.export_log_modulus_csv(tr, cfg.out)
    log.info("apoly analysis in %.1fs", time.perf_counter() - t0)
    _write_text(report_path, _report_text(report))
    return 0


def _fail(exc, code):
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING))
        if args.subcommand == "jones":
            return cmd_jones(args)
        cfg = resolve_config(args)
        if cfg.subcommand == "vc-scan":
            return cmd_vc_scan(cfg)
        if cfg.subcommand == "fit":
            return cmd_fit(cfg)
        return cmd_apoly(cfg, args.report)
    except VCWBError as exc:
        return _fail(exc, exc.exit_code)
    except OSError as exc:
        return _fail(exc, 4)
    except (ArithmeticError, ValueError) as exc:
        return _fail(exc, 3)


if __name__ == "__main__":
    sys.exit(main())
