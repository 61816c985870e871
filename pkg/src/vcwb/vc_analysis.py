"""The Volume Conjecture sequence VC(n) and its analysis.

VC(n) = (2 pi / n) log J(n)(e^(2 pi i / n)) on the principal branch.  Scans
are cached as JSON lines keyed by (n, digits); J is kept as decimal strings
at full working precision, VC as doubles.
"""

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import gmpy2
import numpy as np

from .errors import CacheCorruptionError, DomainError, FitError, PrecisionError
from .mp_eval import eval_jones_at_root
from .precision import default_digits, digits_to_bits, working_precision

log = logging.getLogger(__name__)

VOL_K0 = 3.474247
LOG_COEFF_LIMIT = 1.5
CACHE_FIELDS = ("n", "digits", "j_re", "j_im", "vc_re", "vc_im", "wall_time")
MOVING_WINDOW = 12


@dataclass(frozen=True)
class VCSample:
    n: int
    digits: int
    j_re: str
    j_im: str
    vc_re: float
    vc_im: float
    wall_time: float

    @property
    def key(self):
        return self.n, self.digits

    @property
    def vc(self):
        return complex(self.vc_re, self.vc_im)

    def jones_value(self):
        """J as an mpc at the precision it was computed with.

        That is `digits`, or twice it after a precision retry; the right one
        is the precision at which the stored strings reproduce themselves.
        """
        for digits in (self.digits, 2 * self.digits):
            prec = digits_to_bits(digits)
            re, im = gmpy2.mpfr(self.j_re, prec), gmpy2.mpfr(self.j_im, prec)
            if str(re) == self.j_re and str(im) == self.j_im:
                break
        return gmpy2.mpc(re, im, precision=prec)

    def to_json(self):
        return json.dumps(asdict(self), separators=(",", ":"))

    @classmethod
    def from_obj(cls, obj):
        missing = [f for f in CACHE_FIELDS if f not in obj]
        if missing:
            raise ValueError(f"missing fields {missing}")
        return cls(
            n=int(obj["n"]),
            digits=int(obj["digits"]),
            j_re=str(obj["j_re"]),
            j_im=str(obj["j_im"]),
            vc_re=float(obj["vc_re"]),
            vc_im=float(obj["vc_im"]),
            wall_time=float(obj["wall_time"]),
        )


def _vc_from_jones(n, value):
    if value == 0:
        raise PrecisionError(f"J({n}) evaluated to zero")
    scale = 2 * gmpy2.const_pi() / n
    return complex(float(scale * gmpy2.log(abs(value))), float(scale * gmpy2.phase(value)))


def evaluate_sample(n, digits=None):
    """Compute one VCSample; a precision failure is retried once at doubled digits.

    `digits` stays the requested precision so cache keys are stable.
    """
    if n < 2:
        raise DomainError("VC(n) needs n >= 2")
    requested = default_digits(n) if digits is None else digits
    t0 = time.perf_counter()
    try:
        work = requested
        value = eval_jones_at_root(n, work)
    except PrecisionError as exc:
        work = 2 * requested
        log.warning("n=%d: %s; retrying at %d digits", n, exc, work)
        value = eval_jones_at_root(n, work)
    with working_precision(work):
        vc = _vc_from_jones(n, value)
        j_re, j_im = str(value.real), str(value.imag)
    return VCSample(n, requested, j_re, j_im, vc.real, vc.imag, time.perf_counter() - t0)


def vc(n, digits=None):
    """VC(n) as a Python complex."""
    return evaluate_sample(n, digits).vc


def load_cache(path):
    """{(n, digits): VCSample}; the first occurrence of a key wins."""
    out = {}
    if path is None or not os.path.exists(path):
        return out
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                sample = VCSample.from_obj(json.loads(line))
            except (ValueError, TypeError, AttributeError) as exc:
                raise CacheCorruptionError(path, lineno, str(exc)) from exc
            out.setdefault(sample.key, sample)
    return out


def _append(path, samples):
    with open(path, "a", encoding="utf-8") as fh:
        for s in samples:
            fh.write(s.to_json() + "\n")
        fh.flush()


def _eval_job(job):
    n, digits = job
    return evaluate_sample(n, digits)


def scan(n_min, n_max, step=1, digits_policy=None, cache_path=None, *, threads=1, progress=None):
    """VC samples for n_min..n_max, reusing and extending the cache.

    `digits_policy` is None (default policy), an int, or a callable n -> digits.
    Results are appended in n order by this process only.
    """
    if not 2 <= n_min <= n_max or step < 1:
        raise DomainError(f"invalid scan range {n_min}..{n_max} step {step}")
    if digits_policy is None:
        policy = default_digits
    elif callable(digits_policy):
        policy = digits_policy
    else:
        policy = lambda n: int(digits_policy)  # noqa: E731
    # corruption must surface before anything is appended
    cache = load_cache(cache_path)
    wanted = [(n, policy(n)) for n in range(n_min, n_max + 1, step)]
    missing = [key for key in wanted if key not in cache]
    if cache_path is not None and missing:
        # fail on an unwritable cache before spending any compute
        open(cache_path, "a", encoding="utf-8").close()
    log.info("scan %d..%d: %d cached, %d to compute", n_min, n_max, len(wanted) - len(missing), len(missing))

    def record(sample):
        cache[sample.key] = sample
        if cache_path is not None:
            _append(cache_path, [sample])
        if progress is not None:
            progress(sample)

    if threads > 1 and len(missing) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for sample in pool.map(_eval_job, missing):
                record(sample)
    else:
        for job in missing:
            record(_eval_job(job))
    return [cache[key] for key in wanted]


@dataclass(frozen=True)
class FitResult:
    c_const: float
    c_inv: float
    c_logn: float
    residual_max: float
    window: tuple

    @property
    def coefficients(self):
        return self.c_const, self.c_inv, self.c_logn

    def predict(self, n):
        n = np.asarray(n, dtype=float)
        return self.c_const + self.c_inv / n + self.c_logn * np.log(n) / n

    def to_dict(self):
        d = asdict(self)
        d["window"] = list(self.window)
        return d


def _series(samples, attr="vc_re"):
    pts = sorted((s.n, getattr(s, attr)) for s in samples)
    return np.array([p[0] for p in pts], dtype=float), np.array([p[1] for p in pts], dtype=float)


def fit_asymptotics(samples, n_min=21, n_max=250):
    """Least squares of Re VC on {1, 1/n, log(n)/n} over [n_min, n_max] via QR."""
    inside = [s for s in samples if n_min <= s.n <= n_max]
    if len(inside) < 4:
        raise FitError(f"need at least 4 samples in [{n_min}, {n_max}], got {len(inside)}")
    n, y = _series(inside)
    X = np.column_stack([np.ones_like(n), 1 / n, np.log(n) / n])
    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-12 * diag.max():
        raise FitError("design matrix is rank deficient")
    coef = np.linalg.solve(R, Q.T @ y)
    resid = float(np.max(np.abs(X @ coef - y)))
    return FitResult(float(coef[0]), float(coef[1]), float(coef[2]), resid, (n_min, n_max))


def volume_consistency(fit, vol=VOL_K0, const_tol=2e-3, log_tol=3e-2):
    """Deviations of the fitted constant from vol and of c_logn / (2 pi) from 3/2."""
    d_const = fit.c_const - vol
    d_log = fit.c_logn / (2 * math.pi) - LOG_COEFF_LIMIT
    return {
        "c_const": fit.c_const,
        "vol": vol,
        "const_deviation": d_const,
        "const_tolerance": const_tol,
        "const_pass": abs(d_const) <= const_tol,
        "logn_over_2pi": fit.c_logn / (2 * math.pi),
        "logn_deviation": d_log,
        "logn_tolerance": log_tol,
        "logn_pass": abs(d_log) <= log_tol,
        "pass": abs(d_const) <= const_tol and abs(d_log) <= log_tol,
    }


def moving_average(y, width=MOVING_WINDOW):
    """Trailing-aligned mean over `width` consecutive points (length len(y) - width + 1)."""
    y = np.asarray(y, dtype=float)
    if len(y) < width:
        return np.array([])
    c = np.cumsum(np.concatenate([[0.0], y]))
    return (c[width:] - c[:-width]) / width


def _decreasing_summary(ns, ys):
    violations = [int(ns[i + 1]) for i in range(len(ys) - 1) if not ys[i + 1] < ys[i]]
    n0 = int(ns[0])
    for i in range(len(ys) - 1, 0, -1):
        if not ys[i] < ys[i - 1]:
            n0 = int(ns[i])
            break
    return {
        "n0": n0,
        "violations": len(violations),
        "violation_locations": violations,
        "minimum_n": int(ns[int(np.argmin(ys))]),
    }


def monotonicity_report(samples, n_min=None, n_max=None):
    """Where Re VC is strictly decreasing, raw and after a 12-point moving average.

    `n0` is the least n from which the sequence is strictly decreasing to the
    end of the window; violations are reported at the larger index of each
    non-decreasing step.  The smoothed series is labelled by its last n.
    """
    sel = [s for s in samples if (n_min is None or s.n >= n_min) and (n_max is None or s.n <= n_max)]
    if len(sel) < 2:
        raise DomainError("monotonicity_report needs at least 2 samples")
    ns, ys = _series(sel)
    report = {"window": [int(ns[0]), int(ns[-1])], "raw": _decreasing_summary(ns, ys)}
    smooth = moving_average(ys)
    if len(smooth) >= 2:
        report["moving_average"] = _decreasing_summary(ns[MOVING_WINDOW - 1:], smooth)
    else:
        report["moving_average"] = None
    report["strictly_decreasing"] = report["raw"]["violations"] == 0
    return report


def periodicity_report(samples, attr="vc_im", peak_ratio=4.0):
    """Dominant period of the detrended series (Im VC by default).

    A period is flagged only if the spectral peak carries at least `peak_ratio`
    times the mean power of the other bins.
    """
    if len(samples) < 2 * MOVING_WINDOW:
        raise DomainError(f"periodicity_report needs at least {2 * MOVING_WINDOW} samples")
    _, ys = _series(samples, attr)
    trend = moving_average(ys)
    detrended = ys[MOVING_WINDOW - 1:] - trend
    power = np.abs(np.fft.rfft(detrended - detrended.mean())) ** 2
    power[0] = 0.0
    length = len(detrended)
    out = {"attr": attr, "length": length, "dominant_period": None, "peak_ratio": 0.0}
    if len(power) < 3 or power.max() <= 1e-24 * max(1.0, float(np.abs(ys).max()) ** 2):
        return out
    k = int(np.argmax(power))
    others = np.delete(power[1:], k - 1)
    ratio = float(power[k] / others.mean()) if others.size and others.mean() > 0 else math.inf
    out["peak_ratio"] = ratio
    if ratio >= peak_ratio:
        out["dominant_period"] = length / k
        out["frequency_bin"] = k
    return out


def export_csv(samples, path_or_file, fmt="csv"):
    """Write n, vc_re, vc_im as CSV with header, or whitespace columns for gnuplot."""
    rows = sorted(samples, key=lambda s: s.n)
    own = isinstance(path_or_file, (str, os.PathLike))
    fh = open(path_or_file, "w", encoding="utf-8", newline="") if own else path_or_file
    try:
        if fmt == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "vc_re", "vc_im"])
            for s in rows:
                w.writerow([s.n, repr(s.vc_re), repr(s.vc_im)])
        elif fmt == "gnuplot":
            fh.write("# n vc_re vc_im\n")
            for s in rows:
                fh.write(f"{s.n} {s.vc_re!r} {s.vc_im!r}\n")
        else:
            raise DomainError(f"unknown export format {fmt!r}")
    finally:
        if own:
            fh.close()


def export_string(samples, fmt="csv"):
    buf = io.StringIO()
    export_csv(samples, buf, fmt)
    return buf.getvalue()
