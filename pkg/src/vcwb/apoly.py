"""Eigenvalues of the nonabelian A-polynomial factor B(l, m) of k4_3.

The ten roots of B(., e^{it}) are followed along t in [0, 2 pi] by Aberth
iteration in multiprecision, labelled, and integrated in log-modulus to
recover the volumes V1, V2, V3.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from .errors import ClassificationError, DomainError, QuadratureError, SolverError
from .precision import working_precision

# (l-degree, m-degree, coefficient)
B_TERMS = (
    (10, 0, 1),
    (9, 13, 1), (9, 14, 1),
    (8, 25, -1), (8, 26, 4), (8, 27, -8), (8, 28, 3), (8, 29, -1),
    (7, 40, -3), (7, 41, -4), (7, 42, -1),
    (6, 55, 2),
    (5, 66, -2), (5, 67, 11), (5, 68, -6), (5, 69, 11), (5, 70, -2),
    (4, 81, 2),
    (3, 94, -1), (3, 95, -4), (3, 96, -3),
    (2, 107, -1), (2, 108, 3), (2, 109, -8), (2, 110, 4), (2, 111, -1),
    (1, 122, 1), (1, 123, 1),
    (0, 136, 1),
)

# Delta(t) of k4_3 as {exponent: coefficient}
ALEXANDER = {-8: 1, -7: -1, -5: 1, -4: -1, -2: 1, -1: -1, 0: 1, 1: -1, 2: 1, 4: -1, 5: 1, 7: -1, 8: 1}

DEGREE = 10
UNIT_TOL = 1e-8
COLLISION_POINTS = (0.0, math.pi, 2 * math.pi)
TWO_PI = 2 * math.pi

#: root-finder precision away from and close to the collision angles
BASE_DIGITS = 30
COLLISION_DIGITS = 80
COLLISION_ZONE = 1e-2


@dataclass(frozen=True)
class APolyCoeffs:
    terms: tuple = B_TERMS

    @property
    def degrees(self):
        return max(i for i, _, _ in self.terms), max(j for _, j, _ in self.terms)

    def is_reciprocal(self):
        dl, dm = self.degrees
        have = {(i, j): c for i, j, c in self.terms}
        return all(have.get((dl - i, dm - j)) == c for (i, j), c in have.items())

    def at_m_one(self):
        """Integer coefficients of B(l, 1), constant term first."""
        out = [0] * (self.degrees[0] + 1)
        for i, _, c in self.terms:
            out[i] += c
        return out

    def l_coefficients(self, t):
        """Coefficients of B(l, e^{it}) in l, constant term first, at the current precision."""
        t = gmpy2.mpfr(t)
        out = [gmpy2.mpc(0)] * (self.degrees[0] + 1)
        for i, j, c in self.terms:
            s, co = gmpy2.sin_cos(j * t)
            out[i] += c * gmpy2.mpc(co, s)
        return out


B = APolyCoeffs()


def _horner(coeffs, z):
    """(p(z), p'(z)) for coefficients constant-first."""
    p = coeffs[-1]
    dp = gmpy2.mpc(0)
    for c in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _scale(coeffs, z):
    r = abs(z)
    s = gmpy2.mpfr(0)
    for c in reversed(coeffs):
        s = s * r + abs(c)
    return s


def aberth(coeffs, init, tol, maxiter=2000):
    """Simultaneous Aberth-Ehrlich iteration from `init` (list of mpc).

    A root is settled once its correction is below tol * max(1, |z|) or its
    residual reaches the rounding floor of the evaluation; clustered roots
    can only get there.  Returns (roots, iterations).
    """
    z = list(init)
    n = len(z)
    if coeffs[-1] == 0:
        raise SolverError("leading coefficient vanishes")
    floor = 64 * gmpy2.mpfr(2) ** (-gmpy2.get_context().precision)
    one = gmpy2.mpfr(1)
    for it in range(maxiter):
        settled = True
        for i in range(n):
            zi = z[i]
            p, dp = _horner(coeffs, zi)
            if abs(p) <= floor * _scale(coeffs, zi):
                continue
            s = gmpy2.mpc(0)
            for j in range(n):
                if j != i:
                    d = zi - z[j]
                    s += 1 / d if d != 0 else 1 / floor
            if dp == 0:
                step = -1 / s
            else:
                ratio = p / dp
                step = ratio / (1 - ratio * s)
            z[i] = zi - step
            if abs(step) > tol * max(one, abs(z[i])):
                settled = False
        if settled:
            return z, it + 1
    return z, maxiter


def _seed_roots():
    """Perturbed copies of the roots of B(l, 1) = (l+1)^6 (l-1)^4."""
    base = [-1] * 6 + [1] * 4
    return [b + gmpy2.mpc(gmpy2.mpfr(1e-3) * math.cos(k + 0.5), gmpy2.mpfr(1e-3) * math.sin(k + 0.5))
            for k, b in enumerate(base)]


def _digits_for(t):
    near = min(abs(t - c) for c in COLLISION_POINTS)
    return COLLISION_DIGITS if near < COLLISION_ZONE else BASE_DIGITS


def roots10(t, tol=1e-12, *, init=None, digits=None, coeffs=B):
    """The ten roots of B(., e^{it}) as Python complex numbers.

    The iteration runs in multiprecision; `init` optionally seeds it (complex
    values, e.g. the roots at a neighbouring angle).  Every root must satisfy
    |B(lambda, e^{it})| <= tol * sum_i |b_i| |lambda|^i.
    """
    if not 0 <= t <= TWO_PI + 1e-12:
        raise DomainError(f"t = {t} outside [0, 2 pi]")
    if digits is None:
        digits = _digits_for(t)
    with working_precision(digits):
        cs = coeffs.l_coefficients(t)
        start = _seed_roots() if init is None else _jitter([gmpy2.mpc(z) for z in init])
        eps = gmpy2.mpfr(10) ** (-(digits * 3) // 4)
        z, iters = aberth(cs, start, eps)
        residuals = [float(abs(_horner(cs, zi)[0]) / _scale(cs, zi)) for zi in z]
    worst = max(residuals)
    if worst > tol:
        raise SolverError(f"roots10({t}): residual {worst:.3e} > {tol:.1e} after {iters} iterations")
    return [complex(zi) for zi in z]


def _jitter(zs):
    # coincident seeds stall Aberth
    out = []
    for k, z in enumerate(zs):
        for w in out:
            if abs(z - w) < 1e-14:
                z = z + gmpy2.mpc(1e-10 * math.cos(k), 1e-10 * math.sin(k))
                break
        out.append(z)
    return out


def match(prev, new):
    """Permutation of `new` minimising displacement from `prev`, greedy by distance.

    Returns (reordered new, ambiguity) where ambiguity is the largest ratio of
    the chosen distance to the distance of the next-best free candidate.
    """
    pairs = sorted((abs(p - q), i, j) for i, p in enumerate(prev) for j, q in enumerate(new))
    used_i, used_j, chosen = set(), set(), {}
    for _, i, j in pairs:
        if i not in used_i and j not in used_j:
            chosen[i] = j
            used_i.add(i)
            used_j.add(j)
    ordered = [new[chosen[i]] for i in range(len(prev))]
    ambiguity = 0.0
    for i, p in enumerate(prev):
        d = sorted(abs(p - q) for q in new)
        best = abs(p - ordered[i])
        if len(d) > 1 and d[1] > 0:
            ambiguity = max(ambiguity, best / d[1])
    return ordered, ambiguity


def _continue(coeffs, t0, roots0, t1, velocity=None, depth=0, max_depth=8):
    """(roots at t1 matched to roots0, their velocity).

    Seeds and matching use the linear predictor roots0 + velocity (t1 - t0);
    the step is halved while the matching stays ambiguous, except across a
    collision angle where ambiguity is intrinsic.
    """
    r0 = np.asarray(roots0, dtype=complex)
    collision = _touches_collision(t0, t1)
    # root velocities blow up at a collision (square-root branching)
    if velocity is None or collision:
        v0 = np.zeros_like(r0)
    else:
        v0 = np.asarray(velocity, dtype=complex)
    pred = r0 + v0 * (t1 - t0)
    new = roots10(t1, init=list(pred), coeffs=coeffs)
    ordered, amb = match(list(pred), new)
    if amb > 0.5 and depth < max_depth and not collision:
        mid = 0.5 * (t0 + t1)
        r_mid, v_mid = _continue(coeffs, t0, r0, mid, v0, depth + 1, max_depth)
        return _continue(coeffs, mid, r_mid, t1, v_mid, depth + 1, max_depth)
    ordered = np.array(ordered, dtype=complex)
    return ordered, (ordered - r0) / (t1 - t0)


def _touches_collision(t0, t1):
    return any(min(t0, t1) - 1e-9 <= c <= max(t0, t1) + 1e-9 for c in COLLISION_POINTS)


@dataclass
class EigenTrack:
    t_grid: np.ndarray
    roots: np.ndarray  # shape (len(t_grid), 10), column k = track k
    labels: dict = field(default_factory=dict)  # "lambda1".."lambda4" -> column, "unit" -> columns

    def log_modulus(self, column):
        return np.log(np.abs(self.roots[:, column]))

    def column(self, label):
        return self.labels[label]


def track(grid_size=256, coeffs=B):
    """Continue the ten roots over a uniform grid on [0, 2 pi] and label them."""
    if grid_size < 64:
        raise DomainError("track needs grid_size >= 64")
    ts = np.linspace(0.0, TWO_PI, grid_size + 1)
    rows = [np.array(roots10(0.0, coeffs=coeffs), dtype=complex)]
    vel = None
    for a, b in zip(ts[:-1], ts[1:]):
        r, vel = _continue(coeffs, float(a), rows[-1], float(b), vel)
        rows.append(r)
    tr = EigenTrack(ts, np.array(rows, dtype=complex))
    tr.labels = classify(tr)
    return tr


def classify(tr, slope_eps=1e-3, coeffs=B):
    """Assign lambda1..lambda4 and the six unit-modulus tracks.

    lambda1 is the track whose log-modulus rises fastest just after t = 0,
    lambda2 its mirror under t -> 2 pi - t in modulus, and lambda3, lambda4
    the partners of lambda1, lambda2 under lambda -> 1 / conj(lambda), the
    symmetry of the root set at a fixed t.
    """
    dev = np.max(np.abs(np.abs(tr.roots) - 1.0), axis=0)
    unit = [int(k) for k in np.flatnonzero(dev < UNIT_TOL)]
    rest = [k for k in range(tr.roots.shape[1]) if k not in unit]
    if len(unit) != 6 or len(rest) != 4:
        raise ClassificationError(f"expected 6 unit-modulus tracks, found {len(unit)}")
    # one-sided slope of log|lambda| at 0+; continue back from the first grid
    # point, since matching against the clustered roots at t = 0 is arbitrary
    t1 = float(tr.t_grid[1])
    r_eps, _ = _continue(coeffs, t1, tr.roots[1], slope_eps, (tr.roots[2] - tr.roots[1]) / (tr.t_grid[2] - t1))
    slopes = {k: math.log(abs(r_eps[k])) / slope_eps for k in rest}
    growing = sorted((k for k in rest if slopes[k] > 0), key=lambda k: -slopes[k])
    if len(growing) != 2:
        raise ClassificationError(f"expected two tracks growing at 0+, slopes {slopes}")
    l1, l2 = growing
    lm = tr.log_modulus
    mirror = lm(l1)[::-1]
    if np.max(np.abs(lm(l2) - mirror)) > 1e-6:
        # continuation may swap the two growing tracks where they meet at t = pi
        raise ClassificationError("lambda2 is not the mirror of lambda1 under t -> 2 pi - t")

    def partner(k):
        others = [j for j in rest if j not in (l1, l2)]
        return min(others, key=lambda j: np.max(np.abs(lm(j) + lm(k))))

    l3 = partner(l1)
    l4 = [j for j in rest if j not in (l1, l2, l3)][0]
    return {"lambda1": l1, "lambda2": l2, "lambda3": l3, "lambda4": l4, "unit": unit}


def _seed_at(tr, t):
    ts = tr.t_grid
    i = int(np.clip(np.searchsorted(ts, t) - 1, 0, len(ts) - 2))
    w = (t - ts[i]) / (ts[i + 1] - ts[i])
    return list((1 - w) * tr.roots[i] + w * tr.roots[i + 1])


def modulus_rank(tr, column, interval):
    """Position of `column` in the descending order of |lambda| on the open interval.

    Tracks only meet in modulus at the collision angles, so a labelled
    non-unit track keeps one rank between them.
    """
    a, b = interval
    inside = [i for i, t in enumerate(tr.t_grid) if a < t < b and not _touches_collision(t, t)]
    if not inside:
        raise DomainError(f"no grid points inside {interval}")
    logs = np.log(np.abs(tr.roots[inside]))
    ranks = [int(np.sum(row > row[column])) for row in logs]
    values, counts = np.unique(ranks, return_counts=True)
    rank = int(values[np.argmax(counts)])
    if column not in tr.labels["unit"] and len(values) != 1:
        raise ClassificationError(f"track {column} changes modulus rank inside {interval}: {sorted(set(ranks))}")
    return rank


def label_value(tr, label, t, coeffs=B):
    """lambda_label(t), matched against the interpolated grid tracks."""
    col = tr.labels[label]
    ts = tr.t_grid
    hit = np.flatnonzero(ts == t)
    if hit.size:
        return complex(tr.roots[hit[0], col])
    pred = _seed_at(tr, t)
    ordered, _ = match(pred, roots10(float(t), init=pred, coeffs=coeffs))
    return ordered[col]


def adaptive_simpson(f, a, b, tol=1e-6, *, forced=(), forced_width=1e-2, max_depth=40):
    """Adaptive Simpson quadrature with a minimum depth inside the forced zones.

    Intervals within `forced_width` of a point in `forced` are split until
    they are shorter than `forced_width` / 4 regardless of the error estimate.
    """
    cache = {}

    def fx(x):
        if x not in cache:
            cache[x] = f(x)
        return cache[x]

    def near_forced(lo, hi):
        return any(p >= lo - forced_width and p <= hi + forced_width for p in forced)

    def simpson(lo, hi):
        mid = 0.5 * (lo + hi)
        return (hi - lo) / 6 * (fx(lo) + 4 * fx(mid) + fx(hi))

    failures = []

    def rec(lo, hi, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        left, right = simpson(lo, mid), simpson(mid, hi)
        delta = left + right - whole
        force = near_forced(lo, hi) and (hi - lo) > forced_width / 4
        if depth >= max_depth:
            if abs(delta) > 15 * eps:
                failures.append((lo, hi))
            return left + right + delta / 15
        if not force and abs(delta) <= 15 * eps:
            return left + right + delta / 15
        return rec(lo, mid, left, eps / 2, depth + 1) + rec(mid, hi, right, eps / 2, depth + 1)

    total = rec(a, b, simpson(a, b), tol, 0)
    if failures:
        raise QuadratureError(f"tolerance {tol} not reached on {len(failures)} subintervals", total)
    return total


def log_modulus_integral(tr, label, interval=(0.0, math.pi), tol=1e-6, coeffs=B):
    """Integral of log|lambda_label(t)| over `interval`.

    The integrand is the root of B(., e^{it}) holding the label's modulus
    rank, which is continuous through the collisions where matching is not.
    The rank is fixed on each piece between collision angles.
    `label` is a key of ``tr.labels`` or a column index.
    """
    col = label if isinstance(label, int) else tr.labels.get(label)
    if not isinstance(col, int):
        raise DomainError(f"unknown label {label!r}")
    a, b = interval
    cuts = [a] + [p for p in COLLISION_POINTS if a < p < b] + [b]
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        rank = modulus_rank(tr, col, (lo, hi))

        def f(t, rank=rank):
            logs = sorted((math.log(abs(z)) for z in roots10(float(t), init=_seed_at(tr, t), coeffs=coeffs)), reverse=True)
            return logs[rank]

        total += adaptive_simpson(f, lo, hi, tol / (len(cuts) - 1), forced=[p for p in COLLISION_POINTS if lo <= p <= hi])
    return total


#: signs (s1, s2) in I1 = V1 + s1 V3, I2 = V2 + s2 V3 supported by the
#: computed tracks of B; (+1, -1) is the other reading of the relations
VOLUME_SIGNS = (-1, 1)


def extract_volumes(i1, i2, signs=VOLUME_SIGNS):
    """(V1, V2, V3) from I1 = V1 + s1 V3, I2 = V2 + s2 V3 and V3 = V2 / 4.

    With signs (+1, -1) this is V2 = 4 I2 / 3, V3 = I2 / 3, V1 = I1 - I2 / 3.
    """
    s1, s2 = signs
    v2 = i2 / (1 + s2 / 4)
    v3 = v2 / 4
    return i1 - s1 * v3, v2, v3


def entropy_candidates(v1, v2, v3):
    return (2 * (v1 + v3), v1 + v2, 2 * (v2 - v3), v1 + v3, v2 - v3)


def alexander_abs_sum():
    return sum(abs(c) for c in ALEXANDER.values())


def alexander_at(t):
    return sum(c * t ** e for e, c in ALEXANDER.items())


def export_log_modulus_csv(tr, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"log_abs_lambda{k + 1}" for k in range(tr.roots.shape[1])])
        order = [tr.labels[f"lambda{k}"] for k in range(1, 5)] + list(tr.labels["unit"])
        for i, t in enumerate(tr.t_grid):
            w.writerow([repr(float(t))] + [repr(float(math.log(abs(tr.roots[i, c])))) for c in order])


def analyse(grid_size=256, tol=1e-6):
    """Track, integrate and summarise; returns (EigenTrack, report dict)."""
    tr = track(grid_size)
    i1 = log_modulus_integral(tr, "lambda1", tol=tol)
    i2 = log_modulus_integral(tr, "lambda2", tol=tol)
    v1, v2, v3 = extract_volumes(i1, i2)
    report = {
        "grid_size": grid_size,
        "integral_lambda1": i1,
        "integral_lambda2": i2,
        "volumes": {"V1": v1, "V2": v2, "V3": v3},
        "entropy_candidates": list(entropy_candidates(v1, v2, v3)),
        "alexander_abs_sum": alexander_abs_sum(),
        "unit_tracks": len(tr.labels["unit"]),
    }
    return tr, report


def report_json(report):
    return json.dumps(report, indent=2, sort_keys=True)
