"""Exact colored Jones polynomials of the twisted torus knot k4_3 (m082).

The triple sum

    J(n+1) = 1/[n+1] sum_{k even} sum_{l} sum_z (-1)^(k/2+z)
             q^e(n,k,l) [k+1][l+1] / [(2n+k)/2+1]!
             * three Gaussian binomials * [k/2]!^2 * two factorial ratios

is summed with every (k, l) term brought over the single denominator
[2n+1]! [n+1], which is divided out exactly at the end.
"""

import json
import logging
import time
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, InexactDivisionError
from .qlaurent import ONE, ZERO, LaurentPoly, exact_div, qbinom, qfact, qfact_ratio, qint

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TripleSumIndex:
    """One (n, k, l, z) index of the triple sum (it computes J(n+1))."""

    n: int
    k: int
    l: int
    z: int

    @property
    def a1(self):
        return (2 * self.n + self.k) // 2

    @property
    def a2(self):
        return (self.n + self.k + self.l) // 2

    def in_window(self):
        lo, hi = z_window(self.n, self.k, self.l)
        return lo <= self.z <= hi


def summand_exponent(n, k, l):
    """Power of q in the prefactor, (-3(2k+k^2) + 7(2l+l^2) - 51(2n+n^2)) / 8."""
    return Fraction(-3 * (2 * k + k * k) + 7 * (2 * l + l * l) - 51 * (2 * n + n * n), 8)


def kl_range(n):
    """The (k, l) pairs of the outer double sum, in ascending order."""
    for k in range(0, 2 * n + 1, 2):
        for l in range(abs(n - k), n + k + 1, 2):
            yield k, l


def z_window(n, k, l):
    """Inclusive z-range outside of which the summand vanishes."""
    lo = max((2 * n + k) // 2, (n + k + l) // 2)
    hi = min((n + 2 * k + l) // 2, (3 * n + l) // 2, n + k)
    return lo, hi


def z_summand(n, k, l, z):
    """Everything in the summand that depends on z, sign included.

    Outside the window one of the binomials is zero and the factorial ratios
    are never formed.
    """
    a2 = (n + k + l) // 2
    prod = (
        qbinom((k + l - n) // 2, (n + 2 * k + l) // 2 - z)
        * qbinom((n + l - k) // 2, (3 * n + l) // 2 - z)
        * qbinom((n + k - l) // 2, n + k - z)
    )
    if not prod:
        return ZERO
    prod = prod * qfact_ratio((2 * n - k) // 2, z - a2) * qfact_ratio(z + 1, a2 + 1)
    return -prod if (k // 2 + z) % 2 else prod


def z_sum(n, k, l):
    lo, hi = z_window(n, k, l)
    total = ZERO
    for z in range(lo, hi + 1):
        total = total + z_summand(n, k, l, z)
    return total


def kl_term(n, k, l):
    """(k, l) contribution multiplied by [2n+1]! [n+1]; lies in Z[x, 1/x]."""
    e8 = summand_exponent(n, k, l) * 8
    assert e8.denominator == 1
    kh = k // 2
    poly = (
        z_sum(n, k, l)
        * qint(k + 1)
        * qint(l + 1)
        * qfact(kh) ** 2
        * qfact_ratio(2 * n + 1, (2 * n + k) // 2 + 1)
    )
    return poly.shift(int(e8))


def triple_sum(n):
    """J(n+1) straight from the triple sum, with no special cases."""
    total = ZERO
    for k, l in kl_range(n):
        total = total + kl_term(n, k, l)
    try:
        return exact_div(total, qfact(2 * n + 1) * qint(n + 1))
    except InexactDivisionError as exc:
        raise InexactDivisionError(f"triple sum for J({n + 1}) is not a Laurent polynomial") from exc


def colored_jones(N):
    """J_{K0}(N) as an element of Z[q, 1/q] (exponents of x divisible by 8)."""
    if N < 1:
        raise DomainError("colored_jones needs N >= 1")
    if N == 1:
        return ONE
    return triple_sum(N - 1)


def q_powers(p):
    """{power of q: coefficient} for a polynomial in Z[q, 1/q]."""
    out = {}
    for e, c in p.terms():
        if e % 8:
            raise DomainError(f"x^{e} is not an integer power of q")
        out[e // 8] = c
    return out


def export_table(n_max, path, *, progress=None):
    """Write J(1..n_max), one JSON object per line: {"n": N, "jones": {...}}.

    `progress` is called as ``progress(N, seconds)`` after each polynomial.
    """
    if n_max < 1:
        raise DomainError("export_table needs n_max >= 1")
    with open(path, "w", encoding="utf-8") as fh:
        for N in range(1, n_max + 1):
            t0 = time.perf_counter()
            poly = colored_jones(N)
            elapsed = time.perf_counter() - t0
            fh.write(json.dumps({"n": N, "jones": poly.to_json_obj()}, separators=(",", ":")))
            fh.write("\n")
            log.debug("J(%d): %d terms in %.2fs", N, len(poly), elapsed)
            if progress is not None:
                progress(N, elapsed)


def read_table(path):
    """Inverse of export_table: {N: LaurentPoly}."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                out[int(obj["n"])] = LaurentPoly.from_json_obj(obj["jones"])
    return out
