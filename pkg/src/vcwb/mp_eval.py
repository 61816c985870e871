"""Multiprecision evaluation of J_{K0}(N) at q0 = exp(2 pi i / N).

Work in B = q^(1/2) around B0 = exp(i pi / N).  With n = N - 1 every (k, l)
term of the triple sum carries the denominator

    [(2n+k)/2+1, k/2]! [n+1] = [(2n+k)/2+1, n+1]! [n, k/2]! [n+1]^2,

and only [n+1]^2 vanishes at B0.  Writing [n+1] = T S (B - B0) leaves an
analytic term h_{k,l} = numerator / ([..]! [..]! T^2 S^2).  Their sum f has a
double zero at B0 and J(N)(q0) = f''(B0) / 2.

Quantum integers, factorials, binomials and factorial ratios are tabulated
once as 2-jets; each z-term then costs four jet products.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from .errors import DomainError, PrecisionError
from .jets import Jet2, power_jet
from .jones_exact import kl_range, summand_exponent, z_window
from .precision import default_digits, unit, working_precision

log = logging.getLogger(__name__)

#: |f(B0)| and |f'(B0)| must stay below this fraction of the largest term
RESIDUAL_TOL = gmpy2.mpfr("1e-10")


def qint_jet(m, turns):
    """Jet of [m] = (B^m - B^-m) / (B - 1/B) at B0 = exp(2 pi i turns), closed form."""
    if m == 0:
        return Jet2(gmpy2.mpc(0))
    bm = unit(m * turns)
    bmi = unit(-m * turns)
    b1 = unit(turns)
    bi = unit(-turns)
    bi2 = bi * bi
    u = 1 / (b1 - bi)
    num = bm - bmi
    # B^(m-1) + B^(-m-1), and the second-derivative numerators
    s1 = (bm + bmi) * bi
    v = num * u
    d1 = m * s1 * u - num * u * u * (1 + bi2)
    d2 = (
        m * ((m - 1) * bm - (m + 1) * bmi) * bi2 * u
        - 2 * m * s1 * u * u * (1 + bi2)
        + 2 * num * u * u * u * (1 + 3 * bi2)
    )
    return Jet2(v, d1, d2)


@dataclass
class QJetTables:
    """Jet tables of the quantum quantities for one (n, digits) pair.

    ``integers[m]`` is [m], ``factorials[m]`` is [m]!, ``binomials[m][r]`` is
    [m choose r] and ``ratio_factorials[m][r]`` is [m, r]! = [m]!/[r]!.
    """

    n: int
    digits: int
    B0: object
    integers: list = field(repr=False)
    factorials: list = field(repr=False)
    binomials: list = field(repr=False)
    ratio_factorials: list = field(repr=False)

    @property
    def N(self):
        return self.n + 1

    @property
    def turns(self):
        """B0 = exp(2 pi i * turns)."""
        return Fraction(1, 2 * (self.n + 1))


def build_tables(n, digits):
    """Fill the jet tables by the quantum recursions.

    Sizes follow what the triple sum touches: integers and factorial ratios
    up to 3n+2, binomials up to 2n.  Arithmetic on the entries must happen
    under the same precision, see ``working_precision``.
    """
    if n < 0:
        raise DomainError("build_tables needs n >= 0")
    if digits < 32:
        raise DomainError("build_tables needs digits >= 32")
    with working_precision(digits):
        return _build_tables(n, digits)


def _build_tables(n, digits):
    turns = Fraction(1, 2 * (n + 1))
    top = 3 * n + 2
    one = Jet2(gmpy2.mpc(1))

    integers = [qint_jet(m, turns) for m in range(top + 1)]

    factorials = [one, one]
    for m in range(2, top + 1):
        factorials.append(integers[m] * factorials[m - 1])

    # monomial jets B^j for the q-Pascal recursion
    btop = 2 * n
    powers = {j: power_jet(j, turns) for j in range(-btop, btop + 1)}
    binomials = [[one]]
    for m in range(1, btop + 1):
        prev = binomials[m - 1]
        row = [one]
        for r in range(1, m):
            # [m,r] = B^-r [m-1,r] + B^(m-r) [m-1,r-1]
            row.append(powers[-r] * prev[r] + powers[m - r] * prev[r - 1])
        row.append(one)
        binomials.append(row)

    ratio = []
    for m in range(top + 1):
        row = [None] * (m + 1)
        row[m] = one
        prev = ratio[m - 1] if m else None
        im = integers[m]
        for r in range(m):
            row[r] = im * prev[r]
        ratio.append(row)

    return QJetTables(n, digits, unit(turns), integers, factorials, binomials, ratio)


def st_split(n, digits=None):
    """Jets of S and T at B0, where [n+1] = T S (B - B0).

    T = B^(-n-1) / (B - 1/B) and S = B^(2n+1) + B^(2n) B0 + ... + B0^(2n+1).
    Uses the current precision unless `digits` is given.
    """
    if digits is not None:
        with working_precision(digits):
            return st_split(n)
    turns = Fraction(1, 2 * (n + 1))
    bi = unit(-turns)
    bi2 = bi * bi
    S = Jet2(
        2 * (n + 1) * bi,
        (n + 1) * (2 * n + 1) * bi2,
        gmpy2.mpq(4, 3) * n * (n + 1) * (2 * n + 1) * bi2 * bi,
    )
    b = unit(turns)
    u = 1 / (b - bi)
    p = unit(-(n + 1) * turns)  # B^(-n-1)
    T = Jet2(
        p * u,
        -(n + 1) * p * bi * u - p * u * u * (1 + bi2),
        (n + 1) * (n + 2) * p * bi2 * u
        + 2 * (n + 1) * p * bi * u * u * (1 + bi2)
        + 2 * p * u * u * u * (1 + 3 * bi2),
    )
    return S, T


@dataclass
class RootEvaluation:
    """Value of J(N) at exp(2 pi i/N) plus the double-zero diagnostics."""

    N: int
    digits: int
    value: object
    f: Jet2 = field(repr=False)
    max_term: tuple = field(repr=False)  # max |h.v|, |h.d1|, |h.d2| over (k, l)

    @property
    def residuals(self):
        """(|f(B0)|, |f'(B0)|) relative to the largest jet component of any term.

        Individual h.v can vanish identically (a factor [N] upstairs), so a
        per-order scale would compare noise with noise.
        """
        scale = max(self.max_term)
        fv, f1 = abs(self.f[0]), abs(self.f[1])
        if not scale:
            return fv, f1
        return fv / scale, f1 / scale


def _kl_z_sum(tab, n, k, l):
    """2-jet of the inner z-sum Z(k, l) (sign included)."""
    C = tab.binomials
    R = tab.ratio_factorials
    row1 = C[(k + l - n) // 2]
    row2 = C[(n + l - k) // 2]
    row3 = C[(n + k - l) // 2]
    rf1 = R[(2 * n - k) // 2]
    a2 = (n + k + l) // 2
    lo, hi = z_window(n, k, l)
    j1 = (n + 2 * k + l) // 2
    j2 = (3 * n + l) // 2
    j3 = n + k
    zv = z1 = z2 = gmpy2.mpc(0)
    odd = (k // 2 + lo) % 2
    for z in range(lo, hi + 1):
        av, a1, a2_ = row1[j1 - z]
        bv, b1, b2 = row2[j2 - z]
        # p = a * b
        pv = av * bv
        p1 = av * b1 + a1 * bv
        p2 = av * b2 + 2 * a1 * b1 + a2_ * bv
        av, a1, a2_ = row3[j3 - z]
        pv, p1, p2 = pv * av, pv * a1 + p1 * av, pv * a2_ + 2 * p1 * a1 + p2 * av
        av, a1, a2_ = rf1[z - a2]
        pv, p1, p2 = pv * av, pv * a1 + p1 * av, pv * a2_ + 2 * p1 * a1 + p2 * av
        av, a1, a2_ = R[z + 1][a2 + 1]
        pv, p1, p2 = pv * av, pv * a1 + p1 * av, pv * a2_ + 2 * p1 * a1 + p2 * av
        if odd:
            zv -= pv
            z1 -= p1
            z2 -= p2
        else:
            zv += pv
            z1 += p1
            z2 += p2
        odd = not odd
    return Jet2(zv, z1, z2)


def _kl_terms(tab, n):
    """Yield ((k, l), h_{k,l}) in ascending (k, l) order."""
    turns = tab.turns
    S, T = st_split(n)
    ts2 = (T * S) ** 2
    I = tab.integers
    F = tab.factorials
    R = tab.ratio_factorials
    for k, l in kl_range(n):
        alpha = 2 * summand_exponent(n, k, l)
        mono = power_jet(alpha, turns)
        kh = k // 2
        num = mono * I[k + 1] * I[l + 1] * F[kh] * _kl_z_sum(tab, n, k, l)
        den = R[(2 * n + k) // 2 + 1][n + 1] * R[n][kh] * ts2
        yield (k, l), num / den


def evaluate_at_root(N, digits=None, *, check=True, order=None):
    """Full evaluation record for J(N) at exp(2 pi i / N).

    `order` optionally permutes the (k, l) accumulation (a callable mapping
    the list of terms to a reordered list), for rounding-sensitivity studies.
    """
    if N < 2:
        raise DomainError("evaluate_at_root needs N >= 2")
    if digits is None:
        digits = default_digits(N)
    n = N - 1
    with working_precision(digits):
        tab = build_tables(n, digits)
        terms = list(_kl_terms(tab, n))
        if order is not None:
            terms = order(terms)
        fv = f1 = f2 = gmpy2.mpc(0)
        mv = m1 = m2 = gmpy2.mpfr(0)
        for _, (hv, h1, h2) in terms:
            fv += hv
            f1 += h1
            f2 += h2
            mv = max(mv, abs(hv))
            m1 = max(m1, abs(h1))
            m2 = max(m2, abs(h2))
        f = Jet2(fv, f1, f2)
        result = RootEvaluation(N, digits, f2 / 2, f, (mv, m1, m2))
    if check:
        rv, r1 = result.residuals
        if rv > RESIDUAL_TOL or r1 > RESIDUAL_TOL:
            raise PrecisionError(
                f"J({N}) at {digits} digits: double-zero residuals "
                f"{float(rv):.2e}, {float(r1):.2e} exceed {float(RESIDUAL_TOL):.0e}"
            )
    return result


def eval_jones_at_root(N, digits=None):
    """J_{K0}(N) evaluated at q = exp(2 pi i / N), as a gmpy2 mpc."""
    return evaluate_at_root(N, digits).value
