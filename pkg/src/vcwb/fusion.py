"""Kauffman bracket fusion calculus and the fused state sum for k4_3.

This is the second, independent route to J_{K0}(N).  It never uses the
collapsed triple sum: trihedra, tetrahedra and twist monomials are evaluated
generically, the fused (k, l) terms are put over a common denominator built
from the multiplicities of quantum integers, and only then is the bracket
divided out.

Conventions follow Masbaum-Vogel with colour n ~ the (n+1)-dimensional
module, A = q^(1/4) = x^2 and the loop value <k> = (-1)^k [k+1].
"""

from dataclasses import dataclass
from typing import NamedTuple

from .errors import AdmissibilityError, DomainError, InexactDivisionError
from .qlaurent import ONE, ZERO, LaurentPoly, exact_div, monomial, qbinom, qfact, qfact_ratio, qint


@dataclass(frozen=True)
class AdmissibleTriple:
    a: int
    b: int
    c: int

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if min(a, b, c) < 0 or (a + b + c) % 2 or not abs(b - c) <= a <= b + c:
            raise AdmissibilityError(f"({a}, {b}, {c}) is not admissible")

    @property
    def internal(self):
        """Internal colours (i, j, k) = ((b+c-a)/2, (a+c-b)/2, (a+b-c)/2)."""
        a, b, c = self.a, self.b, self.c
        return (b + c - a) // 2, (a + c - b) // 2, (a + b - c) // 2


def loop_value(k):
    """<k> = (-1)^k [k+1], the bracket of a k-coloured unknot."""
    return qint(k + 1).scale(-1 if k % 2 else 1)


def _trihedron_parts(a, b, c):
    """Sign and factorial arguments of <a,b,c>' = (-1)^(i+j+k) [i+j+k+1]! [i]! [j]! [k]!."""
    i, j, k = AdmissibleTriple(a, b, c).internal
    return (-1 if (i + j + k) % 2 else 1), (i + j + k + 1, i, j, k)


def trihedron_renormalized(a, b, c):
    """<a,b,c>' = (-1)^(i+j+k) [i+j+k+1]! [i]! [j]! [k]!."""
    sign, args = _trihedron_parts(a, b, c)
    val = ONE
    for m in args:
        val = val * qfact(m)
    return val.scale(sign)


def trihedron(a, b, c):
    """Theta-graph value <a,b,c> = <a,b,c>' / ([a]! [b]! [c]!).

    The quotient is a rational function in general; InexactDivisionError is
    raised when it is not a Laurent polynomial.
    """
    return exact_div(trihedron_renormalized(a, b, c), qfact(a) * qfact(b) * qfact(c))


@dataclass(frozen=True)
class TetLabels:
    """Edge colours of a tetrahedral network with faces (A,B,E), (B,D,F), (E,D,C), (A,C,F)."""

    A: int
    B: int
    E: int
    D: int
    C: int
    F: int

    def __post_init__(self):
        for tri in self.faces:
            AdmissibleTriple(*tri)

    @property
    def faces(self):
        A, B, E, D, C, F = self.A, self.B, self.E, self.D, self.C, self.F
        return (A, B, E), (B, D, F), (E, D, C), (A, C, F)

    @property
    def total(self):
        return self.A + self.B + self.C + self.D + self.E + self.F

    @property
    def a(self):
        """Face half-sums a1..a4."""
        return tuple(sum(f) // 2 for f in self.faces)

    @property
    def b(self):
        """Quadrilateral half-sums b1..b3."""
        s = self.total
        A, B, E, D, C, F = self.A, self.B, self.E, self.D, self.C, self.F
        return (s - A - D) // 2, (s - E - F) // 2, (s - B - C) // 2

    @property
    def edges(self):
        return self.A, self.B, self.C, self.D, self.E, self.F


class Tetrahedron(NamedTuple):
    """Tetrahedron value split as numerator / prod of [colour]! over the six edges."""

    numerator: LaurentPoly
    denominator_colors: tuple

    def value(self):
        den = ONE
        for c in self.denominator_colors:
            den = den * qfact(c)
        return exact_div(self.numerator, den)


def zeta_sum_renormalized(labels):
    """prod_{i,j} [b_i - a_j]!  times the alternating zeta-sum.

    Each zeta term is a polynomial: pair [b_j - a_j]! with [b_j - zeta]! and
    [zeta - a_j]! into a Gaussian binomial for j = 1, 2, 3, and [zeta+1]! with
    [zeta - a_4]! into a factorial ratio.
    """
    a, b = labels.a, labels.b
    rest = ONE
    for i in range(3):
        for j in range(4):
            if i != j:
                rest = rest * qfact(b[i] - a[j])
    total = ZERO
    for zeta in range(max(a), min(b) + 1):
        term = qfact_ratio(zeta + 1, zeta - a[3])
        for j in range(3):
            term = term * qbinom(b[j] - a[j], zeta - a[j])
        total = total + (-term if zeta % 2 else term)
    return total * rest


def tetrahedron(A, B, E, D, C, F):
    """Tetrahedron coefficient with labels (A B E / D C F)."""
    labels = TetLabels(A, B, E, D, C, F)
    return Tetrahedron(zeta_sum_renormalized(labels), labels.edges)


def tetrahedron_renormalized(A, B, E, D, C, F):
    """Tetrahedron with the edge-factorial denominator dropped."""
    return zeta_sum_renormalized(TetLabels(A, B, E, D, C, F))


def mu_exponent(k):
    """(sign, power of A) of the framing change mu(k) = (-1)^k A^(k^2+2k)."""
    return (-1 if k % 2 else 1), k * k + 2 * k


def delta_exponent(c, a, b):
    """(sign, power of A) of the half twist delta(c; a, b) = (-1)^k A^(ij - k(i+j+k+2)).

    (i, j, k) are the internal colours of the triple (a, b, c), so k = (a+b-c)/2
    sits opposite the fused edge c.
    """
    i, j, k = AdmissibleTriple(a, b, c).internal
    return (-1 if k % 2 else 1), i * j - k * (i + j + k + 2)


def _a_monomial(sign, power):
    # A = x^2
    return monomial(2 * power, sign)


def mu(k):
    return _a_monomial(*mu_exponent(k))


def delta(c, a, b):
    return _a_monomial(*delta_exponent(c, a, b))


def twist_coeffs(k, triple=None):
    """mu(k) and, when a triple (c, a, b) is given, delta(c; a, b)."""
    if triple is None:
        return mu(k), None
    return mu(k), delta(*triple)


def _factorial_multiplicities(args):
    """Multiplicity of [m] in prod_{a in args} [a]!, as {m: count}."""
    mult = {}
    for a in args:
        for m in range(2, a + 1):
            mult[m] = mult.get(m, 0) + 1
    return mult


def _fused_terms(n):
    """(numerator polynomial, denominator factorial arguments) for each (k, l)."""
    out = []
    for k in range(0, 2 * n + 1, 2):
        s4, p4 = delta_exponent(k, n, n)
        for l in range(abs(n - k), n + k + 1, 2):
            s7, p7 = delta_exponent(l, k, n)
            sign = (s4 ** 4) * (s7 ** 7)
            mono = _a_monomial(sign, 4 * p4 + 7 * p7)
            sg1, args1 = _trihedron_parts(n, n, k)
            sg2, args2 = _trihedron_parts(l, k, n)
            num = loop_value(k) * loop_value(l) * tetrahedron_renormalized(n, n, k, n, l, k) * mono
            # the trihedron signs are +-1, so they move upstairs unchanged
            out.append((num.scale(sg1 * sg2), args1 + args2))
    return out


def bracket(n):
    """Kauffman bracket <K0, n> in the zero framing, bracket-normalised."""
    terms = _fused_terms(n)
    mults = [_factorial_multiplicities(args) for _, args in terms]
    common = {}
    for mult in mults:
        for m, c in mult.items():
            common[m] = max(common.get(m, 0), c)
    total = ZERO
    for (num, _), mult in zip(terms, mults):
        lift = num
        for m, c in common.items():
            extra = c - mult.get(m, 0)
            if extra:
                lift = lift * qint(m) ** extra
        total = total + lift
    den = ONE
    for m, c in common.items():
        den = den * qint(m) ** c
    s, p = mu_exponent(n)
    # mu(n)^-18
    return exact_div(total, den) * _a_monomial(s ** 18, -18 * p)


def bracket_fusion(N):
    """J_{K0}(N) = (-1)^n <K0, n> / [n+1] with n = N - 1, via fusion."""
    if N < 1:
        raise DomainError("bracket_fusion needs N >= 1")
    n = N - 1
    br = bracket(n)
    try:
        return exact_div(br.scale(-1 if n % 2 else 1), qint(n + 1))
    except InexactDivisionError as exc:
        raise InexactDivisionError(f"fused bracket for J({N}) is not divisible by [{N}]") from exc
