"""Order-2 truncated Taylor arithmetic over gmpy2 complex numbers.

A :class:`Jet2` holds (f, f', f'') of some function of B at a fixed point.
Jets are tuples so inner loops can unpack them without attribute lookups.
"""

from fractions import Fraction
from operator import itemgetter

import gmpy2

from .errors import PrecisionError
from .precision import unit

__all__ = ["Jet2", "power_jet", "const", "variable"]

_ZERO = gmpy2.mpc(0)


class Jet2(tuple):
    """(value, first derivative, second derivative) at the expansion point."""

    __slots__ = ()

    def __new__(cls, v, d1=_ZERO, d2=_ZERO):
        return tuple.__new__(cls, (v, d1, d2))

    v = property(itemgetter(0))
    d1 = property(itemgetter(1))
    d2 = property(itemgetter(2))

    def __repr__(self):
        return f"Jet2(v={self[0]}, d1={self[1]}, d2={self[2]})"

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self[0] + other[0], self[1] + other[1], self[2] + other[2])
        return Jet2(self[0] + other, self[1], self[2])

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self[0], -self[1], -self[2])

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self[0] - other[0], self[1] - other[1], self[2] - other[2])
        return Jet2(self[0] - other, self[1], self[2])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        av, a1, a2 = self
        if isinstance(other, Jet2):
            bv, b1, b2 = other
            return Jet2(av * bv, av * b1 + a1 * bv, av * b2 + 2 * a1 * b1 + a2 * bv)
        return Jet2(av * other, a1 * other, a2 * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self[0] / other, self[1] / other, self[2] / other)
        av, a1, a2 = self
        bv, b1, b2 = other
        _check_invertible(other)
        v = av / bv
        d1 = (a1 - v * b1) / bv
        d2 = (a2 - 2 * d1 * b1 - v * b2) / bv
        return Jet2(v, d1, d2)

    def __rtruediv__(self, other):
        return Jet2(other) / self

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("Jet2 supports nonnegative integer powers only; use power_jet for B^alpha")
        result = Jet2(gmpy2.mpc(1))
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def magnitude(self):
        """max(|f|, |f'|, |f''|)."""
        return max(abs(self[0]), abs(self[1]), abs(self[2]))


def _check_invertible(jet):
    bv = jet[0]
    prec = gmpy2.get_context().precision
    scale = abs(bv) + abs(jet[1]) + abs(jet[2])
    if bv == 0 or abs(bv) <= scale * gmpy2.mpfr(2) ** (8 - prec):
        raise PrecisionError(
            f"jet division by a numerically vanishing value |v|={float(abs(bv)):.3e} "
            f"(scale {float(scale):.3e}, {prec} bits)"
        )


def const(c):
    """Jet of a constant function."""
    return Jet2(gmpy2.mpc(c))


def variable(B0):
    """Jet of the identity function B at B0."""
    return Jet2(gmpy2.mpc(B0), gmpy2.mpc(1), _ZERO)


def power_jet(alpha, turns):
    """Jet of B^alpha at B0 = exp(2 pi i * turns), alpha rational.

    The value is exp(2 pi i * alpha * turns), with the angle formed exactly
    before any trigonometry.
    """
    alpha = Fraction(alpha)
    turns = Fraction(turns)
    v = unit(alpha * turns)
    if alpha == 0:
        return Jet2(v)
    inv = unit(-turns)
    a = gmpy2.mpq(alpha.numerator, alpha.denominator)
    d1 = a * v * inv
    d2 = (a - 1) * d1 * inv
    return Jet2(v, d1, d2)
