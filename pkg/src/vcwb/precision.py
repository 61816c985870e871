"""Working-precision helpers on top of gmpy2 (MPFR/MPC)."""

import math
from contextlib import contextmanager
from fractions import Fraction

import gmpy2

LOG2_10 = math.log2(10)


def digits_to_bits(digits):
    """Number of mantissa bits carrying `digits` significant decimal digits."""
    return math.ceil(digits * LOG2_10)


def default_digits(n):
    """Precision policy for evaluating J(n) at exp(2 pi i / n).

    80 digits up to n = 260 and 200 digits up to n = 560.  Beyond that the
    cancellation grows roughly linearly in n, so the budget does too.
    """
    if n <= 260:
        return 80
    if n <= 560:
        return 200
    return max(200, math.ceil(0.4 * n))


@contextmanager
def working_precision(digits):
    """Context manager setting the gmpy2 precision to `digits` decimal digits."""
    ctx = gmpy2.context(gmpy2.get_context(), precision=digits_to_bits(digits))
    with ctx:
        yield ctx


_QUARTER_TURNS = {
    Fraction(0): (1, 0),
    Fraction(1, 4): (0, 1),
    Fraction(1, 2): (-1, 0),
    Fraction(3, 4): (0, -1),
}


def unit(turns):
    """exp(2 pi i * turns) in the current precision, `turns` rational.

    The angle is reduced modulo one exactly before any trigonometry is done;
    multiples of a quarter turn come out exact.
    """
    t = Fraction(turns) % 1
    if t in _QUARTER_TURNS:
        re, im = _QUARTER_TURNS[t]
        return gmpy2.mpc(re, im)
    angle = 2 * gmpy2.const_pi() * t.numerator / t.denominator
    s, c = gmpy2.sin_cos(angle)
    return gmpy2.mpc(c, s)


def rel_err(a, b):
    """|a - b| / max(|b|, tiny) as an mpfr."""
    scale = abs(b)
    if scale == 0:
        return abs(a)
    return abs(a - b) / scale
