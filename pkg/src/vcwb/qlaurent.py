"""Exact Laurent polynomials in x = q^(1/8) and the quantum combinatorics.

Every object lives in Z[x, 1/x].  Useful landmarks: q = x^8, the variable
B = q^(1/2) = x^4 of the numerical evaluator, and the Kauffman variable
A = q^(1/4) = x^2.

Polynomials are immutable.  Internally a polynomial is a dense run of
coefficients on an arithmetic progression of exponents ``low + step*i``; the
quantum quantities only occupy every fourth (or eighth) power of x, so this
keeps products cheap.  Products of long polynomials go through Kronecker
substitution on Python integers.
"""

import json
import math
from fractions import Fraction
from functools import lru_cache

import gmpy2

from .errors import DomainError, InexactDivisionError
from .precision import unit, working_precision

__all__ = [
    "LaurentPoly",
    "ZERO",
    "ONE",
    "monomial",
    "qint",
    "qfact",
    "qfact_ratio",
    "qbinom",
    "exact_div",
    "eval_on_unit_circle",
]

# below this many coefficient products schoolbook multiplication is faster
_SCHOOLBOOK_LIMIT = 400


def _mul_schoolbook(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _pack(coeffs, width):
    pos = b"".join((c if c > 0 else 0).to_bytes(width, "little") for c in coeffs)
    neg = b"".join((-c if c < 0 else 0).to_bytes(width, "little") for c in coeffs)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(value, width, length):
    """Recover `length` balanced base-2^(8*width) digits of `value`."""
    raw = value.to_bytes(width * (length + 1), "little", signed=True)
    half = 1 << (8 * width - 1)
    full = 1 << (8 * width)
    out = []
    carry = 0
    for i in range(0, width * length, width):
        d = int.from_bytes(raw[i:i + width], "little") + carry
        if d >= half:
            d -= full
            carry = 1
        else:
            carry = 0
        out.append(d)
    return out


def _width_for(bound):
    # one spare bit for the sign of balanced digits
    return (bound.bit_length() + 8) // 8


def _mul_dense(a, b):
    if len(a) * len(b) <= _SCHOOLBOOK_LIMIT:
        return _mul_schoolbook(a, b)
    ma = max(abs(c) for c in a)
    mb = max(abs(c) for c in b)
    width = _width_for(ma * mb * min(len(a), len(b)))
    prod = _pack(a, width) * _pack(b, width)
    return _unpack(prod, width, len(a) + len(b) - 1)


def _divide_long(p, d):
    """Dense exact division p / d (lists, constant term first).

    Returns the quotient or None when a remainder is left.
    """
    n, m = len(p), len(d)
    if n < m:
        return None
    rem = list(p)
    lead = d[-1]
    q = [0] * (n - m + 1)
    for i in range(n - m, -1, -1):
        c = rem[i + m - 1]
        if c:
            qi, r = divmod(c, lead)
            if r:
                return None
            q[i] = qi
            for j in range(m):
                rem[i + j] -= qi * d[j]
    if any(rem[:m - 1]):
        return None
    return q


def _divide_kronecker(p, d):
    """Exact quotient via integer division; None when it cannot be certified."""
    qlen = len(p) - len(d) + 1
    mp = max(abs(c) for c in p)
    md = max(abs(c) for c in d)
    bound = max(mp, md) << (qlen.bit_length() + 16)
    for _ in range(3):
        width = _width_for(bound)
        num, den = _pack(p, width), _pack(d, width)
        quot, rem = divmod(num, den)
        if rem:
            return None
        q = _unpack(quot, width, qlen)
        if _mul_dense(q, d) == list(p):
            return q
        bound <<= 64
    return None


class LaurentPoly:
    """Integer Laurent polynomial in x = q^(1/8).

    Construct from a mapping ``{exponent: coefficient}`` or an iterable of
    ``(exponent, coefficient)`` pairs; zero coefficients are dropped.
    """

    __slots__ = ("_low", "_step", "_c", "_hash")

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        items = terms.items() if hasattr(terms, "items") else terms
        acc = {}
        for e, c in items:
            e, c = int(e), int(c)
            acc[e] = acc.get(e, 0) + c
        acc = {e: c for e, c in acc.items() if c}
        if not acc:
            self._set(0, 0, ())
            return
        exps = sorted(acc)
        low = exps[0]
        step = 0
        for e in exps[1:]:
            step = math.gcd(step, e - low)
        if step == 0:
            self._set(low, 0, (acc[low],))
            return
        dense = [0] * ((exps[-1] - low) // step + 1)
        for e in exps:
            dense[(e - low) // step] = acc[e]
        self._set(low, step, tuple(dense))

    def _set(self, low, step, coeffs):
        self._low = low
        self._step = step
        self._c = coeffs
        self._hash = None

    @classmethod
    def _from_dense(cls, low, step, coeffs):
        """Build from a dense run, trimming zeros and coarsening the step."""
        start = 0
        stop = len(coeffs)
        while start < stop and not coeffs[start]:
            start += 1
        while stop > start and not coeffs[stop - 1]:
            stop -= 1
        obj = cls.__new__(cls)
        if start == stop:
            obj._set(0, 0, ())
            return obj
        coeffs = coeffs[start:stop]
        low += start * step
        if len(coeffs) == 1:
            obj._set(low, 0, (coeffs[0],))
            return obj
        g = 0
        for i, c in enumerate(coeffs):
            if c:
                g = math.gcd(g, i)
                if g == 1:
                    break
        if g > 1:
            coeffs = coeffs[::g]
            step *= g
        obj._set(low, step, tuple(coeffs))
        return obj

    # -- inspection --------------------------------------------------------

    def terms(self):
        """Sorted list of (exponent, coefficient) pairs with nonzero coefficient."""
        low, step = self._low, self._step
        return [(low + i * step, c) for i, c in enumerate(self._c) if c]

    def to_dict(self):
        return dict(self.terms())

    def __getitem__(self, e):
        if not self._c:
            return 0
        if self._step == 0:
            return self._c[0] if e == self._low else 0
        i, r = divmod(e - self._low, self._step)
        if r or i < 0 or i >= len(self._c):
            return 0
        return self._c[i]

    def is_zero(self):
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def __len__(self):
        """Number of nonzero terms."""
        return sum(1 for c in self._c if c)

    @property
    def min_exponent(self):
        if not self._c:
            raise DomainError("zero polynomial has no exponents")
        return self._low

    @property
    def max_exponent(self):
        if not self._c:
            raise DomainError("zero polynomial has no exponents")
        return self._low + self._step * (len(self._c) - 1)

    def support_divisible_by(self, m):
        """True when every exponent with nonzero coefficient is a multiple of m."""
        return all(e % m == 0 for e, _ in self.terms())

    def is_palindromic(self):
        """Coefficient of x^e equals coefficient of x^-e for every e."""
        if not self._c:
            return True
        return self._low == -self.max_exponent and self._c == self._c[::-1]

    def at_one(self):
        """Value at x = 1, the sum of the coefficients."""
        return sum(self._c)

    def max_abs_coeff(self):
        return max((abs(c) for c in self._c), default=0)

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, int):
            return LaurentPoly({0: other}) if other else ZERO
        return NotImplemented

    def _spread(self, low, step, length):
        """Dense coefficients of self on the progression low + step*i."""
        out = [0] * length
        if self._step == 0:
            out[(self._low - low) // step] = self._c[0]
            return out
        off = (self._low - low) // step
        r = self._step // step
        out[off:off + r * (len(self._c) - 1) + 1:r] = self._c
        return out

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._c:
            return self
        if not self._c:
            return other
        g = math.gcd(self._step, other._step, other._low - self._low)
        if g == 0:
            return LaurentPoly._from_dense(self._low, 0, (self._c[0] + other._c[0],))
        low = min(self._low, other._low)
        high = max(self.max_exponent, other.max_exponent)
        length = (high - low) // g + 1
        a = self._spread(low, g, length)
        b = other._spread(low, g, length)
        return LaurentPoly._from_dense(low, g, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        obj = LaurentPoly.__new__(LaurentPoly)
        obj._set(self._low, self._step, tuple(-c for c in self._c))
        return obj

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k):
        """Multiply every coefficient by the integer k."""
        if not k:
            return ZERO
        obj = LaurentPoly.__new__(LaurentPoly)
        obj._set(self._low, self._step, tuple(k * c for c in self._c))
        return obj

    def shift(self, e):
        """Multiply by x^e."""
        if not self._c or not e:
            return self
        obj = LaurentPoly.__new__(LaurentPoly)
        obj._set(self._low + e, self._step, self._c)
        return obj

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if not self._c or not other._c:
            return ZERO
        if other._step == 0:
            return self.scale(other._c[0]).shift(other._low)
        if self._step == 0:
            return other.scale(self._c[0]).shift(self._low)
        g = math.gcd(self._step, other._step)
        la = (len(self._c) - 1) * (self._step // g) + 1
        lb = (len(other._c) - 1) * (other._step // g) + 1
        a = self._c if self._step == g else self._spread(self._low, g, la)
        b = other._c if other._step == g else other._spread(other._low, g, lb)
        return LaurentPoly._from_dense(self._low + other._low, g, _mul_dense(a, b))

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise DomainError("only nonnegative integer powers are defined")
        if self._step == 0 and self._c:
            return LaurentPoly({self._low * k: self._c[0] ** k})
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly({0: other})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return (self._low, self._step, self._c) == (other._low, other._step, other._c)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._low, self._step, self._c))
        return self._hash

    def substitute_inverse(self):
        """The image under x -> 1/x."""
        return LaurentPoly((-e, c) for e, c in self.terms())

    def __repr__(self):
        if not self._c:
            return "LaurentPoly(0)"
        shown = self.terms()
        body = " + ".join(f"{c}*x^{e}" for e, c in shown[:6])
        more = f" + ... ({len(shown)} terms)" if len(shown) > 6 else ""
        return f"LaurentPoly({body}{more})"

    # -- serialization -----------------------------------------------------

    def to_json_obj(self):
        return {"var": "q^(1/8)", "terms": [[e, str(c)] for e, c in self.terms()]}

    def to_json(self):
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj):
        if obj.get("var") != "q^(1/8)":
            raise DomainError(f"unsupported variable {obj.get('var')!r}")
        return cls((int(e), int(c)) for e, c in obj["terms"])

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))

    @classmethod
    def from_q_powers(cls, terms):
        """Build from {power of q: coefficient}; q-powers may be Fractions with denominator 8."""
        items = terms.items() if hasattr(terms, "items") else terms
        out = []
        for e, c in items:
            e8 = Fraction(e) * 8
            if e8.denominator != 1:
                raise DomainError(f"q-exponent {e} is not a multiple of 1/8")
            out.append((int(e8), c))
        return cls(out)


ZERO = LaurentPoly()
ONE = LaurentPoly({0: 1})


def monomial(e, c=1):
    """c * x^e."""
    return LaurentPoly({e: c})


def exact_div(p, d):
    """Quotient p / d in Z[x, 1/x], which must exist.

    Raises DomainError for d = 0 and InexactDivisionError when d does not
    divide p.
    """
    if not d._c:
        raise DomainError("division by the zero polynomial")
    if not p._c:
        return ZERO
    if d._step == 0:
        lead = d._c[0]
        out = []
        for c in p._c:
            q, r = divmod(c, lead)
            if r:
                raise InexactDivisionError(f"{p!r} is not divisible by {d!r}")
            out.append(q)
        return LaurentPoly._from_dense(p._low - d._low, p._step, out)
    g = math.gcd(p._step, d._step)
    # the quotient must live on a progression compatible with both
    if (p._low - d._low) % g:
        g = math.gcd(g, p._low - d._low)
    pl = (p.max_exponent - p._low) // g + 1
    dl = (d.max_exponent - d._low) // g + 1
    pc = p._spread(p._low, g, pl)
    dc = d._spread(d._low, g, dl)
    q = None
    if len(pc) * len(dc) > _SCHOOLBOOK_LIMIT:
        q = _divide_kronecker(pc, dc)
    if q is None:
        q = _divide_long(pc, dc)
    if q is None:
        raise InexactDivisionError(f"{p!r} is not divisible by {d!r}")
    return LaurentPoly._from_dense(p._low - d._low, g, q)


@lru_cache(maxsize=None)
def qint(n):
    """Quantum integer [n] = (q^(n/2) - q^(-n/2)) / (q^(1/2) - q^(-1/2))."""
    if n < 0:
        raise DomainError("qint needs n >= 0")
    if n == 0:
        return ZERO
    return LaurentPoly._from_dense(-4 * (n - 1), 8, [1] * n)


@lru_cache(maxsize=None)
def qfact(n):
    """Quantum factorial [n]! = [1][2]...[n], with [0]! = 1."""
    if n < 0:
        raise DomainError("qfact needs n >= 0")
    if n <= 1:
        return ONE
    return qfact(n - 1) * qint(n)


@lru_cache(maxsize=None)
def qfact_ratio(a, b):
    """[a, b]! = [a]! / [b]! = [b+1][b+2]...[a] for 0 <= b <= a."""
    if b < 0 or b > a:
        raise DomainError(f"qfact_ratio needs 0 <= b <= a, got ({a}, {b})")
    if a == b:
        return ONE
    return qfact_ratio(a - 1, b) * qint(a)


@lru_cache(maxsize=None)
def qbinom(n, k):
    """Gaussian binomial [n choose k] via q-Pascal; zero outside 0 <= k <= n."""
    if n < 0:
        raise DomainError("qbinom needs n >= 0")
    if k < 0 or k > n:
        return ZERO
    if k == 0 or k == n:
        return ONE
    # [n,k] = q^(-k/2) [n-1,k] + q^((n-k)/2) [n-1,k-1]
    return qbinom(n - 1, k).shift(-4 * k) + qbinom(n - 1, k - 1).shift(4 * (n - k))


def eval_on_unit_circle(p, turns, digits):
    """Evaluate p at q = exp(2 pi i * turns), i.e. x = exp(2 pi i * turns / 8).

    `turns` is an exact rational (``Fraction``).  Terms are accumulated in
    ascending exponent order at `digits` decimal digits; returns a gmpy2 mpc.
    """
    if digits < 16:
        raise DomainError("eval_on_unit_circle needs digits >= 16")
    turns = Fraction(turns)
    with working_precision(digits):
        acc = gmpy2.mpc(0)
        for e, c in p.terms():
            acc += c * unit(turns * e / 8)
        return +acc
