"""Rational functions of one variable over Q and their local expansions.

Points live in Q or are the point at infinity (``INFINITY``), where the
local coordinate is t = 1/z.
"""

from fractions import Fraction

from ..errors import DomainError
from .series import TruncatedSeries


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def parse_point(x):
    if x is INFINITY:
        return x
    if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "oo"):
        return INFINITY
    if isinstance(x, float):
        raise TypeError("points must be exact")
    return Fraction(x)


def point_str(p):
    return "inf" if p is INFINITY else str(p)


def point_key(p):
    """Total order on Q u {inf} used for deterministic sorting."""
    return (1, 0) if p is INFINITY else (0, p)


# -- dense polynomials: tuples of Fractions, constant term first --------

def poly_trim(p):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return tuple(Fraction(c) for c in p)


def poly_add(a, b):
    n = max(len(a), len(b))
    return poly_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def poly_mul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_trim(out)


def poly_scale(a, s):
    return poly_trim([s * c for c in a])


def poly_divmod(a, b):
    b = poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(poly_trim(a))
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] / lead
        q[k] = c
        for i, y in enumerate(b):
            a[i + k] -= c * y
        a = list(poly_trim(a))
    return poly_trim(q), poly_trim(a)


def poly_gcd(a, b):
    a, b = poly_trim(a), poly_trim(b)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return ()
    return poly_scale(a, 1 / a[-1])


def poly_eval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_taylor_shift(p, x0):
    """Coefficients of p(x0 + t) in t."""
    out = list(p)
    n = len(out)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] += x0 * out[j + 1]
    return poly_trim(out)


def poly_power(a, k):
    out = (Fraction(1),)
    for _ in range(k):
        out = poly_mul(out, a)
    return out


class RationalFunction:
    """num/den with polynomial coefficient tuples (constant term first)."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=(1,)):
        num, den = poly_trim(num), poly_trim(den)
        if not den:
            raise DomainError("denominator is identically zero")
        g = poly_gcd(num, den) if num else (Fraction(1),)
        if len(g) > 1:
            num = poly_divmod(num, g)[0]
            den = poly_divmod(den, g)[0]
        lead = den[-1]
        self.num = poly_scale(num, 1 / lead)
        self.den = poly_scale(den, 1 / lead)

    # -- constructors ---------------------------------------------------
    @classmethod
    def constant(cls, c):
        return cls((Fraction(c),))

    @classmethod
    def z_power(cls, m):
        """z**m for any integer m."""
        if m >= 0:
            return cls((0,) * m + (1,))
        return cls((1,), (0,) * (-m) + (1,))

    @classmethod
    def pole(cls, p, m):
        """(z - p)**(-m) for finite p."""
        return cls((1,), poly_power((-Fraction(p), Fraction(1)), m))

    @classmethod
    def linear_factor_power(cls, p, m):
        """(z - p)**m, m may be negative."""
        if m >= 0:
            return cls(poly_power((-Fraction(p), Fraction(1)), m))
        return cls.pole(p, -m)

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        other = _as_rf(other)
        return RationalFunction(poly_add(poly_mul(self.num, other.den), poly_mul(other.num, self.den)),
                                poly_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(poly_scale(self.num, -1), self.den)

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __rsub__(self, other):
        return _as_rf(other) - self

    def __mul__(self, other):
        other = _as_rf(other)
        return RationalFunction(poly_mul(self.num, other.num), poly_mul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other)
        if not other.num:
            raise ZeroDivisionError("division by the zero function")
        return RationalFunction(poly_mul(self.num, other.den), poly_mul(self.den, other.num))

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            try:
                other = _as_rf(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self):
        return not self.num

    def derivative(self):
        dn = poly_trim([i * c for i, c in enumerate(self.num)][1:])
        dd = poly_trim([i * c for i, c in enumerate(self.den)][1:])
        return RationalFunction(poly_add(poly_mul(dn, self.den), poly_scale(poly_mul(self.num, dd), -1)),
                                poly_mul(self.den, self.den))

    def __call__(self, x):
        d = poly_eval(self.den, x)
        if not d:
            raise DomainError(f"pole at {x}")
        return poly_eval(self.num, x) / d

    def __repr__(self):
        return f"RationalFunction({[str(c) for c in self.num]}, {[str(c) for c in self.den]})"

    # -- local data -----------------------------------------------------
    def order_at(self, p):
        """Order of vanishing at p (negative for a pole); inf for zero."""
        if not self.num:
            return float("inf")
        if p is INFINITY:
            return (len(self.den) - 1) - (len(self.num) - 1)
        return _root_multiplicity(self.num, p) - _root_multiplicity(self.den, p)

    def poles_within(self, points):
        """True when every pole on P^1 lies in ``points``."""
        den = self.den
        for p in points:
            if p is INFINITY:
                continue
            while len(den) > 1 and poly_eval(den, p) == 0:
                den = poly_divmod(den, (-p, Fraction(1)))[0]
        if len(den) > 1:
            return False
        if INFINITY not in points and self.order_at(INFINITY) < 0:
            return False
        return True


def _root_multiplicity(poly, p):
    m = 0
    while len(poly) > 1 and poly_eval(poly, p) == 0:
        poly = poly_divmod(poly, (-Fraction(p), Fraction(1)))[0]
        m += 1
    return m


def _as_rf(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, (int, Fraction)):
        return RationalFunction.constant(x)
    raise TypeError(f"cannot treat {type(x).__name__} as a rational function")


def _series_of_ratio(num, den, order, var):
    """Laurent series of num(t)/den(t) at t = 0 through t**order."""
    m = 0
    while m < len(den) and den[m] == 0:
        m += 1
    if m == len(den):
        raise DomainError("denominator is identically zero")
    unit = den[m:]
    need = order + m
    if need < 0:
        return TruncatedSeries({}, order, var, low=-m)
    inv = [Fraction(0)] * (need + 1)
    inv[0] = 1 / unit[0]
    for k in range(1, need + 1):
        s = Fraction(0)
        for j in range(1, min(k, len(unit) - 1) + 1):
            s += unit[j] * inv[k - j]
        inv[k] = -s / unit[0]
    coeffs = {}
    for i, a in enumerate(num):
        if not a:
            continue
        for k in range(need + 1 - i):
            if inv[k]:
                e = i + k - m
                coeffs[e] = coeffs.get(e, 0) + a * inv[k]
    return TruncatedSeries(coeffs, order, var, low=-m)


def expand_rational_at(f, p, order, var="t"):
    """Laurent expansion of f in the local coordinate at p through t**order.

    The local coordinate is t = z - p for finite p and t = 1/z at infinity.
    """
    if not isinstance(f, RationalFunction):
        f = _as_rf(f)
    if p is INFINITY:
        # f(1/t) = t^(dd - dn) * rev(num)(t) / rev(den)(t)
        dn, dd = len(f.num) - 1, len(f.den) - 1
        rnum = tuple(reversed(f.num)) if f.num else ()
        rden = tuple(reversed(f.den))
        shift = dd - dn
        base = _series_of_ratio(rnum, rden, order - shift, var)
        return base.shift(shift) if f.num else TruncatedSeries({}, order, var)
    p = Fraction(p)
    num = poly_taylor_shift(f.num, p)
    den = poly_taylor_shift(f.den, p)
    if not num:
        return TruncatedSeries({}, order, var)
    return _series_of_ratio(num, den, order, var)
