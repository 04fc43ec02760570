"""Truncated formal Laurent series in one variable over Q.

A series carries an explicit truncation order ``order``: coefficients of
exponents greater than ``order`` are unknown, not zero. ``low`` is a lower
bound on the valuation (every coefficient below it is exactly zero).
Every operation propagates the order of validity of its output.
"""

from fractions import Fraction

from ..errors import DomainError, InsufficientPrecision


class TruncatedSeries:
    __slots__ = ("coeffs", "order", "low", "var")

    def __init__(self, coeffs, order, var="z", low=None):
        clean = {}
        for e, c in dict(coeffs).items():
            if e > order:
                continue
            c = Fraction(c)
            if c:
                clean[int(e)] = c
        if low is None:
            low = min(clean) if clean else order + 1
        elif clean and min(clean) < low:
            raise ValueError("stored exponent below declared lowest exponent")
        self.coeffs = clean
        self.order = int(order)
        self.low = int(low)
        self.var = var

    # -- constructors -------------------------------------------------
    @classmethod
    def monomial(cls, exponent, order, coeff=1, var="z"):
        return cls({exponent: coeff}, order, var)

    @classmethod
    def identity(cls, order, var="z"):
        return cls({1: 1}, order, var, low=1)

    @classmethod
    def from_list(cls, coeffs, start=0, order=None, var="z"):
        """Coefficients listed from exponent ``start`` upward."""
        if order is None:
            order = start + len(coeffs) - 1
        return cls({start + k: c for k, c in enumerate(coeffs)}, order, var, low=start)

    # -- access ---------------------------------------------------------
    def __getitem__(self, e):
        if e > self.order:
            raise InsufficientPrecision(
                f"coefficient of {self.var}^{e} lies beyond truncation order {self.order}", needed=e)
        return self.coeffs.get(e, Fraction(0))

    def valuation(self):
        """Exact valuation when a nonzero term is known, else None."""
        return min(self.coeffs) if self.coeffs else None

    def truncate(self, order):
        return TruncatedSeries(self.coeffs, min(order, self.order), self.var, self.low)

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def agrees_with(self, other, order=None):
        """Equality of coefficients up to ``order`` (default: common order)."""
        top = min(self.order, other.order) if order is None else order
        if top > min(self.order, other.order):
            raise InsufficientPrecision("comparison beyond known order", needed=top)
        keys = {e for e in self.coeffs if e <= top} | {e for e in other.coeffs if e <= top}
        return all(self.coeffs.get(e, 0) == other.coeffs.get(e, 0) for e in keys)

    def __repr__(self):
        terms = " + ".join(f"({c})*{self.var}^{e}" for e, c in sorted(self.coeffs.items()))
        return f"TruncatedSeries({terms or '0'} + O({self.var}^{self.order + 1}))"

    # -- arithmetic -----------------------------------------------------
    def __neg__(self):
        return TruncatedSeries({e: -c for e, c in self.coeffs.items()}, self.order, self.var, self.low)

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries({0: other}, self.order, self.var)
        order = min(self.order, other.order)
        acc = dict(self.coeffs)
        for e, c in other.coeffs.items():
            acc[e] = acc.get(e, 0) + c
        return TruncatedSeries(acc, order, self.var, min(self.low, other.low))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, a):
        a = Fraction(a)
        return TruncatedSeries({e: a * c for e, c in self.coeffs.items()}, self.order, self.var, self.low)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        order = min(self.order + other.low, other.order + self.low)
        acc = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e <= order:
                    acc[e] = acc.get(e, 0) + c1 * c2
        return TruncatedSeries(acc, order, self.var, self.low + other.low)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by var**k."""
        return TruncatedSeries({e + k: c for e, c in self.coeffs.items()}, self.order + k, self.var, self.low + k)

    def inverse(self):
        """Multiplicative inverse; needs a known nonzero leading term."""
        v = self.valuation()
        if v is None:
            raise DomainError("cannot invert a series with no known nonzero term")
        unit = self.shift(-v)   # unit with constant term unit[0] != 0
        n = unit.order
        a0 = unit.coeffs[0]
        inv = {0: 1 / a0}
        for k in range(1, n + 1):
            s = 0
            for j in range(1, k + 1):
                aj = unit.coeffs.get(j)
                if aj:
                    s += aj * inv.get(k - j, 0)
            inv[k] = -s / a0
        return TruncatedSeries(inv, n, self.var, 0).shift(-v)

    def __truediv__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(1 / Fraction(other))
        return self * other.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return TruncatedSeries({0: 1}, self.order - self.low, self.var, 0)
        out = None
        base = self
        while k:
            if k & 1:
                out = base if out is None else out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def derivative(self):
        return TruncatedSeries({e - 1: e * c for e, c in self.coeffs.items() if e != 0},
                               self.order - 1, self.var, self.low - 1 if self.low != 0 else 0)


def residue(f):
    """Coefficient of var^-1."""
    if f.order < -1:
        raise InsufficientPrecision(
            f"z^-1 coefficient truncated away (order {f.order})", needed=-1)
    return f.coeffs.get(-1, Fraction(0))


def compose(f, g):
    """f(g(var)) with conservative truncation-order propagation.

    ``g`` must have no constant term when ``f`` has negative exponents.
    With a constant term in ``g`` the unknown tail of ``f`` contaminates
    every coefficient, so the result carries order -1.
    """
    if any(e < 0 for e in g.coeffs):
        raise DomainError("inner series has a pole; composition undefined")
    vg = g.valuation()
    if vg is None:
        raise DomainError("inner series has no known nonzero term")
    if vg < 1:
        if any(e < 0 for e in f.coeffs):
            raise DomainError("inner series needs zero constant term when outer series is Laurent")
        acc = TruncatedSeries({}, g.order, g.var, low=0)
        for e in sorted(f.coeffs, reverse=True):
            acc = acc * g + f.coeffs[e]
        return acc.truncate(-1)
    gg = TruncatedSeries(g.coeffs, g.order, g.var, low=vg)
    order = vg * (f.order + 1) - 1
    for e in f.coeffs:
        order = min(order, (e - 1) * vg + gg.order)
    acc = TruncatedSeries({}, order, g.var, low=min(0, f.low * vg))
    for e in sorted(f.coeffs):
        acc = acc + (gg ** e).truncate(order).scale(f.coeffs[e])
    return acc.truncate(order)


def invert_composition(rho):
    """Compositional inverse of rho = a1*z + a2*z^2 + ... (a1 != 0)."""
    if rho.low < 1 and rho.coeffs.get(0, 0):
        raise DomainError("series has a constant term; not in Aut O")
    if any(e < 1 for e in rho.coeffs):
        raise DomainError("series must start at exponent >= 1")
    a1 = rho.coeffs.get(1, 0)
    if not a1:
        raise DomainError("linear coefficient is not invertible")
    n = rho.order
    sigma = {1: 1 / a1}
    for k in range(2, n + 1):
        trial = TruncatedSeries(sigma, k, rho.var, low=1)
        c = compose(TruncatedSeries(rho.coeffs, k, rho.var, low=1), trial)[k]
        sigma[k] = -c / a1
    return TruncatedSeries(sigma, n, rho.var, low=1)
