"""Exact rational scalars.

``fractions.Fraction`` already keeps numerator/denominator in lowest terms
with a positive denominator, so it is used directly as the scalar type.
"""

from fractions import Fraction

Q = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)


def to_q(x):
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a string like '1/2'")
    return Fraction(x)


def qstr(x):
    """Render a scalar as ``"p/q"`` (or ``"p"`` when integral)."""
    return str(Fraction(x))


def binom(n, k):
    """Generalized binomial coefficient C(n, k) for integer n and k >= 0."""
    if k < 0:
        return 0
    num = 1
    den = 1
    for r in range(k):
        num *= n - r
        den *= r + 1
    return num // den
