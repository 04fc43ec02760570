"""The Virasoro Lie algebra with its central element K, as formal sums."""

from fractions import Fraction


class VirasoroElement:
    """sum_p a_p L_p + k K with exact coefficients."""

    __slots__ = ("terms", "central")

    def __init__(self, terms=None, central=0):
        self.terms = {int(p): Fraction(c) for p, c in (terms or {}).items() if c}
        self.central = Fraction(central)

    @classmethod
    def L(cls, p, coeff=1):
        return cls({p: coeff})

    @classmethod
    def K(cls, coeff=1):
        return cls({}, coeff)

    def __add__(self, other):
        acc = dict(self.terms)
        for p, c in other.terms.items():
            acc[p] = acc.get(p, 0) + c
        return VirasoroElement(acc, self.central + other.central)

    def __neg__(self):
        return VirasoroElement({p: -c for p, c in self.terms.items()}, -self.central)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, a):
        a = Fraction(a)
        return VirasoroElement({p: a * c for p, c in self.terms.items()}, a * self.central)

    def __eq__(self, other):
        return (isinstance(other, VirasoroElement) and self.terms == other.terms
                and self.central == other.central)

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.central))

    def is_zero(self):
        return not self.terms and not self.central

    def __repr__(self):
        parts = [f"{c}*L[{p}]" for p, c in sorted(self.terms.items())]
        if self.central:
            parts.append(f"{self.central}*K")
        return " + ".join(parts) or "0"


def virasoro_bracket(x, y):
    """[L_p, L_q] = (p - q) L_{p+q} + K/12 (p^3 - p) delta_{p+q,0}; K central."""
    terms = {}
    central = Fraction(0)
    for p, a in x.terms.items():
        for q, b in y.terms.items():
            if p != q:
                terms[p + q] = terms.get(p + q, 0) + a * b * (p - q)
            if p + q == 0:
                central += a * b * Fraction(p ** 3 - p, 12)
    return VirasoroElement(terms, central)
