"""Logarithmic Atiyah-algebra classes and Chern data of coinvariant bundles.

Classes are formal combinations r * A_Lambda + sum_i s_i * A_Psi_i (Baer sum
= addition of coefficients). Cohomology classes are polynomials in lambda
and psi_1..psi_n with no relations, truncated at the dimension 3g - 3 + n of
the moduli space M_{g,n}.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import DimensionError, DomainError
from .kernel.scalars import qstr, to_q

_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


@dataclass(frozen=True)
class AtiyahCombination:
    """lam * A_Lambda + sum_i psi[i] * A_Psi_i."""

    lam: Fraction
    psi: tuple

    def __post_init__(self):
        object.__setattr__(self, "lam", to_q(self.lam))
        object.__setattr__(self, "psi", tuple(to_q(a) for a in self.psi))

    @classmethod
    def zero(cls, n):
        return cls(Fraction(0), (Fraction(0),) * n)

    @classmethod
    def of_module_data(cls, c, a):
        """(c/2) A_Lambda + sum a_i A_Psi_i for central charge c and conformal dimensions a."""
        return cls(to_q(c) / 2, tuple(a))

    @property
    def n(self):
        return len(self.psi)

    def __add__(self, other):
        return baer_sum(self, other)

    def __rmul__(self, alpha):
        return scalar_mul(alpha, self)

    def __neg__(self):
        return scalar_mul(-1, self)

    def is_trivial(self):
        return not self.lam and not any(self.psi)


def baer_sum(x, y):
    if x.n != y.n:
        raise DimensionError(f"classes on different numbers of points ({x.n} vs {y.n})")
    return AtiyahCombination(x.lam + y.lam, tuple(a + b for a, b in zip(x.psi, y.psi)))


def scalar_mul(alpha, x):
    alpha = to_q(alpha)
    return AtiyahCombination(alpha * x.lam, tuple(alpha * a for a in x.psi))


def moduli_dimension(g, n):
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise DomainError(f"(g, n) = ({g}, {n}) is not stable (need 2g - 2 + n > 0)")
    return 3 * g - 3 + n


class TautPolynomial:
    """Polynomial in lambda, psi_1..psi_n truncated at total degree 3g - 3 + n."""

    __slots__ = ("g", "n", "top", "coeffs")

    def __init__(self, g, n, coeffs=None):
        self.g = g
        self.n = n
        self.top = moduli_dimension(g, n)
        clean = {}
        for mono, c in (coeffs or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n + 1 or any(e < 0 for e in mono):
                raise DimensionError(f"monomial {mono} does not fit n = {n}")
            c = to_q(c)
            if c and sum(mono) <= self.top:
                clean[mono] = clean.get(mono, 0) + c
        self.coeffs = {m: c for m, c in clean.items() if c}

    # -- constructors ----------------------------------------------------
    @classmethod
    def constant(cls, g, n, c):
        return cls(g, n, {(0,) * (n + 1): c})

    @classmethod
    def linear(cls, g, n, lam, psi):
        coeffs = {(1,) + (0,) * n: lam}
        for i, a in enumerate(psi):
            mono = [0] * (n + 1)
            mono[i + 1] = 1
            coeffs[tuple(mono)] = a
        return cls(g, n, coeffs)

    # -- arithmetic --------------------------------------------------------
    def _check(self, other):
        if (self.g, self.n) != (other.g, other.n):
            raise DimensionError("polynomials live on different moduli spaces")

    def __add__(self, other):
        if not isinstance(other, TautPolynomial):
            other = TautPolynomial.constant(self.g, self.n, other)
        self._check(other)
        acc = dict(self.coeffs)
        for m, c in other.coeffs.items():
            acc[m] = acc.get(m, 0) + c
        return TautPolynomial(self.g, self.n, acc)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        a = to_q(a)
        return TautPolynomial(self.g, self.n, {m: a * c for m, c in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, TautPolynomial):
            return self.scale(other)
        self._check(other)
        acc = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                if sum(m) <= self.top:
                    acc[m] = acc.get(m, 0) + c1 * c2
        return TautPolynomial(self.g, self.n, acc)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = TautPolynomial.constant(self.g, self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, TautPolynomial):
            return NotImplemented
        return (self.g, self.n, self.coeffs) == (other.g, other.n, other.coeffs)

    def __hash__(self):
        return hash((self.g, self.n, frozenset(self.coeffs.items())))

    # -- structure -----------------------------------------------------------
    def constant_term(self):
        return self.coeffs.get((0,) * (self.n + 1), Fraction(0))

    def homogeneous(self, k):
        return TautPolynomial(self.g, self.n, {m: c for m, c in self.coeffs.items() if sum(m) == k})

    def coefficient(self, lam=0, psi=None):
        psi = tuple(psi or (0,) * self.n)
        return self.coeffs.get((lam,) + psi, Fraction(0))

    def is_zero(self):
        return not self.coeffs

    # -- rendering ------------------------------------------------------------
    def _sorted(self):
        return sorted(self.coeffs.items(), key=lambda mc: (sum(mc[0]), tuple(-e for e in mc[0])))

    def to_json(self):
        return [{"monomial": {"lambda": m[0], "psi": list(m[1:])}, "coeff": qstr(c)}
                for m, c in self._sorted()]

    def to_text(self):
        if not self.coeffs:
            return "0"
        parts = []
        for m, c in self._sorted():
            factors = []
            if m[0]:
                factors.append("λ" if m[0] == 1 else f"λ^{m[0]}")
            for i, e in enumerate(m[1:], start=1):
                if e:
                    sym = "ψ" + str(i).translate(_SUB)
                    factors.append(sym if e == 1 else f"{sym}^{e}")
            mag = abs(c)
            if not factors:
                body = qstr(mag)
            elif mag == 1:
                body = "·".join(factors)
            else:
                body = qstr(mag) + "·" + "·".join(factors)
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"TautPolynomial(g={self.g}, n={self.n}, {self.to_text()})"


def taut_exp(x):
    """exp(x) for x without constant term, truncated."""
    if x.constant_term():
        raise DomainError("exp is only taken of classes without constant term")
    out = TautPolynomial.constant(x.g, x.n, 1)
    term = TautPolynomial.constant(x.g, x.n, 1)
    for k in range(1, x.top + 1):
        term = term * x.scale(Fraction(1, k))
        out = out + term
    return out


def taut_log(x):
    """log(x) for x with constant term 1, truncated."""
    if x.constant_term() != 1:
        raise DomainError("log needs constant term 1")
    y = x - 1
    out = TautPolynomial(x.g, x.n)
    power = TautPolynomial.constant(x.g, x.n, 1)
    for k in range(1, x.top + 1):
        power = power * y
        out = out + power.scale(Fraction((-1) ** (k + 1), k))
    return out


def _class_polynomial(c, a, g, n):
    a = [to_q(v) for v in a]
    if len(a) != n:
        raise DimensionError(f"{len(a)} conformal dimensions for n = {n} points")
    return TautPolynomial.linear(g, n, to_q(c) / 2, a)


def first_chern(rank, x, g):
    """rank * (x_lambda * lambda + sum x_psi_i * psi_i)."""
    if rank < 0:
        raise DomainError("rank must be nonnegative")
    return TautPolynomial.linear(g, x.n, x.lam, x.psi).scale(rank)


def chern_character(rank, c, a, g, n):
    """rank * exp(c/2 lambda + sum a_i psi_i), truncated at 3g - 3 + n."""
    if rank < 0:
        raise DomainError("rank must be nonnegative")
    return taut_exp(_class_polynomial(c, a, g, n)).scale(rank)


def total_chern(rank, c, a, g, n):
    """(1 + c/2 lambda + sum a_i psi_i)^rank, truncated at 3g - 3 + n."""
    if rank < 0:
        raise DomainError("rank must be nonnegative")
    return (_class_polynomial(c, a, g, n) + 1) ** rank


def total_chern_from_character(ch):
    """Total Chern class from a Chern character via Newton's identities.

    With power sums p_k = k! ch_k, the elementary classes satisfy
    k e_k = sum_{i=1}^k (-1)^(i-1) e_{k-i} p_i.
    """
    p = {k: ch.homogeneous(k).scale(factorial(k)) for k in range(1, ch.top + 1)}
    e = {0: TautPolynomial.constant(ch.g, ch.n, 1)}
    for k in range(1, ch.top + 1):
        acc = TautPolynomial(ch.g, ch.n)
        for i in range(1, k + 1):
            term = e[k - i] * p[i]
            acc = acc + (term if i % 2 else -term)
        e[k] = acc.scale(Fraction(1, k))
    out = TautPolynomial(ch.g, ch.n)
    for v in e.values():
        out = out + v
    return out


def character_from_total_chern(c_total, rank):
    """Inverse Newton conversion: ch = rank + sum_k p_k / k! with

    p_k = (-1)^(k-1) k e_k + sum_{i=1}^{k-1} (-1)^(k-1+i) e_{k-i} p_i.
    """
    e = {k: c_total.homogeneous(k) for k in range(0, c_total.top + 1)}
    p = {}
    for k in range(1, c_total.top + 1):
        acc = e[k].scale(k if (k - 1) % 2 == 0 else -k)
        for i in range(1, k):
            term = e[k - i] * p[i]
            acc = acc + (term if (k - 1 + i) % 2 == 0 else -term)
        p[k] = acc
    out = TautPolynomial.constant(c_total.g, c_total.n, rank)
    for k, pk in p.items():
        out = out + pk.scale(Fraction(1, factorial(k)))
    return out
