"""Coordinate changes acting on truncated modules.

A coordinate change rho(z) = a1 z + a2 z^2 + ... is written as

    rho(z) = a1 * exp(sum_{j>=1} v_j z^{j+1} d/dz) z ,

and acts on a module (on the left) by

    R(rho) = exp(-sum_j v_j L_j) o a1^(-deg).

Since L_j (j > 0) strictly lowers the degree, the exponential is a finite
sum on every M_{<=i}. The linear part uses the integer grading, not an
integrated L_0, so v -> a^(-deg v) v for rho = a z.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, InsufficientPrecision, InsufficientTruncation
from .kernel.series import TruncatedSeries, compose, invert_composition
from .kernel.sparse import SparseMatrix
from .voa.axioms import Verdict


@dataclass(frozen=True)
class CoordinateChange:
    """An element of Aut O given by its truncated series."""

    series: TruncatedSeries

    def __post_init__(self):
        if self.series.coeffs.get(0, 0) or any(e < 1 for e in self.series.coeffs):
            raise DomainError("coordinate change must have zero constant term")
        if not self.series.coeffs.get(1, 0):
            raise DomainError("linear coefficient is not invertible")

    @classmethod
    def polynomial(cls, coeffs, order=32):
        """rho(z) = sum_k coeffs[k] z^k, exact through ``order``."""
        return cls(TruncatedSeries({k: c for k, c in enumerate(coeffs)}, order, "z"))

    @property
    def a1(self):
        return self.series.coeffs[1]

    @property
    def order(self):
        return self.series.order

    def in_aut_plus(self):
        return self.a1 == 1

    def then(self, other):
        """The composite ``other(self(z))``."""
        return CoordinateChange(compose(other.series, self.series))

    def __call__(self, other):
        """``self(other(z))``."""
        return CoordinateChange(compose(self.series, other.series))

    def inverse(self):
        return CoordinateChange(invert_composition(self.series))


def gamma_gluing(order=12):
    """gamma(z) = 1/(1+z) - 1 = -z + z^2 - z^3 + ...  (an involution)."""
    return CoordinateChange(TruncatedSeries({k: (-1) ** k for k in range(1, order + 1)},
                                            order, "z", low=1))


# -- solving rho = a1 exp(xi) z ---------------------------------------------

def _poly_derivative(p):
    return {e - 1: e * c for e, c in p.items() if e}


def _exp_flow(vs, top, one):
    """exp(sum_j vs[j] t^{j+1} d/dt) t, as {exponent: coeff}, through t^top."""
    total = {1: one}
    term = {1: one}
    k = 0
    while term:
        k += 1
        d = _poly_derivative(term)
        nxt = {}
        for j, vj in vs.items():
            for e, c in d.items():
                f = e + j + 1
                if f <= top:
                    val = vj * c
                    nxt[f] = nxt[f] + val if f in nxt else val
        term = {e: c * Fraction(1, k) for e, c in nxt.items() if not _zero(c)}
        for e, c in term.items():
            total[e] = total[e] + c if e in total else c
    return total


def _zero(c):
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c.is_zero()


def solve_vector_field(normalized, J, zero=Fraction(0), one=Fraction(1)):
    """v_1..v_J with exp(sum v_j t^{j+1} d/dt) t = t + sum_{k>=2} normalized[k] t^k.

    The system is triangular: the t^{j+1} coefficient equals v_j plus a
    polynomial in v_1..v_{j-1}. Coefficients may lie in any commutative
    ring containing Q (e.g. truncated power series in another variable).
    """
    vs = {}
    for j in range(1, J + 1):
        vs[j] = zero
        got = _exp_flow(vs, j + 1, one).get(j + 1, zero)
        target = normalized.get(j + 1, zero)
        vs[j] = target - got
    return vs


def vector_field_of(rho, J):
    """(a1, {j: v_j}) for a coordinate change, v_j for j <= J."""
    if rho.order < J + 1:
        raise InsufficientPrecision(
            f"coordinate change known to order {rho.order}, need {J + 1}", needed=J + 1)
    a1 = rho.a1
    normalized = {k: c / a1 for k, c in rho.series.coeffs.items() if k >= 2}
    return a1, solve_vector_field(normalized, J)


# -- the action on modules --------------------------------------------------

def _virasoro_positive(M, vs, state):
    """sum_j v_j L_j applied to ``state`` (coefficients in any ring)."""
    om = M.parent.conformal_vector
    out = {}
    for j, vj in vs.items():
        if _zero(vj):
            continue
        for u, c in M.mode_state(om, j + 1, state).items():
            term = c * vj
            out[u] = out[u] + term if u in out else term
    return {u: c for u, c in out.items() if not _zero(c)}


def _exp_apply(M, vs, state, sign):
    """exp(sign * sum_j v_j L_j) state; finite because L_j lowers degree."""
    total = dict(state)
    term = dict(state)
    k = 0
    while term:
        k += 1
        nxt = _virasoro_positive(M, vs, term)
        term = {u: c * Fraction(sign, k) for u, c in nxt.items()}
        for u, c in term.items():
            total[u] = total[u] + c if u in total else c
        total = {u: c for u, c in total.items() if not _zero(c)}
    return total


def _grade(M, a1, state, power):
    return {u: c * a1 ** (power * M.degree(u)) for u, c in state.items()}


def apply_coordinate_change(M, a1, vs, state, inverse=False):
    """R(rho) state, or R(rho)^{-1} state, given the solved data (a1, v)."""
    if inverse:
        return _grade(M, a1, _exp_apply(M, vs, state, +1), +1)
    return _exp_apply(M, vs, _grade(M, a1, state, -1), -1)


def coordinate_change_action(rho, M, inverse=False):
    """Matrix of R(rho) (or its inverse) on the truncation of M."""
    if not isinstance(rho, CoordinateChange):
        rho = CoordinateChange(rho)
    a1, vs = vector_field_of(rho, max(M.N, 1))
    cols = [apply_coordinate_change(M, a1, vs, {v: Fraction(1)}, inverse) for v in range(M.dim)]
    return SparseMatrix.from_columns(M.dim, cols)


def is_block_lower_triangular(R, M):
    """R maps M_d into M_{<=d} and is the identity on the associated graded."""
    for (r, c), v in R.entries.items():
        if M.degree(r) > M.degree(c):
            return False
        if M.degree(r) == M.degree(c) and v != (1 if r == c else 0):
            return False
    for v in range(M.dim):
        if R[v, v] != 1:
            return False
    return True


# -- Huang's compatibility formula ------------------------------------------

def _local_family(rho, J, zorder):
    """(a1(z), {j: v_j(z)}) for rho_z(t) = rho(z+t) - rho(z), coefficients in Q[[z]]."""
    coeffs = rho.series.coeffs
    if rho.order < J + 1 + zorder:
        raise InsufficientPrecision(
            f"coordinate change known to order {rho.order}, need {J + 1 + zorder}",
            needed=J + 1 + zorder)
    # t^k coefficient of rho(z+t): sum_n a_n C(n,k) z^{n-k}
    tk = {}
    for k in range(1, J + 2):
        tk[k] = TruncatedSeries({n - k: a * _binom(n, k) for n, a in coeffs.items() if n >= k},
                                zorder, "z", low=0)
    a1 = tk[1]
    inv_a1 = a1.inverse()
    normalized = {k: tk[k] * inv_a1 for k in range(2, J + 2)}
    zero = TruncatedSeries({}, zorder, "z", low=0)
    one = TruncatedSeries({0: 1}, zorder, "z", low=0)
    return a1, solve_vector_field(normalized, J, zero, one)


def _binom(n, k):
    from .kernel.scalars import binom
    return binom(n, k)


def huang_compatibility_check(rho, M, A, modes=range(-2, 3), max_source_degree=3):
    """R(rho)^{-1} Y^M(A, z) R(rho) = Y^M(R(rho_z)^{-1} A, rho(z)), coefficientwise.

    For each mode i in ``modes`` and each source vector of degree at most
    ``max_source_degree``, the z^{-i-1} coefficients of both sides are
    compared exactly. ``A`` is a parent basis index or a state dict.
    """
    if not isinstance(rho, CoordinateChange):
        rho = CoordinateChange(rho)
    V = M.parent
    avec = V.as_vector(A)
    da = max(V.degree(a) for a in avec)
    modes = list(modes)
    imin = min(modes)
    need = max_source_degree + da - imin - 1
    if need > M.N:
        raise InsufficientTruncation(
            f"compatibility window needs N >= {need}, have {M.N}", needed=need)
    mmax = max(-i - 1 for i in modes)
    zorder = mmax + da + max_source_degree + 2
    J = max(M.N, 1)
    a1, vs = vector_field_of(rho, J)
    za1, zvs = _local_family(rho, J, zorder)
    # R(rho_z)^{-1} A: a state of V with coefficients in Q[[z]]
    zstate = {a: TruncatedSeries({0: c}, zorder, "z", low=0) for a, c in avec.items()}
    flowed = _exp_apply(V, zvs, zstate, +1)
    rza = {u: c * za1 ** V.degree(u) for u, c in flowed.items()}
    rser = TruncatedSeries(rho.series.coeffs, zorder + da + max_source_degree + 2, "z", low=1)
    checked = 0
    for s in range(max_source_degree + 1):
        for v in M.space.positions(s):
            e = {v: Fraction(1)}
            rv = apply_coordinate_change(M, a1, vs, e)
            # right side as a Laurent series in z with vector coefficients
            right = {}
            top_i = max(V.degree(b) for b in rza) + s - 1 if rza else 0
            for i in range(-mmax - 1, top_i + 1):
                for b, cb in rza.items():
                    col = M.mode_column(b, i, v)
                    if not col:
                        continue
                    factor = cb * rser ** (-i - 1)
                    for u, cu in col.items():
                        term = factor * cu
                        right[u] = right[u] + term if u in right else term
            for i in modes:
                mid = M.mode_state(avec, i, rv)
                left = apply_coordinate_change(M, a1, vs, mid, inverse=True)
                m = -i - 1
                rhs = {u: c[m] for u, c in right.items()}
                rhs = {u: c for u, c in rhs.items() if c}
                left = {u: c for u, c in left.items() if c}
                checked += 1
                if left != rhs:
                    return Verdict(False, checked,
                                   f"mode {i} on {M.space.names[v]}: {left} != {rhs}",
                                   tuple(range(max_source_degree + 1)))
    return Verdict(True, checked, sources=tuple(range(max_source_degree + 1)))

