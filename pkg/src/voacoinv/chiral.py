"""The Lie algebra L(V) = (V (x) Q((t))) / Im(d) and its genus-zero sections.

Elements of L(V) are finite combinations of symbols A_[i], optionally
carrying a truncation order: for an expansion, terms with i > order are
unknown rather than zero. Reduction modulo the image of
d = L_{-1} (x) 1 + 1 (x) d/dt uses the rewrite (L_{-1}A)_[i] -> -i A_[i-1]
together with |0>_[m] = 0 for m != -1.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, InsufficientPrecision, InsufficientTruncation
from .kernel.rational import INFINITY, RationalFunction, expand_rational_at, parse_point
from .kernel.scalars import binom, to_q
from .kernel.sparse import rref_ordered


class LVElement:
    """sum c * A_[i] over basis indices A of a truncated vertex algebra."""

    __slots__ = ("V", "terms", "order")

    def __init__(self, V, terms=None, order=None):
        self.V = V
        self.terms = {(int(a), int(i)): Fraction(c) for (a, i), c in (terms or {}).items() if c}
        self.order = order

    @classmethod
    def symbol(cls, V, A, i, coeff=1):
        return cls(V, {(a, i): coeff * c for a, c in V.as_vector(A).items()})

    def __add__(self, other):
        acc = dict(self.terms)
        for k, c in other.terms.items():
            acc[k] = acc.get(k, 0) + c
        return LVElement(self.V, acc, _min_order(self.order, other.order))

    def __neg__(self):
        return LVElement(self.V, {k: -c for k, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, a):
        a = to_q(a)
        return LVElement(self.V, {k: a * c for k, c in self.terms.items()}, self.order)

    def __eq__(self, other):
        return isinstance(other, LVElement) and self.terms == other.terms and self.order == other.order

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def __repr__(self):
        names = self.V.space.names
        body = " + ".join(f"({c})*{names[a]}_[{i}]" for (a, i), c in sorted(self.terms.items())) or "0"
        return body if self.order is None else f"{body} + O([{self.order + 1}])"


def _min_order(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# -- reduction modulo Im(d) -------------------------------------------------

class Reducer:
    """Normal forms in L(V) for one truncated vertex algebra.

    For each degree d >= 1 the image L_{-1} V_{d-1} is put in reduced
    echelon form; its pivot basis vectors are rewritten through their
    L_{-1}-preimages. The remaining basis vectors (plus |0>_[-1]) give a
    unique normal form, so reduction is confluent by construction.
    """

    def __init__(self, V):
        self.V = V
        self._rules = {}
        om = V.conformal_vector
        for d in range(1, V.N + 1):
            rows = []
            for w in V.space.positions(d - 1):
                img = V.mode_state(om, 0, {w: Fraction(1)})
                row = {("img", u): c for u, c in img.items()}
                row[("pre", w)] = Fraction(-1)
                rows.append(row)
            order = [("img", u) for u in V.space.positions(d)]
            order += [("pre", w) for w in V.space.positions(d - 1)]
            for piv, row in rref_ordered(rows, order).items():
                if piv[0] != "img":
                    continue
                # piv + sum_q r_q q - sum_w c_w L_{-1} w = 0
                others = {u: c for (kind, u), c in row.items() if kind == "img" and u != piv[1]}
                pre = {w: -c for (kind, w), c in row.items() if kind == "pre"}
                self._rules[piv[1]] = (others, pre)

    def pivots(self):
        return frozenset(self._rules)

    def reduce(self, x, order=None):
        """Normal form of ``x``; ``order`` randomizes nothing but lets callers
        pick the processing order of terms (for confluence tests)."""
        out = {}
        stack = list(x.terms.items())
        if order is not None:
            stack = [stack[k] for k in order]
        vac = self.V.vacuum
        drop = 0
        while stack:
            (a, i), c = stack.pop()
            if a == vac:
                if i == -1:
                    out[(a, i)] = out.get((a, i), 0) + c
                continue
            rule = self._rules.get(a)
            if rule is None:
                out[(a, i)] = out.get((a, i), 0) + c
                continue
            others, pre = rule
            drop = max(drop, self.V.degree(a))
            for q, r in others.items():
                stack.append(((q, i), -c * r))
            if i:
                for w, cw in pre.items():
                    stack.append(((w, i - 1), -i * c * cw))
        order_out = None if x.order is None else x.order - drop
        return LVElement(self.V, {k: v for k, v in out.items() if v}, order_out)


def _reducer(V):
    red = getattr(V, "_lv_reducer", None)
    if red is None:
        red = Reducer(V)
        V._lv_reducer = red
    return red


def reduce_lv(x):
    return _reducer(x.V).reduce(x)


def lv_bracket(x, y):
    """[A_[i], B_[j]] = sum_k C(i,k) (A_(k) B)_[i+j-k], reduced."""
    if x.order is not None or y.order is not None:
        raise InsufficientPrecision("bracket of truncated series is not supported; pass finite elements")
    V = x.V
    acc = {}
    for (a, i), ca in x.terms.items():
        for (b, j), cb in y.terms.items():
            top = V.degree(a) + V.degree(b) - 1
            for k in range(0, top + 1):
                ck = binom(i, k)
                if not ck:
                    continue
                for u, cu in V.mode_column(a, k, b).items():
                    key = (u, i + j - k)
                    acc[key] = acc.get(key, 0) + ca * cb * ck * cu
    return reduce_lv(LVElement(V, acc))


def virasoro_image(V, x):
    """Image of a Virasoro element under omega_[p] = L_{p-1} and K = c |0>_[-1]."""
    om = V.conformal_vector
    acc = {}
    for p, cp in x.terms.items():
        for a, ca in om.items():
            acc[(a, p + 1)] = acc.get((a, p + 1), 0) + cp * ca
    if x.central:
        acc[(V.vacuum, -1)] = acc.get((V.vacuum, -1), 0) + x.central * V.central_charge
    return reduce_lv(LVElement(V, acc))


# -- action on modules ------------------------------------------------------

def lv_act_state(x, M, state):
    """A_[i] -> A^M_(i) applied to a sparse state of M (a Lie homomorphism)."""
    out = {}
    for v, cv in state.items():
        dv = M.degree(v)
        for (a, i), c in x.terms.items():
            for u, cu in M.mode_column(a, i, v).items():
                out[u] = out.get(u, 0) + c * cv * cu
        if x.order is not None:
            need = max((M.parent.degree(a) for a, _ in x.terms), default=0) + dv - 1
            if x.order < need:
                raise InsufficientPrecision(
                    f"expansion known through index {x.order}, degree-{dv} vectors need {need}",
                    needed=need)
    return {u: c for u, c in out.items() if c}


def lv_act(x, M):
    """Matrix of A_[i] -> A^M_(i) on the source degrees where it is known."""
    from .kernel.sparse import SparseMatrix
    cols = []
    sources = []
    for v in range(M.dim):
        try:
            cols.append(lv_act_state(x, M, {v: Fraction(1)}))
            sources.append(v)
        except InsufficientTruncation:
            cols.append({})
    if not sources and M.dim:
        raise InsufficientTruncation("element acts outside the truncation on every basis vector")
    return SparseMatrix.from_columns(M.dim, cols), tuple(sources)


def alpha(x, M):
    """The anti-homomorphism alpha_M = -(A_[i] -> A^M_(i))."""
    m, sources = lv_act(x, M)
    return m.scale(-1), sources


# -- genus-zero sections ----------------------------------------------------

def as_rational(f):
    if isinstance(f, RationalFunction):
        return f
    return RationalFunction.constant(to_q(f))


@dataclass
class ChiralSection:
    """sum_k A_k (x) f_k(z) dz on P^1, regular away from the marked points."""

    V: object
    summands: list
    points: tuple = field(default_factory=tuple)

    def __post_init__(self):
        pts = tuple(parse_point(p) for p in self.points)
        if len(set(pts)) != len(pts):
            raise DomainError("marked points must be distinct")
        self.points = pts
        clean = []
        for A, f in self.summands:
            f = as_rational(f)
            clean.append((self.V.as_vector(A), f))
        self.summands = clean
        for avec, f in self.summands:
            if not _finite_poles_marked(f, pts):
                raise DomainError(f"{f} has a pole away from the marked points")
        if INFINITY not in pts and not self._regular_at_infinity():
            raise DomainError("section is not regular at the unmarked point at infinity")

    def _regular_at_infinity(self):
        exp = expansion_at(self, INFINITY, 0)
        return all(i >= 0 for (_, i) in exp.terms)

    def __add__(self, other):
        return ChiralSection(self.V, [(a, f) for a, f in self.summands] + list(other.summands), self.points)


def _finite_poles_marked(f, pts):
    return f.poles_within(tuple(pts) + (INFINITY,))


def _lower_one(V, state):
    """L_1 = omega_(2) on V."""
    return V.mode_state(V.conformal_vector, 2, state)


def infinity_terms(V, avec):
    """Terms (B, e, sign) with A (x) f dz = sum B (x) sign * t^e f(1/t) dt at infinity.

    For homogeneous A of degree d, the coordinate change z = 1/t gives
    sum_k (L_1^k A / k!) (x) (-1)^(d+1) t^(2d-k-2) f(1/t) dt.
    """
    out = []
    parts = {}
    for a, c in avec.items():
        parts.setdefault(V.degree(a), {})[a] = c
    for d, state in sorted(parts.items()):
        k = 0
        cur = dict(state)
        fact = 1
        while cur:
            sign = Fraction(-1 if d % 2 == 0 else 1, fact)
            out.append((cur, 2 * d - k - 2, sign))
            k += 1
            fact *= k
            cur = _lower_one(V, cur)
    return out


def expansion_at(section, p, order):
    """Expansion of a section at the point p as an LVElement known through index ``order``."""
    V = section.V
    acc = {}
    for avec, f in section.summands:
        if p is INFINITY:
            for state, e, sign in infinity_terms(V, avec):
                ser = expand_rational_at(f, INFINITY, order - e, "t")
                for j, cf in ser.coeffs.items():
                    for a, ca in state.items():
                        key = (a, j + e)
                        acc[key] = acc.get(key, 0) + sign * cf * ca
        else:
            ser = expand_rational_at(f, p, order, "t")
            for j, cf in ser.coeffs.items():
                for a, ca in avec.items():
                    key = (a, j)
                    acc[key] = acc.get(key, 0) + cf * ca
    return LVElement(V, acc, order)


def expand_at_points(section, order):
    """Expansions at every marked point, each known through index ``order``."""
    return [expansion_at(section, p, order) for p in section.points]


def vector_field_to_virasoro_section(V, f, points):
    """The section omega (x) f dz realizing the vector field f(z) d/dz."""
    return ChiralSection(V, [(V.conformal_vector, as_rational(f))], points)


# -- tensor products ----------------------------------------------------------

@dataclass
class TensorState:
    """A sparse vector in the tensor product of truncated modules."""

    factors: list
    vector: dict

    def total_degrees(self):
        return {k: sum(M.degree(i) for M, i in zip(self.factors, k)) for k in self.vector}


def act_on_tensor(elements, t):
    """Leibniz action sum_i 1 (x) ... (x) u_i (x) ... (x) 1 on a tensor state."""
    if len(elements) != len(t.factors):
        raise DomainError("one element per tensor factor is required")
    out = {}
    for key, c in t.vector.items():
        for slot, (x, M) in enumerate(zip(elements, t.factors)):
            if not x.terms:
                continue
            img = lv_act_state(x, M, {key[slot]: Fraction(1)})
            for u, cu in img.items():
                nk = key[:slot] + (u,) + key[slot + 1:]
                out[nk] = out.get(nk, 0) + c * cu
    return TensorState(list(t.factors), {k: v for k, v in out.items() if v})
