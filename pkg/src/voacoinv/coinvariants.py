"""Truncated spaces of coinvariants on n-pointed genus-zero curves.

The ambient space is the part of M^1 (x) ... (x) M^n of total degree at most
D. Relations come from the sections A (x) f(z) dz (A a basis vector of V of
degree <= K, f in {(z - p_j)^(-m) : m <= M} u {z^m : m <= M}): each section
is expanded at every marked point and acts on a tensor basis vector by the
Leibniz rule. A relation is used only when it stays inside the ambient
space: for a section g let R_g be the largest degree raise deg B - i - 1 over
its expanded terms B_[i]; the pair (g, v) contributes iff deg v + R_g <= D.

When infinity is not marked the admissible sections are the combinations of
family members that are regular at infinity; they are computed as a kernel,
separately for each remaining degree budget.
"""

import time
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from gmpy2 import mpq

from .chiral import ChiralSection, as_rational, expansion_at, infinity_terms
from .errors import DomainError, InsufficientTruncation
from .kernel.rational import INFINITY, RationalFunction, expand_rational_at, parse_point, point_str
from .kernel.sparse import EchelonBasis, SparseMatrix, kernel_basis


@dataclass
class CoinvariantProblem:
    voa: object
    modules: list
    points: list
    D: int
    M: int = 6
    K: int = 6

    def __post_init__(self):
        self.points = [parse_point(p) for p in self.points]
        if not self.modules:
            raise DomainError("at least one marked point is required")
        if len(self.modules) != len(self.points):
            raise DomainError("one module per marked point is required")
        if len(set(self.points)) != len(self.points):
            raise DomainError("marked points must be distinct")
        if self.D < 0 or self.M < 1 or self.K < 0:
            raise DomainError("caps must be positive (D >= 0, M >= 1, K >= 0)")
        for Mi in self.modules:
            if Mi.parent is not self.voa:
                raise DomainError("all modules must be over the same vertex algebra instance")
            if Mi.N < self.D:
                raise InsufficientTruncation(
                    f"module {Mi.tag} truncated at N = {Mi.N} < D = {self.D}", needed=self.D)
        if self.voa.N < self.K:
            raise InsufficientTruncation(
                f"vertex algebra truncated at N = {self.voa.N} < K = {self.K}", needed=self.K)

    def with_caps(self, D=None, M=None, K=None):
        return CoinvariantProblem(self.voa, list(self.modules), list(self.points),
                                  self.D if D is None else D, self.M if M is None else M,
                                  self.K if K is None else K)


@dataclass
class CoinvariantReport:
    dimension: int
    ambient: int
    relation_rank: int
    caps: dict
    stabilization: list = field(default_factory=list)
    stabilized: bool = False
    witness_count: int = 0
    wall_time_ms: int = 0

    def to_json(self):
        return {"dimension": self.dimension, "ambient": self.ambient,
                "relation_rank": self.relation_rank, "caps": dict(self.caps),
                "stabilization": [dict(e) for e in self.stabilization],
                "stabilized": self.stabilized, "witness_count": self.witness_count,
                "wall_time_ms": self.wall_time_ms}


# -- ambient space ----------------------------------------------------------

def ambient_basis(modules, D):
    """Tensor basis keys of total degree <= D, ordered by degree then lexicographically."""
    by_deg = [[[v for v in Mi.space.positions(d)] for d in range(D + 1)] for Mi in modules]
    keys = []
    for total in range(D + 1):
        for degs in _compositions(total, len(modules)):
            parts = [by_deg[j][d] for j, d in enumerate(degs)]
            keys.extend(product(*parts))
    return keys


def _compositions(total, n):
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, n - 1):
            yield (first,) + rest


# -- generators ----------------------------------------------------------------

def generating_functions(points, M):
    """(label, f) for the pole/degree family; labels are stable strings."""
    out = []
    for p in points:
        if p is INFINITY:
            continue
        for m in range(1, M + 1):
            out.append((f"(z-{p})^-{m}", RationalFunction.pole(p, m)))
    for m in range(0, M + 1):
        out.append((f"z^{m}", RationalFunction.z_power(m)))
    return out


class _Generator:
    """One section A (x) f dz with its expansions at the marked points."""

    __slots__ = ("a", "label", "f", "order", "expansions", "raise_", "infinity_principal")

    def __init__(self, V, a, label, f, points, order, expansions=None, principal=None):
        self.a = a
        self.label = label
        self.f = f
        self.order = order
        avec = {a: Fraction(1)}
        if expansions is None:
            expansions = [{k: _mpq(c) for k, c in _expand(V, avec, f, p, order).items()}
                          for p in points]
        self.expansions = expansions
        raise_ = None
        for x in expansions:
            for (b, i) in x:
                r = V.degree(b) - i - 1
                raise_ = r if raise_ is None else max(raise_, r)
        self.raise_ = -1 if raise_ is None else raise_
        self.infinity_principal = principal
        if principal is not None:
            return
        if INFINITY not in points:
            pp = {}
            for (b, i), c in _expand(V, avec, f, INFINITY, -1).items():
                if i < 0:
                    pp[(b, i)] = c
            self.infinity_principal = pp

    def truncated(self, V, points, order):
        """The same section expanded only through ``order`` (<= self.order)."""
        exps = [{(b, i): c for (b, i), c in x.items() if i <= order} for x in self.expansions]
        return _Generator(V, self.a, self.label, self.f, points, order, exps, self.infinity_principal)


# generators depend only on (V, points); share them across engines and modules
_GENERATORS = weakref.WeakKeyDictionary()


_SERIES_CACHE = {}


def _local_series(f, p, order):
    key = (f.num, f.den, p, order)
    ser = _SERIES_CACHE.get(key)
    if ser is None:
        ser = _SERIES_CACHE[key] = expand_rational_at(f, p, order, "t")
    return ser


def _expand(V, avec, f, p, order):
    """Expansion of A (x) f dz at p as {(b, i): coeff}, indices <= order."""
    acc = {}
    if p is INFINITY:
        for state, e, sign in infinity_terms(V, avec):
            ser = _local_series(f, INFINITY, order - e)
            for j, cf in ser.coeffs.items():
                for b, cb in state.items():
                    key = (b, j + e)
                    acc[key] = acc.get(key, 0) + sign * cf * cb
    else:
        ser = _local_series(f, p, order)
        for j, cf in ser.coeffs.items():
            for b, cb in avec.items():
                key = (b, j)
                acc[key] = acc.get(key, 0) + cf * cb
    return {k: c for k, c in acc.items() if c}


def _mpq(c):
    return mpq(c.numerator, c.denominator)


class _Columns:
    """Mode columns of one module with GMP rational entries (hot-loop copy)."""

    __slots__ = ("M", "cache")

    def __init__(self, M):
        self.M = M
        self.cache = {}

    def __call__(self, b, i, v):
        k = (b, i, v)
        col = self.cache.get(k)
        if col is None:
            col = self.cache[k] = {u: _mpq(c) for u, c in self.M.mode_column(b, i, v).items()}
        return col


def _act(columns, expansions, key):
    """Leibniz action of per-point expansions on one tensor basis key."""
    out = {}
    for slot, (x, col_of) in enumerate(zip(expansions, columns)):
        v = key[slot]
        for (b, i), c in x.items():
            col = col_of(b, i, v)
            for u, cu in col.items():
                nk = key[:slot] + (u,) + key[slot + 1:]
                val = out.get(nk, 0) + c * cu
                if val:
                    out[nk] = val
                else:
                    out.pop(nk, None)
    return out


# -- the engine --------------------------------------------------------------

class CoinvariantEngine:
    """Caches generators and relation vectors across cap variations."""

    def __init__(self, voa, modules, points, threads=1):
        self.V = voa
        self.modules = list(modules)
        self.points = [parse_point(p) for p in points]
        self.threads = max(1, int(threads))
        self._rels = {}
        self._sections = {}
        self._spans = {}
        self._columns = [_Columns(Mi) for Mi in self.modules]
        self.evaluated = 0
        self.consumed = 0

    def generators(self, M, K, order):
        """Generators for caps (M, K), expanded through ``order``."""
        shared = _GENERATORS.setdefault(self.V, {})
        pts = tuple(self.points)
        out = []
        for label, f in generating_functions(self.points, M):
            for d in range(K + 1):
                for a in self.V.space.positions(d):
                    key = (pts, a, label, order)
                    g = shared.get(key)
                    if g is None:
                        top = shared.get((pts, a, label))
                        if top is None or top.order < order:
                            top = _Generator(self.V, a, label, f, self.points, order)
                            shared[(pts, a, label)] = top
                        g = top if top.order == order else top.truncated(self.V, self.points, order)
                        shared[key] = g
                    out.append(g)
        return out

    def relation(self, g, key):
        ck = (g.a, g.label, key)
        r = self._rels.get(ck)
        if r is None:
            r = _act(self._columns, g.expansions, key)
            self._rels[ck] = r
            self.evaluated += 1
        return r

    def _relations_for(self, gens, keys, coeffs=None):
        """Relation vectors (as key dicts) for one admissible section and many keys."""
        out = []
        for key in keys:
            if coeffs is None:
                out.append(self.relation(gens, key))
            else:
                acc = {}
                for g, c in coeffs:
                    for k, val in self.relation(g, key).items():
                        nv = acc.get(k, 0) + c * val
                        if nv:
                            acc[k] = nv
                        else:
                            acc.pop(k, None)
                out.append(acc)
        return out

    def sections(self, gens, budget):
        """Admissible sections with degree raise <= budget.

        Returns a list of either generators (infinity marked) or lists of
        (generator, coefficient) pairs spanning the sections regular at
        infinity.
        """
        usable = [g for g in gens if g.raise_ <= budget]
        if INFINITY in self.points:
            return [(g, None) for g in usable]
        cols = {}
        for j, g in enumerate(usable):
            for k, c in g.infinity_principal.items():
                cols.setdefault(k, {})[j] = c
        rows = sorted(cols)
        mat = SparseMatrix(len(rows), len(usable),
                           {(r, j): c for r, k in enumerate(rows) for j, c in cols[k].items()})
        out = []
        for vec in kernel_basis(mat):
            out.append((None, [(usable[j], _mpq(c)) for j, c in sorted(vec.items())]))
        return out

    def span(self, D, M, K):
        """(keys, index, EchelonBasis of the relation span) for the given caps.

        Results are memoized; callers must not insert into the returned basis.
        """
        memo = self._spans.get((D, M, K))
        if memo is not None:
            self.consumed = memo[3]
            return memo[:3]
        keys = ambient_basis(self.modules, D)
        index = {k: n for n, k in enumerate(keys)}
        ech = EchelonBasis(len(keys))
        order = K + D
        gens = self.generators(M, K, order)
        by_total = {}
        for k in keys:
            by_total.setdefault(sum(Mi.degree(v) for Mi, v in zip(self.modules, k)), []).append(k)
        jobs = []
        for total in sorted(by_total):
            ck = (M, K, order, D - total)
            secs = self._sections.get(ck)
            if secs is None:
                secs = self._sections[ck] = self.sections(gens, D - total)
            for g, combo in secs:
                jobs.append((g, combo, by_total[total]))

        def run(job):
            g, combo, ks = job
            return self._relations_for(g, ks, combo)

        consumed = 0
        if self.threads > 1:
            pool = ThreadPoolExecutor(max_workers=self.threads)
            try:
                for rels in pool.map(run, jobs):
                    done, used = _insert_all(ech, rels, index)
                    consumed += used
                    if done:
                        break
            finally:
                pool.shutdown(wait=True, cancel_futures=True)
        else:
            for job in jobs:
                done, used = _insert_all(ech, run(job), index)
                consumed += used
                if done:
                    break
        self.consumed = consumed
        self._spans[(D, M, K)] = (keys, index, ech, consumed)
        return keys, index, ech

    def dimension(self, D, M, K):
        keys, _, ech = self.span(D, M, K)
        return len(keys) - ech.rank, len(keys), ech.rank


def _insert_all(ech, rels, index):
    """Insert relation vectors in order; returns (full, number consumed)."""
    used = 0
    for r in rels:
        used += 1
        if r:
            ech.insert({index[k]: c for k, c in r.items()})
            if ech.is_full():
                return True, used
    return False, used


def _variants(D, M, K):
    out = [("D", D, M, K)]
    for k in (1, 2):
        if D - k >= 0:
            out.append(("D", D - k, M, K))
        if M - k >= 1:
            out.append(("M", D, M - k, K))
        if K - k >= 0:
            out.append(("K", D, M, K - k))
    return out


def coinvariants_dimension(problem, stabilization=True, threads=1, engine=None):
    """Dimension of the truncated coinvariant space, with its cap table."""
    start = time.perf_counter()
    eng = engine or CoinvariantEngine(problem.voa, problem.modules, problem.points, threads)
    dim, amb, rk = eng.dimension(problem.D, problem.M, problem.K)
    consumed = eng.consumed
    table = [{"D": problem.D, "M": problem.M, "K": problem.K, "dimension": dim}]
    stabilized = False
    if stabilization:
        variants = _variants(problem.D, problem.M, problem.K)[1:]
        for _, d, m, k in variants:
            table.append({"D": d, "M": m, "K": k, "dimension": eng.dimension(d, m, k)[0]})
        stabilized = len(variants) == 6 and all(e["dimension"] == dim for e in table)
    ms = int((time.perf_counter() - start) * 1000)
    return CoinvariantReport(dim, amb, rk, {"D": problem.D, "M": problem.M, "K": problem.K},
                             table, stabilized, consumed, ms)


def propagation_check(problem, q, vacuum_module, stabilization=True, threads=1, base=None):
    """Compare dimensions with and without the vacuum module inserted at q.

    ``base`` may carry an already computed report for ``problem``.
    """
    q = parse_point(q)
    if q in problem.points:
        raise DomainError("the extra point must be distinct from the marked points")
    if len(problem.voa.space.positions(0)) != 1:
        raise DomainError("propagation of vacua needs V_0 one-dimensional")
    if base is None:
        base = coinvariants_dimension(problem, stabilization, threads)
    extended = CoinvariantProblem(problem.voa, list(problem.modules) + [vacuum_module],
                                  list(problem.points) + [q], problem.D, problem.M, problem.K)
    ext = coinvariants_dimension(extended, stabilization, threads)
    return {"passed": base.dimension == ext.dimension, "point": point_str(q),
            "without": base, "with": ext}


# -- vector fields -----------------------------------------------------------

def _vector_field_terms(V, f, p, order):
    """Local expansion of f(z) d/dz at p as omega_[k] coefficients (omega_[k] = L_{k-1})."""
    if p is INFINITY:
        # z = 1/t: f(z) d/dz = -t^2 f(1/t) d/dt
        ser = expand_rational_at(f, INFINITY, order - 2, "t").shift(2).scale(-1)
    else:
        ser = expand_rational_at(f, p, order, "t")
    return ser


def random_vector_field(points, rng, max_pole=2, max_degree=2):
    """A random f with poles only at the marked points and f d/dz regular
    elsewhere (degree <= 2 when infinity is unmarked)."""
    pts = [parse_point(p) for p in points]
    if INFINITY not in pts:
        max_degree = min(max_degree, 2)

    def coeff():
        return Fraction(rng.randint(-6, 6), rng.randint(1, 5))

    f = RationalFunction(tuple(coeff() for _ in range(max_degree + 1)))
    for p in pts:
        if p is INFINITY:
            continue
        for m in range(1, max_pole + 1):
            f = f + RationalFunction.pole(p, m) * RationalFunction.constant(coeff())
    return f


def vector_field_action(problem, f, key, order):
    """Action of the vector field f d/dz on a tensor key through Virasoro modes."""
    V = problem.voa
    out = {}
    for slot, (p, Mi) in enumerate(zip(problem.points, problem.modules)):
        ser = _vector_field_terms(V, f, p, order)
        v = key[slot]
        for k, c in ser.coeffs.items():
            # t^k d/dt  <->  omega_[k] = L_{k-1} = omega_(k)
            for a, ca in V.conformal_vector.items():
                for u, cu in Mi.mode_column(a, k, v).items():
                    nk = key[:slot] + (u,) + key[slot + 1:]
                    out[nk] = out.get(nk, 0) + c * ca * cu
    return {k: c for k, c in out.items() if c}


def vector_field_triviality(problem, f, threads=1, engine=None):
    """Check that f d/dz acts by zero on the truncated coinvariant quotient."""
    f = as_rational(f)
    pts = problem.points
    if not f.poles_within(tuple(pts) + (INFINITY,)):
        raise DomainError("vector field has a pole away from the marked points")
    if INFINITY not in pts and f.order_at(INFINITY) < -2:
        raise DomainError("vector field is not regular at the unmarked point at infinity")
    eng = engine or CoinvariantEngine(problem.voa, problem.modules, problem.points, threads)
    keys, index, ech = eng.span(problem.D, problem.M, problem.K)
    order = problem.K + problem.D
    # degree raise of the vector field action
    raise_ = -1
    for p in pts:
        ser = _vector_field_terms(problem.voa, f, p, order)
        for k in ser.coeffs:
            raise_ = max(raise_, 2 - k - 1)
    checked = 0
    for key in keys:
        total = sum(Mi.degree(v) for Mi, v in zip(problem.modules, key))
        if total + raise_ > problem.D:
            continue
        img = vector_field_action(problem, f, key, order)
        checked += 1
        if not ech.contains({index[k]: c for k, c in img.items()}):
            return {"passed": False, "checked": checked, "witness": list(key)}
    return {"passed": True, "checked": checked, "witness": None}
