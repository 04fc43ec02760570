"""Truncated vertex operator algebras and modules.

An instance is the finite piece of degrees 0..N of a graded space together
with partial mode maps. A mode A_(i) is only available on source degrees
whose image stays inside the truncation; anything else raises
:class:`InsufficientTruncation` instead of being silently zero-padded.
"""

from dataclasses import dataclass
from fractions import Fraction

from ..errors import DomainError, InsufficientTruncation
from ..kernel.scalars import to_q
from ..kernel.sparse import SparseMatrix
from .reps import (FockRep, ModeEngine, SimpleQuotientRep, VermaRep, VirasoroVacuumRep,
                   heisenberg_split, virasoro_split)


class TruncatedGradedSpace:
    """Basis vectors with names and degrees in [0, max_degree]."""

    def __init__(self, max_degree, basis):
        self.max_degree = max_degree
        self.names = tuple(n for n, _ in basis)
        self.degrees = tuple(d for _, d in basis)
        if len(set(self.names)) != len(self.names):
            raise ValueError("basis names must be unique")
        for d in self.degrees:
            if not 0 <= d <= max_degree:
                raise ValueError(f"degree {d} outside [0, {max_degree}]")
        self._index = {n: i for i, n in enumerate(self.names)}
        self.degree_index = {}
        for i, d in enumerate(self.degrees):
            self.degree_index.setdefault(d, []).append(i)
        self.degree_index = {d: tuple(v) for d, v in self.degree_index.items()}

    @property
    def dim(self):
        return len(self.names)

    def __len__(self):
        return len(self.names)

    def index(self, name):
        return self._index[name]

    def graded_dims(self):
        return tuple(len(self.degree_index.get(d, ())) for d in range(self.max_degree + 1))

    def positions(self, d):
        return self.degree_index.get(d, ())


@dataclass(frozen=True)
class PartialMap:
    """A mode restricted to the source degrees where it is fully known."""

    matrix: SparseMatrix
    source_degrees: tuple
    shift: int

    def apply(self, vec):
        return self.matrix.apply(vec)


def _homogeneous_parts(inst, vec):
    parts = {}
    for a, c in vec.items():
        if c:
            parts.setdefault(inst.degrees_of_parent[a], {})[a] = c
    return parts


class _Truncation:
    """Shared behaviour of truncated VOAs and modules."""

    kind = None

    def _setup(self, tag, params, N, rep, keys, engine):
        self.tag = tag
        self.params = dict(params)
        self.N = N
        self.rep = rep
        self.keys = tuple(keys)
        self.key_index = {k: i for i, k in enumerate(self.keys)}
        self.space = TruncatedGradedSpace(N, [(rep.name(k), rep.degree(k)) for k in self.keys])
        self.engine = engine
        self._columns = {}

    # subclasses provide ``parent``
    @property
    def degrees_of_parent(self):
        return self.parent.space.degrees

    @property
    def dim(self):
        return self.space.dim

    def degree(self, idx):
        return self.space.degrees[idx]

    def _target_degree(self, a_idx, i, v_idx):
        return self.degree(v_idx) + self.parent.degree(a_idx) - i - 1

    def mode_column(self, a_idx, i, v_idx):
        """A_(i) v for basis elements, as ``{basis index: coefficient}``."""
        ck = (a_idx, i, v_idx)
        hit = self._columns.get(ck)
        if hit is not None:
            return hit
        tgt = self._target_degree(a_idx, i, v_idx)
        if tgt < 0:
            out = {}
        elif tgt > self.N:
            raise InsufficientTruncation(
                f"{self.parent.space.names[a_idx]}_({i}) on {self.space.names[v_idx]} lands in degree "
                f"{tgt} > N = {self.N}", needed=tgt)
        else:
            raw = self.engine.mode(self.parent.keys[a_idx], i, self.keys[v_idx])
            out = {self.key_index[k]: c for k, c in raw.items()}
        self._columns[ck] = out
        return out

    def mode_keys(self, akeys, i, v_idx):
        """Mode of an untruncated parent state given as ``{parent key: coeff}``."""
        out = {}
        vkey = self.keys[v_idx]
        for a, ca in akeys.items():
            tgt = self.degree(v_idx) + self.parent.rep.degree(a) - i - 1
            if tgt < 0:
                continue
            if tgt > self.N:
                raise InsufficientTruncation(f"image degree {tgt} > N = {self.N}", needed=tgt)
            for k, c in self.engine.mode(a, i, vkey).items():
                j = self.key_index[k]
                out[j] = out.get(j, 0) + ca * c
        return {j: c for j, c in out.items() if c}

    def mode_state(self, astate, i, vstate):
        """Bilinear A_(i) v on sparse vectors; coefficients may lie in any ring."""
        out = {}
        for a, ca in astate.items():
            for v, cv in vstate.items():
                for u, cu in self.mode_column(a, i, v).items():
                    term = cv * (ca * cu)
                    prev = out.get(u)
                    out[u] = term if prev is None else prev + term
        return {u: c for u, c in out.items() if not _is_zero(c)}

    def valid_sources(self, a_degree, i):
        return tuple(s for s in range(self.N + 1) if s + a_degree - i - 1 <= self.N)

    def vertex_mode(self, A, i):
        """Sparse matrix of A_(i) on the source degrees where it is known."""
        vec = self.parent.as_vector(A)
        parts = _homogeneous_parts(self, vec)
        sources = set(range(self.N + 1))
        for d in parts:
            sources &= set(self.valid_sources(d, i))
        if not sources:
            needed = max(d - i - 1 for d in parts) if parts else 0
            raise InsufficientTruncation(
                f"mode {i} of a degree-{max(parts)} element has no source degree inside N = {self.N}",
                needed=needed)
        columns = {}
        for s in sorted(sources):
            for v in self.space.positions(s):
                col = {}
                for a, ca in vec.items():
                    for u, cu in self.mode_column(a, i, v).items():
                        col[u] = col.get(u, 0) + ca * cu
                columns[v] = col
        entries = {(u, v): c for v, col in columns.items() for u, c in col.items()}
        shift = (max(parts) - i - 1) if len(parts) == 1 else None
        return PartialMap(SparseMatrix(self.dim, self.dim, entries), tuple(sorted(sources)), shift)

    def mode_table_entries(self):
        """Every populated (A, i, v) column inside the validity window."""
        P = self.parent
        for a in range(P.dim):
            da = P.degree(a)
            for v in range(self.dim):
                dv = self.degree(v)
                for i in range(da + dv - 1 - self.N, da + dv):
                    yield a, i, v, self.mode_column(a, i, v)

    def prefill(self, columns):
        self._columns.update(columns)


def _is_zero(c):
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c.is_zero()


class VOAInstance(_Truncation):
    """(V, |0>, omega, Y) truncated at degree N."""

    kind = "voa"

    def __init__(self, tag, params, N, rep, split, conformal_vector, central_charge):
        keys = [k for d in range(N + 1) for k in rep.basis(d)]
        super()._setup(tag, params, N, rep, keys, ModeEngine(rep, rep, split))
        self.split = split
        self.parent = self
        self.central_charge = Fraction(central_charge)
        if len(self.space.positions(0)) != 1:
            raise DomainError("V_0 must be one-dimensional (CFT type)")
        self.vacuum = self.space.positions(0)[0]
        self.conformal_vector = {self.key_index[k]: Fraction(c) for k, c in conformal_vector.items()}
        self.conformal_keys = dict(conformal_vector)

    def as_vector(self, A):
        if isinstance(A, dict):
            return {int(k): to_q(v) for k, v in A.items() if v}
        if isinstance(A, str):
            return {self.space.index(A): Fraction(1)}
        return {int(A): Fraction(1)}

    def element(self, name):
        return self.space.index(name)

    def product_keys(self, a_idx, k, b_idx):
        """A_(k) B as an untruncated state (parent keys), any degree."""
        return dict(self.engine.mode(self.keys[a_idx], k, self.keys[b_idx]))

    def header(self):
        return {"kind": self.kind, "tag": self.tag,
                "params": {k: str(v) for k, v in sorted(self.params.items())}, "N": self.N}

    def __repr__(self):
        return f"VOAInstance({self.tag}, {self.params}, N={self.N}, dims={self.space.graded_dims()})"


class ModuleInstance(_Truncation):
    """A truncated admissible module over a truncated VOA."""

    kind = "module"

    def __init__(self, parent, tag, params, N, rep, conformal_dimension, simple, keys=None):
        if keys is None:
            keys = [k for d in range(N + 1) for k in rep.basis(d)]
        super()._setup(tag, params, N, rep, keys, ModeEngine(parent.rep, rep, parent.split))
        self.parent = parent
        self.conformal_dimension = None if conformal_dimension is None else Fraction(conformal_dimension)
        self.simple = simple

    def header(self):
        return {"kind": self.kind, "tag": self.tag,
                "params": {k: str(v) for k, v in sorted(self.params.items())}, "N": self.N,
                "parent": self.parent.header()}

    def __repr__(self):
        return f"ModuleInstance({self.tag}, {self.params}, N={self.N}, dims={self.space.graded_dims()})"


def build_heisenberg(N):
    """Rank-one Heisenberg vertex algebra, omega = 1/2 b_{-1}^2 |0>, c = 1."""
    if N < 2:
        raise DomainError("truncation degree must be at least 2")
    return VOAInstance("heisenberg", {}, N, FockRep(0, "|0>"), heisenberg_split,
                       {(1, 1): Fraction(1, 2)}, 1)


def build_virasoro(c, N):
    """Universal Virasoro vertex algebra of central charge c, omega = L_{-2}|0>."""
    if N < 2:
        raise DomainError("truncation degree must be at least 2")
    c = to_q(c)
    return VOAInstance("virasoro", {"c": c}, N, VirasoroVacuumRep(c), virasoro_split, {(2,): 1}, c)


def build_fock(lam, N, parent=None):
    """Fock module F_lambda: b_(0) v = lambda v, b_(i) v = 0 for i > 0."""
    lam = to_q(lam)
    if parent is None:
        parent = build_heisenberg(max(N, 2))
    if parent.tag != "heisenberg":
        raise DomainError("Fock modules need the Heisenberg vertex algebra")
    return ModuleInstance(parent, "fock", {"lambda": lam}, N, FockRep(lam), lam ** 2 / 2, True)


def build_verma(c, h, N, parent=None):
    """Verma module M(c, h) with PBW basis L_{-k1}...L_{-km} v_h, k_i >= 1."""
    c, h = to_q(c), to_q(h)
    if parent is None:
        parent = build_virasoro(c, max(N, 2))
    if parent.tag != "virasoro" or parent.central_charge != c:
        raise DomainError("Verma module needs a Virasoro parent with matching central charge")
    return ModuleInstance(parent, "verma", {"c": c, "h": h}, N, VermaRep(c, h), h, False)


def simple_quotient(M):
    """Quotient of a Verma module by the radical of its contravariant form."""
    if M.tag != "verma":
        raise DomainError("simple_quotient expects a Verma module")
    rep = SimpleQuotientRep(M.rep)
    return ModuleInstance(M.parent, "simple", dict(M.params), M.N, rep, M.params["h"], True)


def build_simple(c, h, N, parent=None):
    return simple_quotient(build_verma(c, h, N, parent))


def voa_as_module(V, N=None):
    """V regarded as a module over itself (the vacuum module)."""
    N = V.N if N is None else N
    simple = V.tag == "heisenberg"
    return ModuleInstance(V, "vacuum", {}, N, V.rep, 0, simple)
