"""Untruncated highest-weight modules generated by a single field.

Each representation knows how the modes of its generating field act on
basis monomials exactly (no truncation): the Heisenberg field b(z) on Fock
spaces and the Virasoro field on Verma modules and their quotients.
Modes of arbitrary vertex-algebra states are then obtained by recursive
normal ordering (:class:`ModeEngine`).

State vectors are dicts ``key -> coefficient`` where keys are tuples of
positive integers sorted in non-increasing order:

* Fock:   (n1, ..., nk) stands for b_{-n1} ... b_{-nk} v_lambda
* Verma:  (k1, ..., km) stands for L_{-k1} ... L_{-km} v_h
"""

from fractions import Fraction

from ..kernel.scalars import binom
from ..kernel.sparse import SparseMatrix, kernel_basis, rref_ordered


def partitions(n, max_part=None, min_part=1):
    """Partitions of n into parts in [min_part, max_part], largest first."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), min_part - 1, -1):
        for rest in partitions(n - first, first, min_part):
            yield (first,) + rest


def add_into(acc, key, c):
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


class FockRep:
    """Fock module F_lambda of the rank-one Heisenberg algebra."""

    gen_degree = 1
    field = "b"

    def __init__(self, lam, vacuum_symbol="v"):
        self.lam = Fraction(lam)
        self.vacuum_symbol = vacuum_symbol
        self.weight = self.lam ** 2 / 2
        self._cache = {}

    def degree(self, key):
        return sum(key)

    def basis(self, d):
        return list(partitions(d))

    def name(self, key):
        return "".join(f"b[-{n}]" for n in key) + self.vacuum_symbol

    def gen(self, n, key):
        """b_(n) applied to the monomial ``key``."""
        ck = (n, key)
        hit = self._cache.get(ck)
        if hit is not None:
            return hit
        if n < 0:
            out = {tuple(sorted(key + (-n,), reverse=True)): Fraction(1)}
        elif n == 0:
            out = {key: self.lam} if self.lam else {}
        else:
            m = key.count(n)
            if m:
                k = list(key)
                k.remove(n)
                out = {tuple(k): Fraction(n * m)}
            else:
                out = {}
        self._cache[ck] = out
        return out


class VermaRep:
    """Verma module M(c, h) over the Virasoro algebra, PBW basis."""

    gen_degree = 2
    field = "L"

    def __init__(self, c, h):
        self.c = Fraction(c)
        self.h = Fraction(h)
        self.weight = self.h
        self._cache = {}

    def degree(self, key):
        return sum(key)

    def basis(self, d):
        return list(partitions(d))

    def name(self, key):
        return "".join(f"L[-{k}]" for k in key) + "v"

    def L(self, m, key):
        """L_m applied to L_{-k1}...L_{-km} v_h, result in PBW basis."""
        ck = (m, key)
        hit = self._cache.get(ck)
        if hit is not None:
            return hit
        if not key:
            if m > 0:
                out = {}
            elif m == 0:
                out = {(): self.h} if self.h else {}
            else:
                out = {(-m,): Fraction(1)}
        elif m < 0 and -m >= key[0]:
            out = {(-m,) + key: Fraction(1)}
        else:
            k1, rest = key[0], key[1:]
            out = {}
            # L_m L_{-k1} = L_{-k1} L_m + (m + k1) L_{m-k1} + central term
            for k2, c2 in self.L(m, rest).items():
                for k3, c3 in self.L(-k1, k2).items():
                    add_into(out, k3, c2 * c3)
            if m + k1:
                for k2, c2 in self.L(m - k1, rest).items():
                    add_into(out, k2, (m + k1) * c2)
            if m == k1:
                add_into(out, rest, self.c * (m ** 3 - m) / 12)
        self._cache[ck] = out
        return out

    def gen(self, n, key):
        """omega_(n) = L_{n-1}."""
        return self.L(n - 1, key)

    def gram(self, d, keys=None):
        """Shapovalov (contravariant) form on degree d, normalized <v_h, v_h> = 1."""
        keys = self.basis(d) if keys is None else keys
        size = len(keys)
        rows = []
        for x in keys:
            row = {}
            for j, y in enumerate(keys):
                state = {y: Fraction(1)}
                for k in x:
                    nxt = {}
                    for key, cc in state.items():
                        for k2, c2 in self.L(k, key).items():
                            add_into(nxt, k2, cc * c2)
                    state = nxt
                val = state.get((), 0)
                if val:
                    row[j] = val
            rows.append(row)
        return SparseMatrix(size, size, {(i, j): v for i, r in enumerate(rows) for j, v in r.items()})


class _ReducedRep:
    """Common machinery for quotients of a Verma module by a submodule."""

    gen_degree = 2
    field = "L"

    def __init__(self, verma):
        self.verma = verma
        self.c = verma.c
        self.h = verma.h
        self.weight = verma.h
        self._cache = {}

    def degree(self, key):
        return sum(key)

    def name(self, key):
        return self.verma.name(key)

    def reduce(self, state):
        raise NotImplementedError

    def gen(self, n, key):
        ck = (n, key)
        hit = self._cache.get(ck)
        if hit is None:
            hit = self.reduce(self.verma.gen(n, key))
            self._cache[ck] = hit
        return hit


class VirasoroVacuumRep(_ReducedRep):
    """Universal Virasoro vertex algebra M(c, 0) / <L_{-1} v_0>.

    PBW monomials L_{-k1}...L_{-km}|0>, k1 >= ... >= km >= 2, form a basis;
    the submodule generated by L_{-1}|0> is spanned by monomials ending in 1.
    """

    def __init__(self, c):
        super().__init__(VermaRep(c, 0))

    def basis(self, d):
        return list(partitions(d, min_part=2))

    def name(self, key):
        return "".join(f"L[-{k}]" for k in key) + "|0>"

    def reduce(self, state):
        return {k: v for k, v in state.items() if not k or k[-1] != 1}


class SimpleQuotientRep(_ReducedRep):
    """Verma module modulo the radical of its contravariant form.

    The radical is computed degree by degree (lazily, at any degree) from
    exact Gram-matrix kernels. Within each degree the monomials with more
    factors are preferred as pivots, so the surviving basis favors monomials
    with large parts.
    """

    def __init__(self, verma):
        super().__init__(verma)
        self._levels = {}

    def _level(self, d):
        lvl = self._levels.get(d)
        if lvl is None:
            keys = self.verma.basis(d)
            order = sorted(keys, key=lambda k: (-len(k), k))
            g = self.verma.gram(d, keys)
            kern = kernel_basis(g)
            rows = [{keys[i]: v for i, v in vec.items()} for vec in kern]
            piv = rref_ordered(rows, order)
            rewrite = {}
            for p, row in piv.items():
                rewrite[p] = {k: -v for k, v in row.items() if k != p}
            survivors = [k for k in keys if k not in piv]
            lvl = (survivors, rewrite)
            self._levels[d] = lvl
        return lvl

    def basis(self, d):
        return list(self._level(d)[0])

    def radical_dimension(self, d):
        return len(self._level(d)[1])

    def reduce(self, state):
        out = {}
        for k, v in state.items():
            rewrite = self._level(sum(k))[1]
            if k in rewrite:
                for k2, v2 in rewrite[k].items():
                    add_into(out, k2, v * v2)
            else:
                add_into(out, k, v)
        return out


class ModeEngine:
    """Modes A_(q) of vertex-algebra states acting on a module, exactly.

    ``voa`` is the representation underlying the vertex algebra itself
    (its keys are the states A); ``split`` writes a nonvacuum key as
    g_(p) B for the generating field g. The iterate formula

        (g_(p) B)_(q) = sum_k (-1)^k C(p,k) [ g_(p-k) B_(q+k)
                                             - (-1)^p B_(p+q-k) g_(k) ]

    reduces everything to generator modes; every sum is finite on a fixed
    vector because modes lowering below degree 0 vanish.
    """

    def __init__(self, voa, module, split):
        self.voa = voa
        self.module = module
        self.split = split
        self.gdeg = module.gen_degree
        self._cache = {}

    def mode(self, akey, q, vkey):
        ck = (akey, q, vkey)
        hit = self._cache.get(ck)
        if hit is not None:
            return hit
        out = self._compute(akey, q, vkey)
        self._cache[ck] = out
        return out

    def _compute(self, akey, q, vkey):
        if not akey:
            return {vkey: Fraction(1)} if q == -1 else {}
        dv = self.module.degree(vkey)
        da = self.voa.degree(akey)
        if dv + da - q - 1 < 0:
            return {}
        p, bkey = self.split(akey)
        gen = self.module.gen
        if not bkey and p == -1:
            return dict(gen(q, vkey))
        db = self.voa.degree(bkey)
        out = {}
        k = 0
        while q + k <= db + dv - 1:
            ck = (-1) ** k * binom(p, k)
            if ck:
                for w, cw in self.mode(bkey, q + k, vkey).items():
                    for u, cu in gen(p - k, w).items():
                        add_into(out, u, ck * cw * cu)
            k += 1
        sign = -((-1) ** (p % 2))
        k = 0
        while dv + self.gdeg - k - 1 >= 0:
            ck = sign * (-1) ** k * binom(p, k)
            if ck:
                for w, cw in gen(k, vkey).items():
                    for u, cu in self.mode(bkey, p + q - k, w).items():
                        add_into(out, u, ck * cw * cu)
            k += 1
        return out

    def apply(self, astate, q, vstate):
        """Bilinear extension to state dicts (coefficients may be any ring)."""
        out = {}
        for a, ca in astate.items():
            for v, cv in vstate.items():
                for u, cu in self.mode(a, q, v).items():
                    term = cv * (ca * cu)
                    prev = out.get(u)
                    out[u] = term if prev is None else prev + term
        return {u: c for u, c in out.items() if not _is_zero(c)}


def _is_zero(c):
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c.is_zero()


def heisenberg_split(key):
    return -key[0], key[1:]


def virasoro_split(key):
    return 1 - key[0], key[1:]
