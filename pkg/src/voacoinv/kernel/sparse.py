"""Sparse matrices over Q and exact elimination.

Vectors are plain ``dict`` objects mapping column index -> nonzero scalar.
Elimination uses a Markowitz-style pivot choice (shortest remaining row,
then the column in it with the fewest entries) to limit fill-in.
"""

import heapq
from fractions import Fraction

from gmpy2 import mpq

from ..errors import DimensionError


def _fast(v):
    """Internal scalar type for elimination (GMP rationals)."""
    return v if type(v) is _MPQ else mpq(v.numerator, v.denominator) if isinstance(v, Fraction) else mpq(v)


def _slow(v):
    """Back to the public scalar type."""
    return Fraction(int(v.numerator), int(v.denominator))


_MPQ = type(mpq(0))


class SparseMatrix:
    """Immutable ``rows x cols`` matrix with only nonzero entries stored."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, rows, cols, entries=None):
        if rows < 0 or cols < 0:
            raise DimensionError("negative shape")
        clean = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise DimensionError(f"entry ({r}, {c}) outside {rows}x{cols}")
            if v:
                clean[(r, c)] = Fraction(v)
        self.rows = rows
        self.cols = cols
        self._entries = clean

    @classmethod
    def from_dense(cls, data):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        entries = {}
        for r, row in enumerate(data):
            if len(row) != cols:
                raise DimensionError("ragged dense matrix")
            for c, v in enumerate(row):
                if v:
                    entries[(r, c)] = v
        return cls(rows, cols, entries)

    @classmethod
    def from_columns(cls, rows, columns):
        """Build from a list of column dicts (row index -> value)."""
        entries = {}
        for c, col in enumerate(columns):
            for r, v in col.items():
                entries[(r, c)] = v
        return cls(rows, len(columns), entries)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @property
    def entries(self):
        return dict(self._entries)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, rc):
        return self._entries.get(rc, Fraction(0))

    def nnz(self):
        return len(self._entries)

    def row_dicts(self):
        out = [dict() for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def column(self, c):
        return {r: v for (r, cc), v in self._entries.items() if cc == c}

    def to_dense(self):
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def transpose(self):
        return SparseMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self._entries.items()})

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self._entries.items())))

    def __add__(self, other):
        _same_shape(self, other)
        acc = dict(self._entries)
        for k, v in other._entries.items():
            acc[k] = acc.get(k, 0) + v
        return SparseMatrix(self.rows, self.cols, acc)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, a):
        return SparseMatrix(self.rows, self.cols, {k: a * v for k, v in self._entries.items()})

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        right = other.row_dicts()
        acc = {}
        for (r, k), v in self._entries.items():
            for c, w in right[k].items():
                acc[(r, c)] = acc.get((r, c), 0) + v * w
        return SparseMatrix(self.rows, other.cols, acc)

    def apply(self, vec):
        """Matrix times a sparse column vector (dict)."""
        out = {}
        for (r, c), v in self._entries.items():
            x = vec.get(c)
            if x:
                out[r] = out.get(r, 0) + v * x
        return {r: v for r, v in out.items() if v}

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self._entries)})"


def _same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")


def _axpy(target, alpha, source):
    """target += alpha * source, dropping cancellations, in place."""
    for c, v in source.items():
        nv = target.get(c, 0) + alpha * v
        if nv:
            target[c] = nv
        else:
            target.pop(c, None)


def _markowitz_echelon(rows):
    """Row-reduce a list of sparse rows.

    Returns ``(pivots, echelon)`` where ``echelon`` maps pivot column -> row
    normalized to 1 at the pivot. Rows are not back-substituted.
    """
    live = {i: {c: _fast(v) for c, v in r.items() if v} for i, r in enumerate(rows) if r}
    colrows = {}
    for i, r in live.items():
        for c in r:
            colrows.setdefault(c, set()).add(i)
    echelon = {}
    order = []
    while live:
        i = min(live, key=lambda k: (len(live[k]), k))
        row = live.pop(i)
        for c in row:
            colrows[c].discard(i)
        pc = min(row, key=lambda c: (len(colrows.get(c, ())), c))
        inv = 1 / row[pc]
        prow = {c: v * inv for c, v in row.items()}
        echelon[pc] = prow
        order.append(pc)
        for j in list(colrows.get(pc, ())):
            other = live[j]
            before = set(other)
            _axpy(other, -other[pc], prow)
            after = set(other)
            for c in before - after:
                colrows[c].discard(j)
            for c in after - before:
                colrows.setdefault(c, set()).add(j)
            if not other:
                del live[j]
    return order, echelon


def rank(m):
    """Rank over Q of a SparseMatrix."""
    order, _ = _markowitz_echelon(m.row_dicts())
    return len(order)


def rref(m):
    """Reduced row echelon form as ``(pivot_columns, rows)``, pivots ascending."""
    order, echelon = _markowitz_echelon(m.row_dicts())
    pivots = sorted(order)
    # back-substitute so that each pivot column appears in exactly one row
    for pc in pivots:
        prow = echelon[pc]
        for qc in pivots:
            if qc != pc:
                other = echelon[qc]
                x = other.get(pc)
                if x:
                    _axpy(other, -x, prow)
    return pivots, [{c: _slow(v) for c, v in echelon[pc].items()} for pc in pivots]


def kernel_basis(m):
    """A Q-basis of the right kernel of ``m`` as a list of dict vectors."""
    pivots, rows = rref(m)
    pivset = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivset:
            continue
        vec = {free: Fraction(1)}
        for pc, row in zip(pivots, rows):
            x = row.get(free)
            if x:
                vec[pc] = -x
        basis.append(vec)
    return basis


def quotient_dimension(ambient_dim, spanning):
    """dim(Q^ambient_dim / span(spanning)); vectors are dicts or sequences."""
    rows = []
    for v in spanning:
        if isinstance(v, dict):
            if any(not (0 <= k < ambient_dim) for k in v):
                raise DimensionError("vector index outside ambient dimension")
            rows.append({k: Fraction(x) for k, x in v.items() if x})
        else:
            if len(v) != ambient_dim:
                raise DimensionError(f"vector of length {len(v)} in ambient {ambient_dim}")
            rows.append({k: Fraction(x) for k, x in enumerate(v) if x})
    return ambient_dim - rank(SparseMatrix.from_columns(ambient_dim, rows).transpose()) if rows else ambient_dim


class EchelonBasis:
    """Streaming reduced row-echelon structure for incremental rank computation.

    Vectors are inserted one at a time. Stored rows are kept fully reduced
    (each pivot column is zero in every other stored row), so reducing a
    vector is a single pass over the pivot columns it touches. Memory is
    bounded by the ambient dimension rather than by the number of inserted
    vectors. Not thread safe: callers serialize insertions.
    """

    def __init__(self, dim):
        self.dim = dim
        self._rows = {}      # pivot column -> row normalized at the pivot

    @property
    def rank(self):
        return len(self._rows)

    def is_full(self):
        return len(self._rows) == self.dim

    def reduce(self, vec):
        """Return the reduction of ``vec`` modulo the stored span."""
        return {c: _slow(v) for c, v in self._reduce(vec).items()}

    def _reduce(self, vec):
        work = {c: _fast(v) for c, v in vec.items() if v}
        rows = self._rows
        for c in [c for c in work if c in rows]:
            x = work.pop(c)
            for cc, v in rows[c].items():
                if cc == c:
                    continue
                nv = work.get(cc, 0) - x * v
                if nv:
                    work[cc] = nv
                else:
                    del work[cc]
        return work

    def insert(self, vec):
        """Insert ``vec``; return True when it enlarged the span."""
        red = self._reduce(vec)
        if not red:
            return False
        pc = min(red, key=lambda c: (abs(red[c].numerator) + red[c].denominator, c))
        inv = 1 / red[pc]
        new = {c: v * inv for c, v in red.items()}
        for row in self._rows.values():
            x = row.get(pc)
            if x:
                for cc, v in new.items():
                    nv = row.get(cc, 0) - x * v
                    if nv:
                        row[cc] = nv
                    else:
                        del row[cc]
        self._rows[pc] = new
        return True

    def contains(self, vec):
        return not self._reduce(vec)

    def basis(self):
        """The stored rows as ``{pivot: row}`` with Fraction entries."""
        return {pc: {c: _slow(v) for c, v in row.items()} for pc, row in self._rows.items()}


def rref_ordered(rows, column_order):
    """Leftmost-pivot reduced echelon form under a given column order.

    Returns ``{pivot: row}`` with each row normalized at its pivot and
    every other pivot column eliminated from it. Used where the caller
    needs control over which coordinates become pivots.
    """
    rank_of = {c: k for k, c in enumerate(column_order)}
    done = {}
    for row in rows:
        work = {c: Fraction(v) for c, v in row.items() if v}
        for pc in sorted((c for c in work if c in done), key=rank_of.__getitem__):
            x = work.get(pc)
            if x:
                _axpy(work, -x, done[pc])
        if not work:
            continue
        pc = min(work, key=rank_of.__getitem__)
        inv = 1 / work[pc]
        prow = {c: v * inv for c, v in work.items()}
        for qc, other in done.items():
            x = other.get(pc)
            if x:
                _axpy(other, -x, prow)
        done[pc] = prow
    return done
