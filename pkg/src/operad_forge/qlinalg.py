"""Exact rational sparse linear algebra.

Everything downstream (dimension counts, homology ranks, span membership)
reduces to ranks and kernels of matrices over Q.  All arithmetic uses
`fractions.Fraction`; no floating point anywhere.

Vectors are sparse dicts ``{column_index: Fraction}`` with no stored zeros.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

_DENSE_LIMIT = 64  # below this, plain dense elimination is used for rank()


def _vec_from(seq: Sequence) -> dict[int, Fraction]:
    return {i: Fraction(x) for i, x in enumerate(seq) if x}


def _acc_add(acc: dict[int, Fraction], key: int, val: Fraction) -> None:
    s = acc.get(key, Fraction(0)) + val
    if s:
        acc[key] = s
    elif key in acc:
        del acc[key]


@dataclass(frozen=True)
class SparseMatrix:
    """Immutable sparse matrix over Q in coordinate form."""

    rows: int
    cols: int
    entries: dict[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ValueError(f"entry ({r},{c}) out of range {self.rows}x{self.cols}")
            if v == 0:
                raise ValueError(f"stored zero at ({r},{c})")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "SparseMatrix":
        n = len(rows)
        m = cols if cols is not None else (len(rows[0]) if rows else 0)
        ent = {}
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                if x:
                    ent[(i, j)] = Fraction(x)
        return cls(n, m, ent)

    @classmethod
    def from_columns(cls, columns: Sequence[dict[int, Fraction]], rows: int) -> "SparseMatrix":
        ent = {}
        for j, col in enumerate(columns):
            for i, x in col.items():
                if x:
                    ent[(i, j)] = Fraction(x)
        return cls(rows, len(columns), ent)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols, {})

    def row_vectors(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def column_vectors(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [dict() for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            out[c][r] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows,
                            {(c, r): v for (r, c), v in self.entries.items()})

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        by_col: dict[int, dict[int, Fraction]] = {}
        for (r, c), v in other.entries.items():
            by_col.setdefault(c, {})[r] = v
        by_row: dict[int, dict[int, Fraction]] = {}
        for (r, c), v in self.entries.items():
            by_row.setdefault(r, {})[c] = v
        ent: dict[tuple[int, int], Fraction] = {}
        for j, col in by_col.items():
            acc: dict[int, Fraction] = {}
            for k, x in col.items():
                row = by_row.get(k)
                if not row:
                    continue
                for i, y in row.items():
                    _acc_add(acc, i, x * y)
            for i, s in acc.items():
                ent[(i, j)] = s
        return SparseMatrix(self.rows, other.cols, ent)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self.matmul(other)

    def is_zero(self) -> bool:
        return not self.entries

    def mul_vec(self, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        acc: dict[int, Fraction] = {}
        for (r, c), v in self.entries.items():
            x = vec.get(c)
            if x:
                _acc_add(acc, r, v * x)
        return acc

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out


class EchelonRewriter:
    """Incremental row space kept as a triangular rewrite system.

    Each inserted vector becomes a rule ``lead -> tail`` where ``lead`` is the
    largest index with a nonzero coefficient and ``tail`` involves strictly
    smaller indices; the vector equals ``e_lead - tail`` up to scale.  Tails
    are path-compressed on demand, so long rewrite chains (the typical shape
    of operadic ideal saturation) reduce in amortized near-constant time.
    With maximal leads, the non-lead indices form the greedy smallest-first
    coset basis.

    Invariant: a lead in ``_compressed`` has a tail free of current leads;
    whenever an index with occurrences in stored tails becomes a lead, the
    affected rules are un-marked (single step suffices, see ``insert``).
    """

    def __init__(self):
        self.rules: dict[int, dict[int, Fraction]] = {}
        self._compressed: set[int] = set()
        self._occ: dict[int, set[int]] = {}

    @property
    def rank(self) -> int:
        return len(self.rules)

    def _store(self, lead: int, tail: dict[int, Fraction], compressed: bool) -> None:
        old = self.rules.get(lead)
        if old is not None:
            for k in old:
                s = self._occ.get(k)
                if s is not None:
                    s.discard(lead)
        self.rules[lead] = tail
        for k in tail:
            self._occ.setdefault(k, set()).add(lead)
        if compressed:
            self._compressed.add(lead)
        else:
            self._compressed.discard(lead)

    def _compress(self, lead: int) -> dict[int, Fraction]:
        stack = [lead]
        while stack:
            top = stack[-1]
            if top in self._compressed:
                stack.pop()
                continue
            tail = self.rules[top]
            pending = [k for k in tail if k in self.rules and k not in self._compressed]
            if pending:
                stack.extend(pending)
                continue
            acc: dict[int, Fraction] = {}
            for k, v in tail.items():
                sub = self.rules.get(k)
                if sub is None:
                    _acc_add(acc, k, v)
                else:
                    for k2, v2 in sub.items():
                        _acc_add(acc, k2, v * v2)
            self._store(top, acc, compressed=True)
            stack.pop()
        return self.rules[lead]

    def reduce(self, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        """Normal form of ``vec`` modulo the inserted row span."""
        acc = dict(vec)
        while True:
            leads = [k for k in acc if k in self.rules]
            if not leads:
                return acc
            k = max(leads)
            coeff = acc.pop(k)
            for k2, v2 in self._compress(k).items():
                _acc_add(acc, k2, coeff * v2)

    def insert(self, vec: dict[int, Fraction]) -> bool:
        """Add ``vec`` to the span; True iff it increased the rank."""
        red = self.reduce(vec)
        if not red:
            return False
        lead = max(red)
        pivot = red.pop(lead)
        tail = {k: -v / pivot for k, v in red.items()}
        # reduce() guarantees no current lead appears in the tail
        self._store(lead, tail, compressed=True)
        for stale in list(self._occ.get(lead, ())):
            self._compressed.discard(stale)
        return True

    def contains(self, vec: dict[int, Fraction]) -> bool:
        return not self.reduce(vec)

    def basis_rows(self) -> list[dict[int, Fraction]]:
        """One normalized vector per rule: e_lead minus its reduced tail."""
        out = []
        for lead in sorted(self.rules):
            row = {k: -v for k, v in self._compress(lead).items()}
            row[lead] = Fraction(1)
            out.append(row)
        return out


def _dense_rank(dense: list[list[Fraction]]) -> int:
    # first nonzero in row-major order as pivot; small and predictable
    if not dense:
        return 0
    nrows, ncols = len(dense), len(dense[0])
    rk = 0
    for col in range(ncols):
        piv = None
        for r in range(rk, nrows):
            if dense[r][col]:
                piv = r
                break
        if piv is None:
            continue
        dense[rk], dense[piv] = dense[piv], dense[rk]
        inv = dense[rk][col]
        for r in range(rk + 1, nrows):
            f = dense[r][col]
            if f:
                fr = f / inv
                row, prow = dense[r], dense[rk]
                for c in range(col, ncols):
                    row[c] -= prow[c] * fr
        rk += 1
        if rk == nrows:
            break
    return rk


def rank(m: SparseMatrix) -> int:
    """Rank over Q; dense elimination for small matrices, sparse above."""
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.rows < _DENSE_LIMIT and m.cols < _DENSE_LIMIT:
        return _dense_rank(m.to_dense())
    ech = EchelonRewriter()
    for row in m.row_vectors():
        if row:
            ech.insert(row)
    return ech.rank


def rank_of_vectors(vs: Iterable[dict[int, Fraction]]) -> int:
    ech = EchelonRewriter()
    for v in vs:
        if v:
            ech.insert(v)
    return ech.rank


def _rref(rows: list[dict[int, Fraction]]) -> dict[int, dict[int, Fraction]]:
    """Reduced row echelon form with leftmost pivots, fully back-substituted.

    Returns {pivot_col: row}, every row having coefficient 1 at its pivot and
    no entries at other pivot columns.
    """
    pivots: dict[int, dict[int, Fraction]] = {}
    for vec in rows:
        acc = dict(vec)
        while True:
            hits = [c for c in acc if c in pivots]
            if not hits:
                break
            c = min(hits)
            f = acc.pop(c)
            for c2, v2 in pivots[c].items():
                if c2 != c:
                    _acc_add(acc, c2, -f * v2)
        if not acc:
            continue
        p = min(acc)
        inv = acc[p]
        newrow = {c: v / inv for c, v in acc.items()}
        for row in pivots.values():
            f = row.get(p)
            if f:
                del row[p]
                for c2, v2 in newrow.items():
                    if c2 != p:
                        _acc_add(row, c2, -f * v2)
        pivots[p] = newrow
    return pivots


def kernel_basis(m: SparseMatrix) -> list[tuple[Fraction, ...]]:
    """Basis of the right null space, normalized so each vector's first
    nonzero entry is +1; ordered by free column.  Size = cols - rank."""
    pivots = _rref(m.row_vectors())
    piv_cols = sorted(pivots)
    out = []
    for f in range(m.cols):
        if f in pivots:
            continue
        vec = [Fraction(0)] * m.cols
        vec[f] = Fraction(1)
        for p in piv_cols:
            coeff = pivots[p].get(f)
            if coeff:
                vec[p] = -coeff
        for x in vec:
            if x:
                if x < 0:
                    vec = [-y for y in vec]
                break
        out.append(tuple(vec))
    return out


def in_span(vs: Sequence[Sequence], target: Sequence) -> bool:
    """True iff target lies in the Q-span of vs.  All vectors must have equal length."""
    tlen = len(target)
    for v in vs:
        if len(v) != tlen:
            raise ValueError(f"dimension mismatch: vector of length {len(v)} vs {tlen}")
    ech = EchelonRewriter()
    for v in vs:
        sv = _vec_from(v)
        if sv:
            ech.insert(sv)
    return ech.contains(_vec_from(target))


def quotient_dim(ambient: int, subspace: Sequence[Sequence]) -> int:
    """dim(ambient space / span(subspace))."""
    for v in subspace:
        if len(v) != ambient:
            raise ValueError(f"vector length {len(v)} != ambient {ambient}")
    return ambient - rank_of_vectors(_vec_from(v) for v in subspace)
