"""Exact linear algebra over the rationals.

Rows are sparse ``{column: value}`` dicts.  Elimination is fraction-free:
every stored row has integer entries with unit content, so the inner loops
run on Python ints instead of :class:`fractions.Fraction`.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

Q = Fraction
SparseRow = dict


def _content_normalize(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        for k in row:
            row[k] //= g
    return row


def integer_row(row: Mapping[int, Fraction | int]) -> dict[int, int]:
    """Scale a rational sparse row to a primitive integer row (same span)."""
    items = {c: Fraction(v) for c, v in row.items() if v != 0}
    if not items:
        return {}
    den = 1
    for v in items.values():
        den = lcm(den, v.denominator)
    out = {c: int(v * den) for c, v in items.items()}
    return _content_normalize(out)


class Echelon:
    """Incrementally maintained reduced row echelon form.

    Each pivot row is zero in every other pivot column, so reducing an
    incoming row needs one pass over the pivot columns it touches.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: dict[int, dict[int, int]] = {}  # pivot column -> row
        self._occ: dict[int, set[int]] = {}  # column -> pivots whose row uses it

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def _reduce(self, row: dict[int, int]) -> dict[int, int]:
        hits = [c for c in row if c in self.rows]
        for c in hits:
            a = row.get(c, 0)
            if a == 0:
                continue
            prow = self.rows[c]
            p = prow[c]
            g = gcd(p, a)
            mp, ma = p // g, a // g
            if mp != 1:
                for k in row:
                    row[k] *= mp
            for k, v in prow.items():
                nv = row.get(k, 0) - ma * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            _content_normalize(row)
        return row

    def add(self, row: Mapping[int, Fraction | int]) -> bool:
        """Insert a row; returns True if it increased the rank."""
        r = integer_row(row)
        if not r:
            return False
        r = self._reduce(r)
        if not r:
            return False
        # sparsest-occurrence pivot keeps fill-in low
        piv = min(r, key=lambda c: (len(self._occ.get(c, ())), c))
        if r[piv] < 0:
            for k in r:
                r[k] = -r[k]
        p = r[piv]
        for q in list(self._occ.get(piv, ())):
            qrow = self.rows[q]
            a = qrow[piv]
            g = gcd(p, a)
            mp, ma = p // g, a // g
            old_cols = set(qrow)
            if mp != 1:
                for k in qrow:
                    qrow[k] *= mp
            for k, v in r.items():
                nv = qrow.get(k, 0) - ma * v
                if nv:
                    qrow[k] = nv
                else:
                    qrow.pop(k, None)
            _content_normalize(qrow)
            new_cols = set(qrow)
            for k in old_cols - new_cols:
                self._occ[k].discard(q)
            for k in new_cols - old_cols:
                self._occ.setdefault(k, set()).add(q)
        self.rows[piv] = r
        for k in r:
            self._occ.setdefault(k, set()).add(piv)
        return True

    def contains(self, row: Mapping[int, Fraction | int]) -> bool:
        r = integer_row(row)
        return not self._reduce(r) if r else True

    def nullspace(self) -> list[list[int]]:
        """Integer basis of the right kernel, one vector per free column.

        Each vector has unit content and a positive leading entry.
        """
        free = [c for c in range(self.ncols) if c not in self.rows]
        # column -> pivot rows that use it, restricted to free columns
        basis = []
        for f in free:
            # x_f = L, x_piv = -L * row[f] / row[piv]
            entries: dict[int, Fraction] = {f: Fraction(1)}
            for q in self._occ.get(f, ()):
                qrow = self.rows[q]
                entries[q] = Fraction(-qrow[f], qrow[q])
            vec_int = integer_row(entries)
            vec = [0] * self.ncols
            for c, v in vec_int.items():
                vec[c] = v
            lead = next(v for v in vec if v)
            if lead < 0:
                vec = [-v for v in vec]
            basis.append(vec)
        return basis


def echelon(rows: Iterable[Mapping[int, Fraction | int]], ncols: int) -> Echelon:
    e = Echelon(ncols)
    for r in rows:
        e.add(r)
    return e


def rank(rows: Iterable[Mapping[int, Fraction | int]], ncols: int) -> int:
    return echelon(rows, ncols).rank


def nullspace(rows: Iterable[Mapping[int, Fraction | int]], ncols: int) -> list[list[int]]:
    return echelon(rows, ncols).nullspace()


def dense_to_sparse(vec: Sequence[Fraction | int]) -> dict[int, Fraction | int]:
    return {i: v for i, v in enumerate(vec) if v != 0}


def solve(a: Sequence[Sequence[Fraction | int]], b: Sequence[Fraction | int]) -> list[Fraction]:
    """Solve a square nonsingular system exactly by Gauss-Jordan elimination."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        pr = m[col]
        inv = 1 / pr[col]
        for k in range(col, n + 1):
            pr[k] *= inv
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                row = m[r]
                for k in range(col, n + 1):
                    if pr[k]:
                        row[k] -= f * pr[k]
    return [m[r][n] for r in range(n)]


def inverse(a: Sequence[Sequence[Fraction | int]]) -> list[list[Fraction]]:
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        pr = m[col]
        inv = 1 / pr[col]
        for k in range(2 * n):
            pr[k] *= inv
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                row = m[r]
                for k in range(2 * n):
                    if pr[k]:
                        row[k] -= f * pr[k]
    return [row[n:] for row in m]


def matvec(a: Sequence[Sequence[Fraction]], x: Sequence[Fraction]) -> list[Fraction]:
    return [sum((aij * xj for aij, xj in zip(row, x) if aij), Fraction(0)) for row in a]
