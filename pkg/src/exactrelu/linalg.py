"""Exact rational linear algebra: rank and square-system solves."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

from ._numeric import to_fraction, to_mpq


class Singular(Exception):
    """The square system has no unique solution."""


def _to_rows(A) -> list[list]:
    return [[to_mpq(v) for v in row] for row in A]


def rank(A: Sequence[Sequence]) -> int:
    rows = _to_rows(A)
    if not rows or not rows[0]:
        return 0
    m, n = len(rows), len(rows[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        for i in range(r + 1, m):
            if rows[i][c] != 0:
                f = rows[i][c] / pr[c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        r += 1
        if r == m:
            break
    return r


def solve_square_mpq(A: list[list], rhs: list) -> list | None:
    """Gauss-Jordan on mpq data; ``None`` when ``A`` is singular. Inputs are not modified."""
    m = len(A)
    rows = [list(A[i]) + [rhs[i]] for i in range(m)]
    for c in range(m):
        piv = next((i for i in range(c, m) if rows[i][c] != 0), None)
        if piv is None:
            return None
        rows[c], rows[piv] = rows[piv], rows[c]
        pr = rows[c]
        inv = 1 / pr[c]
        pr = [v * inv for v in pr]
        rows[c] = pr
        for i in range(m):
            if i != c:
                f = rows[i][c]
                if f != 0:
                    rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
    return [rows[i][m] for i in range(m)]


def solve_square_system(A: Sequence[Sequence], rhs: Sequence) -> tuple:
    """Exact solution of ``A x = rhs`` for square ``A``.

    Raises :class:`Singular` when ``A`` is rank deficient.
    """
    m = len(A)
    if any(len(row) != m for row in A) or len(rhs) != m:
        raise ValueError("solve_square_system needs a square matrix and matching rhs")
    sol = solve_square_mpq(_to_rows(A), [to_mpq(v) for v in rhs])
    if sol is None:
        raise Singular("matrix is singular")
    return tuple(to_fraction(v) for v in sol)


def nullspace_particular(A: list[list], rhs: list) -> tuple[list, int] | None:
    """A solution of a possibly rank-deficient square-or-not system.

    Returns ``(x, rank)`` where ``x`` sets every free variable to zero, or
    ``None`` when the system is inconsistent. Works on mpq data.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    rows = [list(A[i]) + [rhs[i]] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        pr = rows[r]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][n] != 0:
            return None
    x = [mpq(0)] * n
    for i, c in enumerate(pivots):
        x[c] = rows[i][n]
    return x, r


class IncrementalBasis:
    """Row-echelon basis grown one equation at a time.

    Used by depth-first enumeration of linearly independent equation subsets:
    ``push`` reduces a new row against the current basis and refuses it when
    it is dependent, ``pop`` undoes the last push.
    """

    __slots__ = ("n", "rows", "rhs", "pivots")

    def __init__(self, n: int):
        self.n = n
        self.rows: list = []
        self.rhs: list = []
        self.pivots: list = []

    def __len__(self) -> int:
        return len(self.rows)

    def push(self, row, b) -> bool:
        row = list(row)
        for prow, pb, pc in zip(self.rows, self.rhs, self.pivots):
            f = row[pc]
            if f != 0:
                f = f / prow[pc]
                row = [a - f * c for a, c in zip(row, prow)]
                b = b - f * pb
        pc = next((c for c in range(self.n) if row[c] != 0), None)
        if pc is None:
            return False
        self.rows.append(row)
        self.rhs.append(b)
        self.pivots.append(pc)
        return True

    def pop(self) -> None:
        self.rows.pop()
        self.rhs.pop()
        self.pivots.pop()

    def solve(self) -> list:
        """Unique solution once the basis has full rank ``n``."""
        x = [None] * self.n
        for t in range(len(self.rows) - 1, -1, -1):
            row, pc = self.rows[t], self.pivots[t]
            acc = self.rhs[t]
            for c in range(self.n):
                if c != pc and row[c] != 0:
                    acc -= row[c] * x[c]
            x[pc] = acc / row[pc]
        return x


def to_fraction_matrix(rows) -> list[list[Fraction]]:
    return [[to_fraction(v) for v in r] for r in rows]
