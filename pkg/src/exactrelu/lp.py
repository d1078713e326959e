"""Exact rational linear programming.

A dense two-phase primal simplex over ``gmpy2.mpq`` with bounded variables and
Bland's smallest-index rule, so it terminates on degenerate problems and
returns the same basic solution for the same input every time. No tolerance
is used anywhere: every comparison is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

from ._numeric import to_fraction, to_mpq
from .core import rational

ZERO = mpq(0)


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Row:
    coeffs: tuple
    sense: str  # "<=", "=", ">="
    rhs: Fraction

    def __post_init__(self):
        if self.sense not in ("<=", "=", ">="):
            raise ValueError(f"bad constraint sense {self.sense!r}")


@dataclass
class LinearProgram:
    """``min/max c.x`` subject to linear rows and per-variable bounds.

    Variables are free unless ``lower``/``upper`` say otherwise.
    """

    num_vars: int
    objective: list
    maximize: bool = False
    rows: list = field(default_factory=list)
    lower: list = None
    upper: list = None

    def __post_init__(self):
        self.objective = [rational(v) for v in self.objective]
        if len(self.objective) != self.num_vars:
            raise ValueError("objective length must equal the number of variables")
        if self.lower is None:
            self.lower = [None] * self.num_vars
        if self.upper is None:
            self.upper = [None] * self.num_vars
        self.lower = [None if v is None else rational(v) for v in self.lower]
        self.upper = [None if v is None else rational(v) for v in self.upper]

    def add_row(self, coeffs, sense: str, rhs) -> None:
        coeffs = tuple(rational(v) for v in coeffs)
        if len(coeffs) != self.num_vars:
            raise ValueError("row length must equal the number of variables")
        self.rows.append(Row(coeffs, sense, rational(rhs)))

    def bound(self, j: int, lower=None, upper=None) -> None:
        if lower is not None:
            self.lower[j] = rational(lower)
        if upper is not None:
            self.upper[j] = rational(upper)


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    point: tuple | None = None
    objective_value: Fraction | None = None
    # d(optimal objective)/d(rhs) per row, in the LP's own direction
    duals: tuple | None = None

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


# ---------------------------------------------------------------------------
# core simplex on standard form: min c.x, A x = b, 0 <= x <= upper
# ---------------------------------------------------------------------------


class _Tableau:
    __slots__ = ("m", "n", "T", "d", "basis", "upper", "at_upper", "barred", "pivots", "_bset")

    def __init__(self, A, b, upper, n):
        m = len(A)
        self.m, self.n = m, n
        # artificial columns n .. n+m-1 form the starting basis
        T = []
        for r in range(m):
            row = list(A[r])
            rhs = b[r]
            if rhs < 0:
                row = [-v for v in row]
                rhs = -rhs
            art = [ZERO] * m
            art[r] = mpq(1)
            T.append(row + art + [rhs])
        self.T = T
        self.basis = [n + r for r in range(m)]
        self._bset = set(self.basis)
        self.upper = list(upper) + [None] * m
        self.at_upper = [False] * (n + m)
        self.barred = [False] * (n + m)
        self.d = None
        self.pivots = 0

    def flips(self, b):
        return [(-1 if v < 0 else 1) for v in b]

    def set_costs(self, cost):
        T, m, ncol = self.T, self.m, self.n + self.m
        d = list(cost)
        for r in range(m):
            cb = cost[self.basis[r]]
            if cb != 0:
                row = T[r]
                for j in range(ncol):
                    if row[j] != 0:
                        d[j] -= cb * row[j]
        self.d = d

    def _pivot(self, r, j):
        T = self.T
        prow = T[r]
        inv = 1 / prow[j]
        prow = [v * inv for v in prow]
        T[r] = prow
        nz = [c for c, v in enumerate(prow) if v != 0]
        for i in range(self.m):
            if i != r:
                row = T[i]
                f = row[j]
                if f != 0:
                    for c in nz:
                        row[c] -= f * prow[c]
        f = self.d[j]
        if f != 0:
            d = self.d
            for c in nz:
                if c != len(prow) - 1:
                    d[c] -= f * prow[c]
        self.basis[r] = j
        self.pivots += 1

    def run(self) -> bool:
        """Optimize the current cost row; False when unbounded."""
        T, m = self.T, self.m
        ncol = self.n + self.m
        rhs = ncol
        while True:
            enter = -1
            for j in range(ncol):
                if self.barred[j]:
                    continue
                dj = self.d[j]
                if dj == 0:
                    continue
                if (dj < 0 and not self.at_upper[j]) or (dj > 0 and self.at_upper[j]):
                    if j not in self._bset:
                        enter = j
                        break
            if enter < 0:
                return True
            j = enter
            increasing = not self.at_upper[j]
            best_t = None
            best_idx = None  # variable index deciding Bland ties
            best_row = None  # None means bound flip of the entering variable
            best_to_upper = False
            uj = self.upper[j]
            if uj is not None:
                best_t, best_idx, best_row = uj, j, None
            for r in range(m):
                a = T[r][j]
                if a == 0:
                    continue
                delta = -a if increasing else a
                bv = self.basis[r]
                val = T[r][rhs]
                if delta < 0:
                    t = val / (-delta)
                    to_upper = False
                else:
                    ub = self.upper[bv]
                    if ub is None:
                        continue
                    t = (ub - val) / delta
                    to_upper = True
                if best_t is None or t < best_t or (t == best_t and bv < best_idx):
                    best_t, best_idx, best_row, best_to_upper = t, bv, r, to_upper
            if best_t is None:
                return False
            if best_row is None:
                self._flip(j)
                continue
            self._enter(j, best_row, best_to_upper)

    def _flip(self, j):
        """Move nonbasic ``j`` to its other bound."""
        u = self.upper[j]
        T = self.T
        rhs = self.n + self.m
        sign = -1 if not self.at_upper[j] else 1
        for r in range(self.m):
            a = T[r][j]
            if a != 0:
                T[r][rhs] += sign * a * u
        self.at_upper[j] = not self.at_upper[j]

    def _enter(self, j, r, leave_to_upper):
        T = self.T
        rhs = self.n + self.m
        if self.at_upper[j]:
            # entering from its upper bound: fold its value back into the rhs
            u = self.upper[j]
            for i in range(self.m):
                a = T[i][j]
                if a != 0:
                    T[i][rhs] += a * u
            self.at_upper[j] = False
        leaving = self.basis[r]
        self._bset.discard(leaving)
        self._pivot(r, j)
        self._bset.add(j)
        if leave_to_upper:
            u = self.upper[leaving]
            for i in range(self.m):
                a = T[i][leaving]
                if a != 0:
                    T[i][rhs] -= a * u
            self.at_upper[leaving] = True
        else:
            self.at_upper[leaving] = False

    def values(self):
        x = [ZERO] * (self.n + self.m)
        for j in range(self.n + self.m):
            if self.at_upper[j]:
                x[j] = self.upper[j]
        rhs = self.n + self.m
        for r, bv in enumerate(self.basis):
            x[bv] = self.T[r][rhs]
        return x


def simplex_standard(A, b, c, upper=None):
    """Solve ``min c.x`` s.t. ``A x = b``, ``0 <= x <= upper`` over mpq.

    Returns ``(status, x, duals, pivots)``; ``duals[r]`` is the sensitivity of
    the optimal value to ``b[r]``.
    """
    m = len(A)
    n = len(c)
    upper = list(upper) if upper is not None else [None] * n
    for j, u in enumerate(upper):
        if u is not None and u < 0:
            return LpStatus.INFEASIBLE, None, None, 0
    tab = _Tableau(A, b, upper, n)
    flips = tab.flips(b)
    # phase 1: minimise the sum of artificials
    cost1 = [ZERO] * n + [mpq(1)] * m
    tab.set_costs(cost1)
    tab.run()
    x = tab.values()
    if any(x[n + r] != 0 for r in range(m)):
        return LpStatus.INFEASIBLE, None, None, tab.pivots
    # drive zero-valued artificials out of the basis where possible
    for r in range(m):
        bv = tab.basis[r]
        if bv >= n:
            row = tab.T[r]
            j = next((j for j in range(n) if row[j] != 0 and j not in tab._bset), None)
            if j is not None:
                tab._enter(j, r, False)
    for j in range(n, n + m):
        tab.barred[j] = True
    cost2 = list(c) + [ZERO] * m
    tab.set_costs(cost2)
    if not tab.run():
        return LpStatus.UNBOUNDED, None, None, tab.pivots
    x = tab.values()[:n]
    # reduced cost of artificial r is -y_r for the (possibly negated) row r
    duals = [-tab.d[n + r] * flips[r] for r in range(m)]
    return LpStatus.OPTIMAL, x, duals, tab.pivots


# ---------------------------------------------------------------------------
# general LPs
# ---------------------------------------------------------------------------


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Exact optimum of ``lp``, or an infeasible/unbounded status."""
    nv = lp.num_vars
    # column map: each original variable -> list of (std column, coefficient), constant shift
    cols: list[list[tuple[int, int]]] = []
    shift: list = []
    std_upper: list = []
    ncols = 0
    for j in range(nv):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo is not None and hi is not None and hi < lo:
            return LpOutcome(LpStatus.INFEASIBLE)
        if lo is not None:
            cols.append([(ncols, 1)])
            shift.append(to_mpq(lo))
            std_upper.append(None if hi is None else to_mpq(hi - lo))
            ncols += 1
        elif hi is not None:
            cols.append([(ncols, -1)])
            shift.append(to_mpq(hi))
            std_upper.append(None)
            ncols += 1
        else:
            cols.append([(ncols, 1), (ncols + 1, -1)])
            shift.append(ZERO)
            std_upper.extend([None, None])
            ncols += 2
    nslack = sum(1 for row in lp.rows if row.sense != "=")
    total = ncols + nslack
    A, b = [], []
    s = ncols
    for row in lp.rows:
        line = [ZERO] * total
        rhs = to_mpq(row.rhs)
        for j, a in enumerate(row.coeffs):
            if a == 0:
                continue
            qa = to_mpq(a)
            for col, sign in cols[j]:
                line[col] += sign * qa
            rhs -= qa * shift[j]
        if row.sense == "<=":
            line[s] = mpq(1)
            s += 1
        elif row.sense == ">=":
            line[s] = mpq(-1)
            s += 1
        A.append(line)
        b.append(rhs)
    std_upper.extend([None] * nslack)
    sign_obj = -1 if lp.maximize else 1
    c = [ZERO] * total
    for j, cj in enumerate(lp.objective):
        if cj == 0:
            continue
        q = to_mpq(cj) * sign_obj
        for col, sign in cols[j]:
            c[col] += sign * q
    status, x, duals, _ = simplex_standard(A, b, c, std_upper)
    if status is not LpStatus.OPTIMAL:
        return LpOutcome(status)
    point = []
    for j in range(nv):
        v = shift[j]
        for col, sign in cols[j]:
            v += sign * x[col]
        point.append(to_fraction(v))
    obj = sum((cj * xj for cj, xj in zip(lp.objective, point)), Fraction(0))
    duals = tuple(to_fraction(sign_obj * y) for y in duals)
    return LpOutcome(LpStatus.OPTIMAL, tuple(point), obj, duals)


def is_feasible(rows: Sequence[tuple], num_vars: int) -> tuple | None:
    """Feasibility of ``rows = [(coeffs, sense, rhs), ...]`` over free variables.

    Returns a feasible point or ``None``.
    """
    lp = LinearProgram(num_vars, [0] * num_vars)
    for coeffs, sense, rhs in rows:
        lp.add_row(coeffs, sense, rhs)
    out = solve_lp(lp)
    return out.point if out.optimal else None


def check_point(lp: LinearProgram, point: Sequence[Fraction]) -> bool:
    """Exact feasibility check of ``point`` for ``lp``."""
    for j, v in enumerate(point):
        if lp.lower[j] is not None and v < lp.lower[j]:
            return False
        if lp.upper[j] is not None and v > lp.upper[j]:
            return False
    for row in lp.rows:
        lhs = sum((a * v for a, v in zip(row.coeffs, point)), Fraction(0))
        if row.sense == "<=" and lhs > row.rhs:
            return False
        if row.sense == ">=" and lhs < row.rhs:
            return False
        if row.sense == "=" and lhs != row.rhs:
            return False
    return True
