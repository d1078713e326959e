"""Globally optimal training for concave l^p losses, 0 <= p <= 1.

Inside a cell (fixed activation patterns and output signs) and a region where
every residual keeps its sign, the loss is a concave function of the
parameters over a pointed polyhedron, so it is minimised at a vertex. Every
such vertex is the unique solution of ``k(d+1)`` linearly independent
equations taken from two families:

* cell rows ``<w_j, x_i> + b_j = 0``;
* fit rows ``sum_{j in J} a_j (<w_j, x_i> + b_j) = y_i`` for the neurons
  ``J`` active at ``x_i``.

The default driver ("pooled") enumerates independent subsets of the union of
these rows over all ``J`` at once, which visits every vertex of every region
of every cell without enumerating cells. Each solution is a genuine network
whose true loss is evaluated, so extra candidates are harmless. The "cells"
driver instead runs the literal per-cell subset enumeration of
:func:`solve_subproblem_concave`; it is far slower and exists for
cross-checking.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import comb

from gmpy2 import mpq

from ._numeric import DEFAULT_PRECISION_BITS, EPS_CMP, to_fraction, to_mpq
from ._prep import Prepared, prepare
from .convex import SubproblemSpec, TrainResult, _Ctx, _cells, finish
from .core import BudgetExceeded, Dataset, LossSpec, loss_value, rational, vector
from .linalg import IncrementalBasis, rank, solve_square_mpq
from .parallel import WorkerPool

DEFAULT_SUBSET_BUDGET = 10**8
ZERO = mpq(0)


class EquationPool:
    """Candidate equations for one sign vector, deduplicated, in a fixed order.

    ``partition_rows`` hold ``(row, 0)`` for every coordinate and neuron;
    ``sign_rows`` hold ``(row, y)`` for every label, neuron subset ``J`` and the
    given signs. Fit rows that no point of any region can satisfy with the
    neurons of ``J`` active are dropped (all signs agree with each other but
    not with ``y``), as are rows with ``y = 0`` whose neurons all share a sign:
    those force every term to zero, which the cell rows already express.
    """

    def __init__(self, ctx: _Ctx, signs: tuple):
        self.signs = signs
        k, n = ctx.k, ctx.n
        part = []
        for c in range(n):
            for j in range(k):
                part.append((tuple(ctx.block(j, ctx.rows[c])), ZERO))
        fit = []
        labels = sorted({(c, y) for c, y, _ in ctx.obs})
        for c, y in labels:
            for size in range(1, k + 1):
                for J in combinations(range(k), size):
                    sg = {signs[j] for j in J}
                    if len(sg) == 1 and sg.pop() * y <= 0:
                        continue
                    row = [ZERO] * ctx.K
                    for j in J:
                        off = j * ctx.D
                        for t, v in enumerate(ctx.rows[c]):
                            row[off + t] += signs[j] * v
                    fit.append((tuple(row), y))
        seen = set()
        self.partition_rows = []
        self.sign_rows = []
        for dst, src in ((self.partition_rows, part), (self.sign_rows, fit)):
            for eq in src:
                if eq not in seen:
                    seen.add(eq)
                    dst.append(eq)

    @property
    def rows(self) -> list:
        return self.partition_rows + self.sign_rows

    def __len__(self) -> int:
        return len(self.partition_rows) + len(self.sign_rows)


def _canonical_signs(k: int) -> list:
    """Sign vectors up to permutation of neurons, as non-decreasing tuples."""
    return sorted({tuple(sorted(s)) for s in product((-1, 1), repeat=k)})


class _Scorer:
    """Loss of a candidate, with early exit once it cannot beat a bound."""

    def __init__(self, ctx: _Ctx, p: Fraction):
        self.ctx = ctx
        self.p = p
        self.exact = p.denominator == 1
        self.pf = float(p)
        # heavy observations first so hopeless candidates stop early
        self.obs = sorted(ctx.obs, key=lambda o: (-o[2], o[0]))

    def term(self, r, m):
        if r == 0:
            return 0
        if self.exact:
            return m if self.p == 0 else m * r
        return m * float(r) ** self.pf

    def zero_loss(self):
        tot = ZERO if self.exact else 0.0
        for _, y, m in self.obs:
            tot += self.term(abs(y), m)
        return tot

    def preds(self, theta, signs):
        ctx = self.ctx
        D = ctx.D
        out = []
        for c in range(ctx.n):
            row = ctx.rows[c]
            s = ZERO
            for j, a in enumerate(signs):
                blk = theta[j * D:(j + 1) * D]
                v = sum((u * w for u, w in zip(row, blk)), ZERO)
                if v > 0:
                    s = s + v if a == 1 else s - v
            out.append(s)
        return out

    def score(self, theta, signs, bound):
        """Loss of ``(theta, signs)``, or ``None`` once it exceeds ``bound``."""
        pred = self.preds(theta, signs)
        lim = bound if self.exact else bound + EPS_CMP
        tot = ZERO if self.exact else 0.0
        for c, y, m in self.obs:
            tot += self.term(abs(pred[c] - y), m)
            if tot > lim:
                return None
        return tot

    def better(self, val, key, best):
        """``best`` is ``(val, key)`` or None; ties within tolerance go to the smaller key."""
        if best is None:
            return True
        bv, bk = best
        if self.exact:
            return (val, key) < (bv, bk)
        if val < bv - EPS_CMP:
            return True
        if val > bv + EPS_CMP:
            return False
        return key < bk


def _cert_key(ctx: _Ctx, theta, signs):
    D = ctx.D
    dich = []
    for j in range(len(signs)):
        blk = theta[j * D:(j + 1) * D]
        dich.append(tuple(c for c in range(ctx.n)
                          if sum((u * w for u, w in zip(ctx.rows[c], blk)), ZERO) > 0))
    return (tuple(dich), tuple(signs), tuple(theta))


# ---------------------------------------------------------------------------
# pooled driver
# ---------------------------------------------------------------------------

_CTX: dict = {}


def _install(ctx, p, pools):
    _CTX["ctx"] = ctx
    _CTX["scorer"] = _Scorer(ctx, p)
    _CTX["pools"] = pools


def _branch(task):
    """Best candidate among subsets of one pool whose first row is ``first``."""
    si, first = task
    ctx, scorer = _CTX["ctx"], _CTX["scorer"]
    signs, rows = _CTX["pools"][si]
    K = ctx.K
    best = None
    bound = scorer.zero_loss()
    solved = 0
    seen = set()
    basis = IncrementalBasis(K)
    if not basis.push(rows[first][0], rows[first][1]):
        return None, 0

    def leaf():
        nonlocal best, bound, solved
        solved += 1
        theta = tuple(basis.solve())
        if theta in seen:
            return
        seen.add(theta)
        val = scorer.score(theta, signs, bound)
        if val is None:
            return
        key = _cert_key(ctx, theta, signs)
        if scorer.better(val, key, best):
            best = (val, key)
            if val < bound:
                bound = val

    def dfs(start):
        if len(basis) == K:
            leaf()
            return
        need = K - len(basis)
        for i in range(start, len(rows) - need + 1):
            row, rhs = rows[i]
            if basis.push(row, rhs):
                dfs(i + 1)
                basis.pop()

    dfs(first + 1)
    return best, solved


def _train_pooled(prep: Prepared, k: int, p: Fraction, threads: int, budget: int):
    ctx = _Ctx(prep, k)
    pools = []
    total = 0
    for signs in _canonical_signs(k):
        pool = EquationPool(ctx, signs)
        pools.append((signs, pool.rows))
        total += comb(len(pool), ctx.K)
    if total > budget:
        raise BudgetExceeded(f"{total} equation subsets exceed the budget {budget}")
    scorer = _Scorer(ctx, p)
    zero = tuple([ZERO] * ctx.K)
    sign0 = (1,) * k
    best = (scorer.zero_loss(), _cert_key(ctx, zero, sign0))
    tasks = [(si, i) for si, (_, rows) in enumerate(pools) for i in range(len(rows))]
    solved = 0
    with WorkerPool(threads, _install, (ctx, p, pools)) as pool:
        for cand, n in pool.map(_branch, tasks):
            solved += n
            if cand is not None and scorer.better(cand[0], cand[1], best):
                best = cand
    val, (dich, signs, theta) = best
    return val, list(theta), signs, SubproblemSpec(dich, signs), solved, {
        "pool_sizes": [len(r) for _, r in pools], "subsets_bound": total}


# ---------------------------------------------------------------------------
# per-cell subset enumeration
# ---------------------------------------------------------------------------


def _cell_pool(ctx: _Ctx, spec: SubproblemSpec):
    """The ``k n' + n'`` equations of one cell (one fit row per observation)."""
    plus_sets = [set(P) for P in spec.dichotomies]
    rows = []
    for j in range(ctx.k):
        for c in range(ctx.n):
            rows.append((ctx.block(j, ctx.rows[c]), ZERO))
    S = ctx.signature_rows(plus_sets, spec.signs)
    for c, y, _ in ctx.obs:
        rows.append((S.get(c, [ZERO] * ctx.K), y))
    return plus_sets, rows


def _cell_concave(ctx: _Ctx, scorer: _Scorer, spec: SubproblemSpec):
    plus_sets, rows = _cell_pool(ctx, spec)
    K = ctx.K
    best = None
    examined = 0
    for idx in combinations(range(len(rows)), K):
        examined += 1
        sol = solve_square_mpq([list(rows[i][0]) for i in idx], [rows[i][1] for i in idx])
        if sol is None or not ctx.feasible(plus_sets, sol):
            continue
        val = scorer.score(sol, spec.signs, best[0] if best else scorer.zero_loss())
        if val is None:
            continue
        key = (spec.dichotomies, spec.signs, tuple(sol))
        if scorer.better(val, key, best):
            best = (val, key)
    return best, examined


def solve_subproblem_concave(spec: SubproblemSpec, data: Dataset, p) -> tuple:
    """Best vertex candidate of one cell: ``(network, loss, subsets_examined)``.

    Every ``k(d+1)``-subset of the cell's ``k n' + n'`` equations is tried;
    full-rank ones are solved and kept when they satisfy the cell's weak
    inequalities. Indices in ``spec`` refer to distinct points of ``data``.
    """
    p = rational(p)
    if not 0 <= p <= 1:
        raise ValueError("concave training needs 0 <= p <= 1")
    prep = prepare(data)
    ctx = _Ctx(prep, spec.k)
    scorer = _Scorer(ctx, p)
    best, examined = _cell_concave(ctx, scorer, spec)
    theta = list(best[1][2])
    net = prep.network(theta, spec.signs)
    return net, loss_value(net, data, LossSpec.lp(p)), examined


def _train_cells(prep: Prepared, k: int, p: Fraction, budget: int):
    ctx = _Ctx(prep, k)
    scorer = _Scorer(ctx, p)
    cells, _ = _cells(prep, k, budget)
    best = None
    examined = 0
    for cell in cells:
        cand, n = _cell_concave(ctx, scorer, cell)
        examined += n
        if cand is not None and scorer.better(cand[0], cand[1], best):
            best = cand
    val, (dich, signs, theta) = best
    return val, list(theta), signs, SubproblemSpec(dich, signs), examined, {"cells": len(cells)}


def train_concave(data: Dataset, k: int = 1, p=1, threads: int = 1,
                  budget: int = DEFAULT_SUBSET_BUDGET, strategy: str = "pooled",
                  precision_bits: int = DEFAULT_PRECISION_BITS) -> TrainResult:
    """Globally minimise ``sum_i m_i |f(x_i) - y_i|^p`` for ``0 <= p <= 1``."""
    p = rational(p)
    if not 0 <= p <= 1:
        raise ValueError("concave training needs 0 <= p <= 1")
    if k < 1:
        raise ValueError("k must be positive")
    prep = prepare(data)
    if strategy == "pooled":
        val, theta, signs, cert, solved, stats = _train_pooled(prep, k, p, threads, budget)
    elif strategy == "cells":
        val, theta, signs, cert, solved, stats = _train_cells(prep, k, p, budget)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return finish(prep, LossSpec.lp(p), theta, signs, val, cert, solved, 0, precision_bits, stats)


def verify_pointedness(data: Dataset, k: int = 1) -> tuple:
    """``(True, S)`` with ``S`` indices of ``d+1`` affinely independent points, else ``(False, ())``.

    For such ``S`` the cell rows ``{(0, .., x_i, 1, .., 0) : i in S, j <= k}``
    have full rank ``k(d+1)``, so the origin is a vertex of every cell.
    """
    d = data.dim
    basis = IncrementalBasis(d + 1)
    chosen = []
    for i, pt in enumerate(data.points):
        row = [to_mpq(v) for v in pt.x] + [mpq(1)]
        if basis.push(row, ZERO):
            chosen.append(i)
            if len(chosen) == d + 1:
                break
    if len(chosen) < d + 1:
        return False, ()
    D = d + 1
    rows = []
    for j in range(k):
        for i in chosen:
            r = [0] * (k * D)
            x = vector(data.points[i].x) + (Fraction(1),)
            r[j * D:(j + 1) * D] = x
            rows.append(r)
    return rank(rows) == k * D, tuple(chosen)


__all__ = [
    "EquationPool",
    "train_concave",
    "solve_subproblem_concave",
    "verify_pointedness",
]
