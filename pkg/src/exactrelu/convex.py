"""Globally optimal training for the l^1 and l^2 losses.

A network with ``k`` neurons is determined, on the data, by one activation
pattern per neuron (an open dichotomy of the distinct points) and the output
signs. Inside such a cell the prediction is linear in the parameters, so the
cell problem is an LP (l^1) or a convex QP (l^2). The drivers enumerate every
cell, skip cells whose cheap lower bound cannot beat the incumbent, and keep
the best certificate under a fixed total order.

Parameters are stacked as ``theta = (w_1, b_1, ..., w_k, b_k)`` in the
affine-hull coordinates of the data; the result is lifted back at the end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from gmpy2 import mpq

from ._numeric import DEFAULT_PRECISION_BITS, EPS_CMP, to_fraction
from ._prep import Prepared, multiset_count, prepare
from .core import BudgetExceeded, Dataset, LossSpec, LossValue, ReluNetwork, loss_value
from .dichotomies import enumerate_open_dichotomies_geometric
from .linalg import IncrementalBasis, nullspace_particular, solve_square_mpq
from .lp import LinearProgram, LpStatus, simplex_standard, solve_lp
from .parallel import WorkerPool

DEFAULT_CELL_BUDGET = 10**7
WAVE = 32
ZERO = mpq(0)


@dataclass(frozen=True, order=True)
class SubproblemSpec:
    """One cell: an activation pattern and an output sign per neuron.

    ``dichotomies[j]`` is the sorted tuple of distinct-coordinate indices on
    which neuron ``j`` is active.
    """

    dichotomies: tuple
    signs: tuple

    def __post_init__(self):
        if len(self.dichotomies) != len(self.signs):
            raise ValueError("one sign per dichotomy")
        object.__setattr__(self, "dichotomies", tuple(tuple(sorted(p)) for p in self.dichotomies))
        object.__setattr__(self, "signs", tuple(int(a) for a in self.signs))
        if any(a not in (1, -1) for a in self.signs):
            raise ValueError("signs must be +1 or -1")

    @property
    def k(self) -> int:
        return len(self.signs)


@dataclass
class TrainResult:
    network: ReluNetwork
    loss: LossValue
    certificate: object = None
    subproblems_solved: int = 0
    lp_solves: int = 0
    stats: dict = field(default_factory=dict)


def finish(prep: Prepared, spec: LossSpec, theta, signs, claimed, certificate,
           subproblems: int, lp_solves: int = 0, precision_bits: int = DEFAULT_PRECISION_BITS,
           stats: dict | None = None) -> TrainResult:
    """Lift ``theta`` and re-evaluate its loss on the original data.

    ``claimed`` is the value the trainer computed internally; an exact
    mismatch (or an approximate one beyond the comparison tolerance) means a
    bug, so it raises.
    """
    net = prep.network(theta, signs)
    lv = loss_value(net, prep.original, spec, precision_bits)
    if lv.is_exact:
        if claimed is not None and lv.exact != to_fraction(claimed):
            raise AssertionError(f"internal loss {claimed} != re-evaluated {lv.exact}")
    elif claimed is not None and abs(float(lv.approx) - float(claimed)) > EPS_CMP:
        raise AssertionError(f"internal loss {claimed} != re-evaluated {lv.approx}")
    return TrainResult(net, lv, certificate, subproblems, lp_solves, dict(stats or {}))


# ---------------------------------------------------------------------------
# cell geometry
# ---------------------------------------------------------------------------


class _Ctx:
    """Read-only problem data shared with workers."""

    def __init__(self, prep: Prepared, k: int):
        self.k = k
        self.D = prep.dim + 1
        self.K = k * self.D
        self.rows = prep.homogeneous()
        self.obs = prep.obs
        self.n = prep.n_coords

    def block(self, j, vec, scale=1):
        out = [ZERO] * self.K
        off = j * self.D
        for t, v in enumerate(vec):
            out[off + t] = v * scale
        return out

    def signature_rows(self, plus_sets, signs):
        """``S_c``: prediction of coordinate ``c`` inside the cell is ``S_c . theta``."""
        S = {}
        for c in range(self.n):
            vec = None
            for j, (P, a) in enumerate(zip(plus_sets, signs)):
                if c in P:
                    if vec is None:
                        vec = [ZERO] * self.K
                    off = j * self.D
                    for t, v in enumerate(self.rows[c]):
                        vec[off + t] += a * v
            if vec is not None:
                S[c] = vec
        return S

    def constraint_rows(self, plus_sets):
        """Rows ``g`` with ``g . theta >= 0`` describing the closed cell."""
        out = []
        for j, P in enumerate(plus_sets):
            for c in range(self.n):
                out.append(self.block(j, self.rows[c], 1 if c in P else -1))
        return out

    def feasible(self, plus_sets, theta) -> bool:
        for j, P in enumerate(plus_sets):
            blk = theta[j * self.D:(j + 1) * self.D]
            for c in range(self.n):
                v = sum((a * b for a, b in zip(self.rows[c], blk)), ZERO)
                if (v < 0) if c in P else (v > 0):
                    return False
        return True


def _dot(u, v):
    return sum((a * b for a, b in zip(u, v)), ZERO)


def _lower_bound(ctx: _Ctx, plus_sets, signs, power: int):
    """Loss every network of the cell must pay.

    An observation whose active neurons all push the prediction away from its
    label (or that no neuron touches) loses at least ``|y|``.
    """
    lb = ZERO
    for c, y, m in ctx.obs:
        if y == 0:
            continue
        if all(a * y <= 0 for P, a in zip(plus_sets, signs) if c in P):
            lb += m * (abs(y) if power == 1 else y * y)
    return lb


def _cells(prep: Prepared, k: int, budget: int):
    dich = enumerate_open_dichotomies_geometric(prep.coords) if prep.coords else []
    atoms = []
    for dc in dich:
        if not dc.plus:
            atoms.append((dc.plus, 1))
        else:
            atoms.append((dc.plus, -1))
            atoms.append((dc.plus, 1))
    atoms.sort()
    total = multiset_count(len(atoms), k)
    if total > budget:
        raise BudgetExceeded(f"{total} cells exceed the budget {budget}")
    return [SubproblemSpec(tuple(p for p, _ in combo), tuple(a for _, a in combo))
            for combo in combinations_with_replacement(atoms, k)], len(dich)


# ---------------------------------------------------------------------------
# l^1 cells
# ---------------------------------------------------------------------------


def _cell_l1(ctx: _Ctx, spec: SubproblemSpec):
    """Exact optimum of one l^1 cell: ``(value, theta, lp_solves)``.

    The LP solved is the dual of the cell problem, which has only ``k(d+1)``
    equality rows:

        max sum_i y_i u_i  s.t.  sum_i u_i S_i + sum_cj lam_cj g_cj = 0,
                                 |u_i| <= m_i, lam >= 0,

    with ``g_cj`` the cell's constraint rows. The primal parameters are read
    off the simplex multipliers and re-checked.
    """
    plus_sets = [set(P) for P in spec.dichotomies]
    S = ctx.signature_rows(plus_sets, spec.signs)
    const = ZERO
    act = []
    for c, y, m in ctx.obs:
        if c in S:
            act.append((S[c], y, m))
        else:
            const += m * abs(y)
    K = ctx.K
    if not act:
        return const, [ZERO] * K, 0
    G = ctx.constraint_rows(plus_sets)
    cols = [s for s, _, _ in act] + G
    A = [[col[r] for col in cols] for r in range(K)]
    rhs = [sum((m * s[r] for s, _, m in act), ZERO) for r in range(K)]
    cost = [-y for _, y, _ in act] + [ZERO] * len(G)
    upper = [2 * m for _, _, m in act] + [None] * len(G)
    status, v, duals, _ = simplex_standard(A, rhs, cost, upper)
    if status is not LpStatus.OPTIMAL:
        raise AssertionError(f"cell dual LP ended {status}; the cell is never empty")
    value = const + sum((y * vi for (_, y, _), vi in zip(act, v)), ZERO) - sum(
        (y * m for _, y, m in act), ZERO)
    theta = [-t for t in duals]
    if ctx.feasible(plus_sets, theta) and _primal_l1(act, theta) + const == value:
        return value, theta, 1
    # multipliers did not certify (should not happen); fall back to the primal
    theta = _solve_primal_l1(ctx, plus_sets, act)
    got = _primal_l1(act, theta) + const
    if got != value:
        raise AssertionError("l1 cell primal and dual values differ")
    return value, theta, 2


def _primal_l1(act, theta):
    return sum((m * abs(_dot(s, theta) - y) for s, y, m in act), ZERO)


def _solve_primal_l1(ctx: _Ctx, plus_sets, act):
    K = ctx.K
    nv = K + len(act)
    lp = LinearProgram(nv, [0] * K + [to_fraction(m) for _, _, m in act])
    for i, (s, y, _) in enumerate(act):
        e = [0] * len(act)
        e[i] = 1
        lp.add_row([to_fraction(v) for v in s] + e, ">=", to_fraction(y))
        e[i] = -1
        lp.add_row([to_fraction(v) for v in s] + e, "<=", to_fraction(y))
    for g in ctx.constraint_rows(plus_sets):
        lp.add_row([to_fraction(v) for v in g] + [0] * len(act), ">=", 0)
    out = solve_lp(lp)
    return [mpq(v) for v in out.point[:K]]


# ---------------------------------------------------------------------------
# l^2 cells
# ---------------------------------------------------------------------------


def _cell_l2(ctx: _Ctx, spec: SubproblemSpec):
    """Exact optimum of one l^2 cell by active-set enumeration.

    For each linearly independent set ``A`` of at most ``k(d+1)`` cell rows the
    stationarity system of ``min |S theta - y|^2_M`` on ``{g_A . theta = 0}`` is
    solved exactly; feasible solutions are candidates. Sets are visited by
    size, and the search stops at the first feasible point whose multipliers
    all have the right sign: the cell problem is convex, so that point is
    optimal. Returns ``(value, theta, systems_solved, skipped)``.
    """
    plus_sets = [set(P) for P in spec.dichotomies]
    S = ctx.signature_rows(plus_sets, spec.signs)
    K = ctx.K
    const = ZERO
    act = []
    for c, y, m in ctx.obs:
        if c in S:
            act.append((S[c], y, m))
        else:
            const += m * y * y
    if not act:
        return const, [ZERO] * K, 0, 0
    Q = [[sum((m * s[a] * s[b] for s, _, m in act), ZERO) for b in range(K)] for a in range(K)]
    g = [sum((m * y * s[a] for s, y, m in act), ZERO) for a in range(K)]
    G = ctx.constraint_rows(plus_sets)

    best = None
    solved = skipped = 0
    basis = IncrementalBasis(K)
    chosen: list = []

    def candidate():
        """Score the current active set; True when it certifies the optimum."""
        nonlocal best, solved, skipped
        r = len(chosen)
        M = [Q[a] + [G[i][a] for i in chosen] for a in range(K)]
        M += [G[i] + [ZERO] * r for i in chosen]
        rhs = g + [ZERO] * r
        solved += 1
        sol = solve_square_mpq(M, rhs)
        if sol is None:
            part = nullspace_particular(M, rhs)
            if part is None:
                skipped += 1
                return False
            sol = part[0]
        theta = sol[:K]
        if any(_dot(row, theta) < 0 for row in G):
            return False
        val = const + sum((m * (_dot(s, theta) - y) ** 2 for s, y, m in act), ZERO)
        key = (val, tuple(theta))
        if best is None or key < best:
            best = key
        # stationarity reads Q theta + G_A^T mu = g, so mu <= 0 means the
        # multipliers of the ">= 0" rows are nonnegative: a KKT point
        return all(mu <= 0 for mu in sol[K:])

    def dfs(start, depth):
        if len(chosen) == depth:
            return candidate()
        for i in range(start, len(G)):
            if basis.push(G[i], ZERO):
                chosen.append(i)
                done = dfs(i + 1, depth)
                chosen.pop()
                basis.pop()
                if done:
                    return True
        return False

    for depth in range(K + 1):
        if dfs(0, depth):
            break
    return best[0], list(best[1]), solved, skipped


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

_CTX: dict = {}


def _install(ctx):
    _CTX["ctx"] = ctx


def _work_l1(spec):
    value, theta, lps = _cell_l1(_CTX["ctx"], spec)
    return value, theta, lps


def _work_l2(spec):
    value, theta, solved, skipped = _cell_l2(_CTX["ctx"], spec)
    return value, theta, solved, skipped


def _drive(data: Dataset, k: int, power: int, threads: int, budget: int,
           precision_bits: int) -> TrainResult:
    if k < 1:
        raise ValueError("k must be positive")
    prep = prepare(data)
    ctx = _Ctx(prep, k)
    cells, n_dich = _cells(prep, k, budget)
    keyed = sorted(((_lower_bound(ctx, [set(P) for P in c.dichotomies], c.signs, power), c)
                    for c in cells), key=lambda t: (t[0], t[1]))

    # incumbent: the zero network
    zero_val = sum((m * (abs(y) if power == 1 else y * y) for _, y, m in prep.obs), ZERO)
    best_val, best_theta, best_cell = zero_val, [ZERO] * ctx.K, None
    best_signs = (1,) * k
    solved = lp_solves = skipped = pruned = 0

    def beats(val, cell):
        if val != best_val:
            return val < best_val
        return best_cell is None or cell < best_cell

    work = _work_l1 if power == 1 else _work_l2
    with WorkerPool(threads, _install, (ctx,)) as pool:
        pos = 0
        while pos < len(keyed):
            if keyed[pos][0] > best_val:
                pruned += len(keyed) - pos
                break
            wave = keyed[pos:pos + WAVE]
            pos += WAVE
            todo = [c for lb, c in wave if lb < best_val or (lb == best_val and beats(lb, c))]
            pruned += len(wave) - len(todo)
            for cell, out in zip(todo, pool.map(work, todo)):
                solved += 1
                if power == 1:
                    val, theta, lps = out
                    lp_solves += lps
                else:
                    val, theta, systems, skip = out
                    lp_solves += systems
                    skipped += skip
                if beats(val, cell):
                    best_val, best_theta, best_cell, best_signs = val, theta, cell, cell.signs

    spec = LossSpec.lp(power)
    stats = {"cells": len(cells), "dichotomies": n_dich, "pruned": pruned}
    if power == 2:
        stats["skipped_systems"] = skipped
    return finish(prep, spec, best_theta, best_signs, best_val, best_cell, solved, lp_solves,
                  precision_bits, stats)


def train_l1(data: Dataset, k: int = 1, threads: int = 1, budget: int = DEFAULT_CELL_BUDGET,
             precision_bits: int = DEFAULT_PRECISION_BITS) -> TrainResult:
    """Globally minimise ``sum_i m_i |f(x_i) - y_i|`` over k-neuron networks."""
    return _drive(data, k, 1, threads, budget, precision_bits)


def train_l2(data: Dataset, k: int = 1, threads: int = 1, budget: int = DEFAULT_CELL_BUDGET,
             precision_bits: int = DEFAULT_PRECISION_BITS) -> TrainResult:
    """Globally minimise ``sum_i m_i (f(x_i) - y_i)^2`` over k-neuron networks."""
    return _drive(data, k, 2, threads, budget, precision_bits)


def solve_subproblem_l1(spec: SubproblemSpec, data: Dataset) -> tuple:
    """Best network of one l^1 cell and its exact loss.

    Indices in ``spec`` refer to the distinct points of ``data`` in order of
    first occurrence.
    """
    prep = prepare(data)
    ctx = _Ctx(prep, spec.k)
    if any(i >= ctx.n for P in spec.dichotomies for i in P):
        raise IndexError("dichotomy index out of range")
    value, theta, _ = _cell_l1(ctx, spec)
    return prep.network(theta, spec.signs), to_fraction(value)


def solve_subproblem_l2(spec: SubproblemSpec, data: Dataset) -> tuple:
    prep = prepare(data)
    ctx = _Ctx(prep, spec.k)
    value, theta, _, _ = _cell_l2(ctx, spec)
    return prep.network(theta, spec.signs), to_fraction(value)


__all__ = [
    "SubproblemSpec",
    "TrainResult",
    "train_l1",
    "train_l2",
    "solve_subproblem_l1",
    "solve_subproblem_l2",
]
