"""Brute-force references for tests.

Nothing here touches the trainers' enumeration code: these routines use only
the core data types, loss evaluation and the LP solver, and they are written
for clarity rather than speed.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product

from .core import (
    Dataset,
    DimensionError,
    LossSpec,
    LossValue,
    Neuron,
    ReluNetwork,
    dedupe,
    loss_value,
    rational,
    vector,
)
from .dichotomies import Dichotomy
from .lp import LinearProgram, solve_lp

ORACLE_MAX_POINTS = 14


def _better(a: LossValue, b: LossValue | None) -> bool:
    if b is None:
        return True
    if a.is_exact and b.is_exact:
        return a.exact < b.exact
    return a.approx < b.approx


def oracle_dichotomies(points, bound: int = ORACLE_MAX_POINTS) -> list:
    """Every plus-set of the points tested with a margin-1 feasibility LP."""
    pts = [vector(p) for p in points]
    if len(set(pts)) != len(pts):
        raise ValueError("points must be distinct")
    n = len(pts)
    if n > bound:
        raise ValueError(f"{n} points exceed the oracle bound {bound}")
    if n == 0:
        return [Dichotomy((), ())]
    d = len(pts[0])
    out = []
    for size in range(n + 1):
        for plus in combinations(range(n), size):
            s = set(plus)
            lp = LinearProgram(d + 1, [0] * (d + 1))
            for i, x in enumerate(pts):
                if i in s:
                    lp.add_row(list(x) + [1], ">=", 1)
                else:
                    lp.add_row(list(x) + [1], "<=", 0)
            if solve_lp(lp).optimal:
                out.append(Dichotomy(plus, tuple(i for i in range(n) if i not in s)))
    return sorted(out)


# ---------------------------------------------------------------------------
# one-dimensional single neuron
# ---------------------------------------------------------------------------


def _pieces(zs):
    """``(sign of w, active indices, cone rows)`` for every breakpoint gap.

    Cone rows ``(cw, cb)`` mean ``cw*w + cb*b >= 0``.
    """
    n = len(zs)
    for g in range(n + 1):
        for sw in (1, -1):
            rows = [(sw, 0)]
            if sw == 1:
                active = list(range(g, n))
                if g > 0:
                    rows.append((-zs[g - 1], -1))
                if g < n:
                    rows.append((zs[g], 1))
            else:
                active = list(range(g))
                if g > 0:
                    rows.append((zs[g - 1], 1))
                if g < n:
                    rows.append((-zs[g], -1))
            yield active, rows


def _intersect(l1, l2):
    (a1, b1, c1), (a2, b2, c2) = l1, l2
    det = a1 * b2 - a2 * b1
    if det == 0:
        return None
    return ((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)


def _candidates_vertex(zs, obs, active, rows, a):
    lines = [(cw, cb, Fraction(0)) for cw, cb in rows]
    act = set(active)
    for i, y, _ in obs:
        if i in act:
            lines.append((zs[i], Fraction(1), a * y))
    out = {(Fraction(0), Fraction(0))}
    for l1, l2 in combinations(lines, 2):
        pt = _intersect(l1, l2)
        if pt is not None:
            out.add(pt)
    return out


def _candidates_l2(zs, obs, active, rows, a):
    act = set(active)
    sel = [(zs[i], y, m) for i, y, m in obs if i in act]
    out = {(Fraction(0), Fraction(0))}
    if not sel:
        return out
    # interior stationary point of sum m (a(wz+b) - y)^2
    szz = sum(m * z * z for z, _, m in sel)
    sz = sum(m * z for z, _, m in sel)
    s1 = sum(m for _, _, m in sel)
    szy = sum(m * z * a * y for z, y, m in sel)
    sy = sum(m * a * y for _, y, m in sel)
    det = szz * s1 - sz * sz
    if det != 0:
        out.add(((szy * s1 - sz * sy) / det, (szz * sy - sz * szy) / det))
    # stationary point along each boundary line through the origin
    for cw, cb in rows:
        u = (cb, -cw)
        num = sum(m * a * y * (u[0] * z + u[1]) for z, y, m in sel)
        den = sum(m * (u[0] * z + u[1]) ** 2 for z, y, m in sel)
        if den != 0:
            t = num / den
            out.add((t * u[0], t * u[1]))
    return out


def _linf_piece(data, active, rows):
    """``min gamma`` over one piece with ``a = +1``, as an LP in ``(w, b, gamma)``."""
    lp = LinearProgram(3, [0, 0, 1])
    lp.bound(2, lower=0)
    act = set(active)
    for cw, cb in rows:
        lp.add_row([cw, cb, 0], ">=", 0)
    for i, (z, lab) in enumerate(data):
        alpha, beta = lab
        if i in act:
            lp.add_row([z, 1, 1], ">=", alpha)
            lp.add_row([z, 1, -1], "<=", beta)
        else:
            lp.add_row([0, 0, 1], ">=", alpha)
            lp.add_row([0, 0, 1], ">=", -beta)
    out = solve_lp(lp)
    return (out.point[0], out.point[1]) if out.optimal else None


def oracle_train_1d(data: Dataset, loss: LossSpec, precision_bits: int = 128) -> LossValue:
    """Optimal loss of one neuron on 1-D data by sweeping breakpoint gaps.

    On every gap between consecutive sorted points, with the slope sign fixed,
    the active set is fixed and the parameters range over a pointed cone.
    The per-piece optimum is found in closed form: least-squares stationary
    points for ``p = 2``, intersections of residual and boundary lines for
    ``0 <= p <= 1``, and a 3-variable LP for the interval loss (``a = +1``).
    """
    if data.dim != 1:
        raise DimensionError("oracle_train_1d needs one-dimensional data")
    data = dedupe(data)
    zs = sorted({pt.x[0] for pt in data.points})
    index = {z: i for i, z in enumerate(zs)}
    best = None
    cands = set()
    if loss.kind == "linf":
        labs = {}
        for pt in data.points:
            labs.setdefault(index[pt.x[0]], []).append((pt.label.alpha, pt.label.beta))
        rows_data = [(zs[i], lab) for i in sorted(labs) for lab in labs[i]]
        idx_data = [i for i in sorted(labs) for _ in labs[i]]
        for active, rows in _pieces(zs):
            act = set(active)
            act_rows = [j for j, i in enumerate(idx_data) if i in act]
            pt = _linf_piece(rows_data, act_rows, rows)
            if pt is not None:
                cands.add((pt, 1))
    else:
        if data.has_intervals:
            raise ValueError("l^p loss needs scalar labels")
        p = loss.p
        if p not in (0, 2) and not (0 < p <= 1):
            raise ValueError("oracle_train_1d handles p in [0, 1], p = 2 and the interval loss")
        obs = [(index[pt.x[0]], pt.label.alpha, pt.multiplicity) for pt in data.points]
        for active, rows in _pieces(zs):
            for a in (1, -1):
                gen = _candidates_l2 if p == 2 else _candidates_vertex
                for pt in gen(zs, obs, active, rows, a):
                    cands.add((pt, a))
    for (w, b), a in sorted(cands):
        net = ReluNetwork((Neuron((w,), b, a),))
        lv = loss_value(net, data, loss, precision_bits)
        if _better(lv, best):
            best = lv
    return best


# ---------------------------------------------------------------------------
# interval loss: every member of the LP family
# ---------------------------------------------------------------------------


def oracle_linf_sweep(data: Dataset) -> dict:
    """Solve the interval-loss LP for every ladder position, from scratch.

    Returns the LP values, the true loss of every LP witness, the positions
    whose LP value lies in its own ladder step, and the overall minimum.
    """
    data = data.as_intervals()
    d = data.dim
    ts = sorted({pt.label.alpha for pt in data.points if pt.label.alpha > 0})
    r = len(ts)
    values, losses, valid = [], [], []
    for s in range(1, r + 2):
        lo = ts[s - 2] if s >= 2 else Fraction(0)
        hi = ts[s - 1] if s <= r else None
        lp = LinearProgram(d + 2, [0] * (d + 1) + [1])
        lp.bound(d + 1, lower=0)
        for pt in data.points:
            x = list(pt.x)
            if hi is not None and pt.label.alpha >= hi:
                lp.add_row(x + [1, 1], ">=", pt.label.alpha)
            lp.add_row(x + [1, -1], "<=", pt.label.beta)
            lp.add_row([0] * (d + 1) + [1], ">=", -pt.label.beta)
        out = solve_lp(lp)
        g = out.point[d + 1]
        net = ReluNetwork.single(out.point[:d], out.point[d], 1)
        values.append(g)
        losses.append(loss_value(net, data, LossSpec.linf()).exact)
        if lo <= g and (hi is None or g < hi):
            valid.append(s)
    return {"gamma": values, "witness_loss": losses, "valid": valid, "min": min(losses),
            "r": r}


# ---------------------------------------------------------------------------
# lattice search
# ---------------------------------------------------------------------------


def grid_oracle(data: Dataset, loss: LossSpec, bounds=(-2, 2), resolution: int = 4,
                k: int = 1, precision_bits: int = 128) -> LossValue:
    """Best loss over networks whose parameters lie on a uniform rational lattice.

    Every lattice network is a real network, so the value is an upper bound on
    the optimum.
    """
    lo, hi = rational(bounds[0]), rational(bounds[1])
    if resolution < 1 or hi < lo:
        raise ValueError("need resolution >= 1 and lo <= hi")
    grid = [lo + Fraction(t) * (hi - lo) / resolution for t in range(resolution + 1)]
    d = data.dim
    signs = [(1,)] if loss.kind == "linf" and k == 1 else list(product((-1, 1), repeat=k))
    best = None
    for params in product(grid, repeat=k * (d + 1)):
        for sg in signs:
            neurons = tuple(Neuron(params[j * (d + 1):j * (d + 1) + d], params[j * (d + 1) + d], sg[j])
                            for j in range(k))
            lv = loss_value(ReluNetwork(neurons), data, loss, precision_bits)
            if _better(lv, best):
                best = lv
    return best
