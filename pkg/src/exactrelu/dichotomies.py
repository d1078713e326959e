"""Dichotomies of a finite point set induced by open halfspaces.

A plus-set ``S`` is admissible when some affine function is strictly positive
on ``S`` and non-positive elsewhere. Points sitting on a neuron's breakpoint
hyperplane contribute ``[0]_+ = 0`` whichever side they are assigned to, so
these plus-sets are exactly the activation patterns a training algorithm has
to consider.

Two enumerators are provided. :func:`enumerate_open_dichotomies` decides every
candidate plus-set with a margin-1 feasibility LP (extending feasible
prefixes only), and :func:`enumerate_open_dichotomies_geometric` walks the
hyperplanes spanned by the points, recursing into the points that lie on each
hyperplane, in ``O(n^d)`` time.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from gmpy2 import mpq

from ._numeric import to_mpq
from .core import vector
from .lp import LinearProgram, solve_lp

DEFAULT_MAX_POINTS = 16


@dataclass(frozen=True, order=True)
class Dichotomy:
    plus: tuple
    minus: tuple

    @classmethod
    def from_plus(cls, plus, n: int) -> "Dichotomy":
        plus = tuple(sorted(plus))
        s = set(plus)
        return cls(plus, tuple(i for i in range(n) if i not in s))


def _check_distinct(points) -> list:
    pts = [vector(p) for p in points]
    if len(set(pts)) != len(pts):
        raise ValueError("points must be pairwise distinct (dedupe first)")
    return pts


def separating_witness(points: Sequence, plus) -> tuple | None:
    """``(w, b)`` with ``<w,x>+b >= 1`` on ``plus`` and ``<= 0`` elsewhere, or ``None``."""
    pts = [vector(p) for p in points]
    d = len(pts[0]) if pts else 0
    plus = set(plus)
    lp = LinearProgram(d + 1, [0] * (d + 1))
    for i, x in enumerate(pts):
        if i in plus:
            lp.add_row(list(x) + [1], ">=", 1)
        else:
            lp.add_row(list(x) + [1], "<=", 0)
    out = solve_lp(lp)
    if not out.optimal:
        return None
    return out.point[:d], out.point[d]


def is_open_dichotomy(points: Sequence, plus) -> bool:
    pts = _check_distinct(points)
    if not pts:
        return True
    return separating_witness(pts, plus) is not None


def enumerate_open_dichotomies(points: Sequence, max_points: int = DEFAULT_MAX_POINTS) -> list:
    """All open dichotomies, each certified by a feasibility LP.

    Membership is decided point by point; a partial assignment that admits no
    separating hyperplane cannot be extended, so its subtree is skipped. The
    witness of a feasible prefix is reused for a child whenever it already
    separates the new point.
    """
    pts = _check_distinct(points)
    n = len(pts)
    if n > max_points:
        raise ValueError(f"{n} distinct points exceed the brute-force bound {max_points}")
    if n == 0:
        return [Dichotomy((), ())]
    rows = [list(x) + [1] for x in pts]
    found: list = []

    def fits(theta, i, positive):
        v = sum((a * b for a, b in zip(rows[i], theta)), 0)
        return v >= 1 if positive else v <= 0

    def recurse(t, plus, theta):
        if t == n:
            found.append(tuple(plus))
            return
        for positive in (False, True):
            if positive:
                plus.append(t)
            if fits(theta, t, positive):
                child = theta
            else:
                w = separating_witness(pts[: t + 1], plus)
                child = None if w is None else tuple(w[0]) + (w[1],)
            if child is not None:
                recurse(t + 1, plus, child)
            if positive:
                plus.pop()

    d = len(pts[0])
    recurse(0, [], tuple([0] * d + [-1]))
    return [Dichotomy.from_plus(p, n) for p in sorted(found)]


# ---------------------------------------------------------------------------
# geometric enumeration
# ---------------------------------------------------------------------------


def _hull_coords(coords: list) -> list:
    """Project mpq points onto lexicographically first affinely independent coordinates."""
    if len(coords) <= 1:
        return [()] * len(coords)
    base = coords[0]
    rows = [[a - b for a, b in zip(x, base)] for x in coords[1:]]
    ncols = len(base)
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][c] != 0:
                f = rows[i][c] / pr[c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return [tuple(x[c] for c in pivots) for x in coords]


def _hyperplane_through(coords: list, idx: tuple) -> list | None:
    """Normal ``(w, b)`` of the hyperplane through ``coords[idx]`` or None if degenerate."""
    m = len(coords[idx[0]])
    rows = [list(coords[i]) + [mpq(1)] for i in idx]
    ncols = m + 1
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    if r < m:
        return None
    free = next(c for c in range(ncols) if c not in pivots)
    normal = [mpq(0)] * ncols
    normal[free] = mpq(1)
    for i, c in enumerate(pivots):
        normal[c] = -rows[i][free]
    return normal


def _geometric(labels: list, coords: list) -> set:
    """Plus-sets (as frozensets of ``labels``) of the points ``coords``."""
    everything = frozenset(labels)
    out = {frozenset(), everything}
    if len(labels) <= 1:
        return out
    coords = _hull_coords(coords)
    m = len(coords[0])
    if m == 0:
        return out
    n = len(labels)
    done: set = set()
    for idx in combinations(range(n), m):
        if idx in done:
            continue
        normal = _hyperplane_through(coords, idx)
        if normal is None:
            continue
        vals = [sum((a * b for a, b in zip(normal[:m], x)), normal[m]) for x in coords]
        zero = tuple(i for i in range(n) if vals[i] == 0)
        for sub in combinations(zero, m):
            done.add(sub)
        pos = frozenset(labels[i] for i in range(n) if vals[i] > 0)
        neg = frozenset(labels[i] for i in range(n) if vals[i] < 0)
        inner = _geometric([labels[i] for i in zero], [coords[i] for i in zero])
        for s in inner:
            out.add(pos | s)
            out.add(neg | s)
    return out


def enumerate_open_dichotomies_geometric(points: Sequence, d: int | None = None) -> list:
    """Open dichotomies via the hyperplanes spanned by the points.

    Every admissible plus-set equals the strict side of a hyperplane through
    ``dim`` affinely independent points, united with an admissible plus-set
    of the points lying on that hyperplane. Degenerate configurations are
    handled exactly by that recursion.
    """
    pts = _check_distinct(points)
    n = len(pts)
    if n == 0:
        return [Dichotomy((), ())]
    if d is not None and any(len(p) != d for p in pts):
        raise ValueError("point dimension does not match d")
    coords = [tuple(to_mpq(v) for v in p) for p in pts]
    sets = _geometric(list(range(n)), coords)
    return [Dichotomy.from_plus(s, n) for s in sorted(tuple(sorted(s)) for s in sets)]


def cover_count(n: int, d: int) -> int:
    """Number of open dichotomies of ``n`` points in general position in R^d."""
    from math import comb

    if n == 0:
        return 1
    return 2 * sum(comb(n - 1, i) for i in range(d + 1))
