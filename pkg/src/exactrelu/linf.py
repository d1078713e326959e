"""Single-neuron training for the maximum interval-distance loss.

The prediction of a single ReLU is ``[<w,x> + b]_+ >= 0``. Sort the distinct
positive lower interval ends ``0 < t_1 < ... < t_r`` and put ``t_0 = 0``,
``t_{r+1} = inf``. If the optimal loss lies in ``[t_{s-1}, t_s)`` then every
point with ``alpha_i >= t_s`` must be active, while points with smaller
``alpha_i`` are within the loss from below for free. That turns the problem
into the LP family built by :func:`build_lp_s`, and a binary search over
``s`` locates the right member with ``O(log r)`` solves.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Dataset,
    LossSpec,
    ReluNetwork,
    dist_interval,
    loss_value,
)
from .lp import LinearProgram, solve_lp

__all__ = [
    "ThresholdLadder",
    "LinfResult",
    "dist_interval",
    "build_lp_s",
    "solve_lp_s",
    "train_linf_interval",
    "check_realizable",
]


@dataclass(frozen=True)
class ThresholdLadder:
    """Distinct positive lower ends, strictly increasing."""

    values: tuple

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        if any(v <= 0 for v in vals) or any(a >= b for a, b in zip(vals, vals[1:])):
            raise ValueError("ladder values must be positive and strictly increasing")
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, data: Dataset) -> "ThresholdLadder":
        data = data.as_intervals()
        return cls(tuple(sorted({pt.label.alpha for pt in data.points if pt.label.alpha > 0})))

    @property
    def r(self) -> int:
        return len(self.values)

    def __getitem__(self, s: int):
        """``t_s`` with ``t_0 = 0`` and ``t_{r+1} = None`` standing for infinity."""
        if s == 0:
            return Fraction(0)
        if s == self.r + 1:
            return None
        return self.values[s - 1]


def build_lp_s(data: Dataset, s: int, ladder: ThresholdLadder | None = None) -> LinearProgram:
    """``min gamma`` over ``(w, b, gamma)`` for ladder position ``s`` in ``1..r+1``.

    Points with ``alpha_i >= t_s`` get ``alpha_i - gamma <= <w,x_i> + b``; every
    point gets ``<w,x_i> + b <= beta_i + gamma`` and ``gamma >= -beta_i`` (the
    neuron cannot output negative values); ``gamma >= 0``.
    """
    data = data.as_intervals()
    ladder = ladder or ThresholdLadder.of(data)
    if not 1 <= s <= ladder.r + 1:
        raise ValueError(f"s must lie in 1..{ladder.r + 1}")
    d = data.dim
    thr = ladder[s]
    lp = LinearProgram(d + 2, [0] * (d + 1) + [1])
    lp.bound(d + 1, lower=0)
    for pt in data.points:
        x = list(pt.x)
        a, b = pt.label.alpha, pt.label.beta
        if thr is not None and a >= thr:
            lp.add_row(x + [1, 1], ">=", a)
        lp.add_row(x + [1, -1], "<=", b)
        if b < 0:
            lp.add_row([0] * (d + 1) + [1], ">=", -b)
    return lp


def solve_lp_s(data: Dataset, s: int, ladder: ThresholdLadder | None = None) -> tuple:
    """``(gamma(s), w, b)`` for one member of the family."""
    data = data.as_intervals()
    out = solve_lp(build_lp_s(data, s, ladder))
    if not out.optimal:
        raise AssertionError(f"LP({s}) ended {out.status}; it is always feasible and bounded")
    d = data.dim
    return out.point[d + 1], tuple(out.point[:d]), out.point[d]


@dataclass(frozen=True)
class LinfResult:
    w: tuple
    b: Fraction
    gamma: Fraction
    s: int
    lp_solves: int

    def __iter__(self):
        return iter((self.w, self.b, self.gamma))

    @property
    def network(self) -> ReluNetwork:
        return ReluNetwork.single(self.w, self.b, 1)


def train_linf_interval(data: Dataset) -> LinfResult:
    """Exact minimum of ``max_i dist([<w,x_i>+b]_+, [alpha_i, beta_i])``.

    Binary search for the first ``s`` with ``gamma(s) < t_s``. That predicate
    is false below the optimal position and true from it on, and the LP
    witness there attains ``max(gamma(s), t_{s-1})``, which is the optimum.
    """
    data = data.as_intervals()
    ladder = ThresholdLadder.of(data)
    r = ladder.r
    cache: dict = {}

    def gamma_at(s):
        if s not in cache:
            cache[s] = solve_lp_s(data, s, ladder)
        return cache[s]

    lo, hi = 1, r + 1  # answer lies in [lo, hi]; position r+1 always qualifies
    found = None
    while lo < hi:
        s = (lo + hi) // 2
        g = gamma_at(s)[0]
        if g >= ladder[s]:
            lo = s + 1
        elif g >= ladder[s - 1]:
            found = s
            break
        else:
            hi = s
    s = found if found is not None else lo
    g, w, b = gamma_at(s)
    gamma = max(g, ladder[s - 1])
    net = ReluNetwork.single(w, b, 1)
    true = loss_value(net, data, LossSpec.linf()).exact
    if true != gamma:
        raise AssertionError(f"witness loss {true} differs from the optimum {gamma}")
    return LinfResult(w, b, gamma, s, len(cache))


def check_realizable(data: Dataset) -> tuple:
    """``(True, (w, b))`` when one ReLU fits every interval, else ``(False, None)``."""
    g, w, b = solve_lp_s(data, 1)
    if g == 0:
        return True, (w, b)
    return False, None
