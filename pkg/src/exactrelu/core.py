"""Domain types, exact network evaluation and loss evaluation.

Everything here is exact rational arithmetic on :class:`fractions.Fraction`.
The only approximate quantity is the value of an l^p loss for non-integer p,
which is reported as a high-precision :class:`decimal.Decimal` alongside a
flag saying that it is not exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Sequence

from ._numeric import (
    DEFAULT_PRECISION_BITS,
    decimal_of,
    decimal_pow,
    digits_for_bits,
)

Rational = Fraction
Vector = tuple  # tuple[Fraction, ...]


class DimensionError(ValueError):
    pass


class LabelKindError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration would exceed its configured hard budget."""


def rational(value) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Accepts ints, Fractions, and strings of the form ``"p"`` or ``"p/q"``.
    Floats are rejected: they cannot round-trip exactly through the toolkit.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        s = value.strip()
        if not s or any(c in s for c in ".eE"):
            raise ValueError(f"not a rational literal: {value!r}")
        return Fraction(s)
    if isinstance(value, float):
        raise TypeError(f"floats are not accepted as exact data: {value!r}")
    # gmpy2.mpq and other numbers.Rational implementations
    try:
        return Fraction(int(value.numerator), int(value.denominator))
    except AttributeError:
        raise TypeError(f"cannot interpret {value!r} as a rational") from None


def vector(values: Iterable) -> Vector:
    return tuple(rational(v) for v in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def relu(t: Fraction) -> Fraction:
    return t if t > 0 else Fraction(0)


# ---------------------------------------------------------------------------
# data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Label:
    """A scalar target ``y`` or a target interval ``[alpha, beta]``.

    A scalar label is stored as the degenerate interval ``alpha == beta`` with
    ``is_interval`` false, so both kinds expose the same bounds.
    """

    alpha: Fraction
    beta: Fraction
    is_interval: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha", rational(self.alpha))
        object.__setattr__(self, "beta", rational(self.beta))
        if self.alpha > self.beta:
            raise ValueError(f"interval label needs alpha <= beta, got [{self.alpha}, {self.beta}]")
        if not self.is_interval and self.alpha != self.beta:
            raise ValueError("scalar label must have alpha == beta")

    @classmethod
    def scalar(cls, y) -> "Label":
        y = rational(y)
        return cls(y, y, False)

    @classmethod
    def interval(cls, alpha, beta) -> "Label":
        return cls(rational(alpha), rational(beta), True)

    @property
    def value(self) -> Fraction:
        if self.is_interval:
            raise LabelKindError("interval label has no scalar value")
        return self.alpha


@dataclass(frozen=True)
class LabeledPoint:
    x: Vector
    label: Label
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "x", vector(self.x))
        if not isinstance(self.label, Label):
            object.__setattr__(self, "label", Label.scalar(self.label))
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise ValueError(f"multiplicity must be a positive integer, got {self.multiplicity!r}")
        object.__setattr__(self, "multiplicity", int(self.multiplicity))


@dataclass(frozen=True)
class Dataset:
    dim: int
    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if self.dim < 0:
            raise DimensionError("dimension must be non-negative")
        if not self.points:
            raise ValueError("a dataset needs at least one point")
        for pt in self.points:
            if len(pt.x) != self.dim:
                raise DimensionError(f"point {pt.x} does not have dimension {self.dim}")
        kinds = {pt.label.is_interval for pt in self.points}
        if len(kinds) > 1:
            raise LabelKindError("a dataset cannot mix scalar and interval labels")

    @classmethod
    def from_xy(cls, xs, ys, mult=None) -> "Dataset":
        xs = [vector(x) for x in xs]
        mult = mult if mult is not None else [1] * len(xs)
        if not (len(xs) == len(ys) == len(mult)):
            raise ValueError("xs, ys and mult must have equal length")
        dim = len(xs[0]) if xs else 0
        pts = [LabeledPoint(x, Label.scalar(y), m) for x, y, m in zip(xs, ys, mult)]
        return cls(dim, tuple(pts))

    @classmethod
    def from_intervals(cls, xs, intervals, mult=None) -> "Dataset":
        xs = [vector(x) for x in xs]
        mult = mult if mult is not None else [1] * len(xs)
        dim = len(xs[0]) if xs else 0
        pts = [LabeledPoint(x, Label.interval(a, b), m) for x, (a, b), m in zip(xs, intervals, mult)]
        return cls(dim, tuple(pts))

    @property
    def n(self) -> int:
        """Total point count, multiplicities included."""
        return sum(pt.multiplicity for pt in self.points)

    @property
    def has_intervals(self) -> bool:
        return self.points[0].label.is_interval

    def xs(self) -> list:
        return [pt.x for pt in self.points]

    def as_intervals(self) -> "Dataset":
        """Embed scalar labels as degenerate intervals ``[y, y]``."""
        if self.has_intervals:
            return self
        pts = [LabeledPoint(pt.x, Label.interval(pt.label.alpha, pt.label.beta), pt.multiplicity)
               for pt in self.points]
        return Dataset(self.dim, tuple(pts))

    def scaled_labels(self, c) -> "Dataset":
        c = rational(c)
        pts = []
        for pt in self.points:
            lab = pt.label
            if lab.is_interval:
                lo, hi = sorted((lab.alpha * c, lab.beta * c))
                new = Label.interval(lo, hi)
            else:
                new = Label.scalar(lab.alpha * c)
            pts.append(LabeledPoint(pt.x, new, pt.multiplicity))
        return Dataset(self.dim, tuple(pts))


@dataclass(frozen=True)
class Neuron:
    w: Vector
    b: Fraction
    a: int = 1

    def __post_init__(self):
        object.__setattr__(self, "w", vector(self.w))
        object.__setattr__(self, "b", rational(self.b))
        if self.a not in (1, -1):
            raise ValueError("output coefficient a must be +1 or -1")

    def preactivation(self, x) -> Fraction:
        return dot(self.w, x) + self.b


@dataclass(frozen=True)
class ReluNetwork:
    """Two-layer network ``x -> sum_j a_j [<w_j, x> + b_j]_+``."""

    neurons: tuple

    def __post_init__(self):
        object.__setattr__(self, "neurons", tuple(self.neurons))
        if not self.neurons:
            raise ValueError("a network needs at least one hidden neuron")
        dims = {len(nr.w) for nr in self.neurons}
        if len(dims) != 1:
            raise DimensionError("all neurons must share one input dimension")

    @property
    def k(self) -> int:
        return len(self.neurons)

    @property
    def dim(self) -> int:
        return len(self.neurons[0].w)

    @classmethod
    def single(cls, w, b, a: int = 1) -> "ReluNetwork":
        return cls((Neuron(w, b, a),))

    @classmethod
    def zero(cls, dim: int, k: int = 1) -> "ReluNetwork":
        return cls(tuple(Neuron([0] * dim, 0, 1) for _ in range(k)))


@dataclass(frozen=True)
class LossSpec:
    kind: str  # "lp" or "linf"
    p: Fraction | None = None

    def __post_init__(self):
        if self.kind == "lp":
            p = rational(self.p)
            if p < 0:
                raise ValueError("l^p loss needs p >= 0")
            object.__setattr__(self, "p", p)
        elif self.kind == "linf":
            object.__setattr__(self, "p", None)
        else:
            raise ValueError(f"unknown loss kind {self.kind!r}")

    @classmethod
    def lp(cls, p) -> "LossSpec":
        return cls("lp", rational(p))

    @classmethod
    def linf(cls) -> "LossSpec":
        return cls("linf")

    @property
    def exact_values(self) -> bool:
        """True when losses at rational weights are themselves rational."""
        return self.kind == "linf" or self.p.denominator == 1


@dataclass(frozen=True)
class LossValue:
    exact: Fraction | None
    approx: Decimal

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    @classmethod
    def of_exact(cls, value: Fraction, digits: int = 40) -> "LossValue":
        return cls(value, decimal_of(value, digits))

    def __float__(self) -> float:
        return float(self.exact) if self.exact is not None else float(self.approx)


def loss_leq(a: LossValue, b: LossValue, eps: float = 1e-9) -> bool:
    if a.is_exact and b.is_exact:
        return a.exact <= b.exact
    return float(a.approx) <= float(b.approx) + eps


@dataclass(frozen=True)
class AffineTransform:
    """``x -> matrix @ x + offset``, mapping R^d to R^d'."""

    matrix: tuple
    offset: Vector
    in_dim: int = field(default=-1)

    def __post_init__(self):
        mat = tuple(vector(row) for row in self.matrix)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "offset", vector(self.offset))
        if len(mat) != len(self.offset):
            raise DimensionError("matrix rows must match offset length")
        if self.in_dim < 0:
            if not mat:
                raise DimensionError("in_dim is required for a zero-dimensional codomain")
            object.__setattr__(self, "in_dim", len(mat[0]))
        for row in mat:
            if len(row) != self.in_dim:
                raise DimensionError("ragged transform matrix")

    @property
    def out_dim(self) -> int:
        return len(self.matrix)

    @classmethod
    def identity(cls, d: int) -> "AffineTransform":
        rows = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        return cls(rows, [0] * d, d)

    def apply(self, x) -> Vector:
        if len(x) != self.in_dim:
            raise DimensionError(f"expected a point of dimension {self.in_dim}")
        return tuple(dot(row, x) + o for row, o in zip(self.matrix, self.offset))


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def eval_network(net: ReluNetwork, x) -> Fraction:
    if len(x) != net.dim:
        raise DimensionError(f"network expects dimension {net.dim}, got {len(x)}")
    out = Fraction(0)
    for nr in net.neurons:
        t = nr.preactivation(x)
        if t > 0:
            out += t if nr.a == 1 else -t
    return out


def dist_interval(alpha, beta, t) -> Fraction:
    """Distance of ``t`` to the interval ``[alpha, beta]``."""
    alpha, beta, t = rational(alpha), rational(beta), rational(t)
    if alpha > beta:
        raise ValueError("dist_interval needs alpha <= beta")
    return max(alpha - t, Fraction(0), t - beta)


def loss_value(net: ReluNetwork, data: Dataset, loss: LossSpec,
               precision_bits: int = DEFAULT_PRECISION_BITS) -> LossValue:
    """Training loss of ``net`` on ``data``.

    l^p sums ``mult * |yhat - y|^p`` with ``0^0 = 0`` (so p = 0 counts the
    misfit points); the interval loss is the largest distance of a prediction
    to its target interval.
    """
    if net.dim != data.dim:
        raise DimensionError(f"network dimension {net.dim} != data dimension {data.dim}")
    digits = digits_for_bits(precision_bits)
    preds = [eval_network(net, pt.x) for pt in data.points]
    if loss.kind == "linf":
        worst = max(dist_interval(pt.label.alpha, pt.label.beta, yh)
                    for pt, yh in zip(data.points, preds))
        return LossValue.of_exact(worst, digits)
    if data.has_intervals:
        raise LabelKindError("l^p loss needs scalar labels")
    p = loss.p
    if p.denominator == 1:
        e = int(p)
        total = Fraction(0)
        for pt, yh in zip(data.points, preds):
            r = abs(yh - pt.label.alpha)
            if r != 0:
                total += pt.multiplicity * (r ** e if e else 1)
        return LossValue.of_exact(total, digits)
    total = Decimal(0)
    for pt, yh in zip(data.points, preds):
        r = abs(yh - pt.label.alpha)
        if r != 0:
            total += pt.multiplicity * decimal_pow(r, p, digits)
    return LossValue(None, total)


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------


def dedupe(data: Dataset) -> Dataset:
    """Merge points with identical coordinates and labels, summing multiplicities."""
    order: list = []
    merged: dict = {}
    for pt in data.points:
        key = (pt.x, pt.label)
        if key in merged:
            merged[key] += pt.multiplicity
        else:
            merged[key] = pt.multiplicity
            order.append(key)
    pts = tuple(LabeledPoint(x, lab, merged[(x, lab)]) for x, lab in order)
    return Dataset(data.dim, pts)


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    if not rows:
        return rows, pivots
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def affine_hull_basis(xs: Sequence[Vector]) -> list[int]:
    """Pivot coordinates spanning the affine hull of ``xs`` (lexicographically first)."""
    base = xs[0]
    diffs = [[a - b for a, b in zip(x, base)] for x in xs[1:]]
    if not diffs or not diffs[0]:
        return []
    _, pivots = _rref(diffs)
    return pivots


def affine_hull_reduce(data: Dataset) -> tuple[Dataset, AffineTransform]:
    """Re-express the data in coordinates of its affine hull.

    The transform keeps the lexicographically first coordinates that are
    affinely independent on the data, so it is a coordinate projection that
    is bijective on the hull. Full-dimensional data gets the identity.
    """
    d = data.dim
    pivots = affine_hull_basis(data.xs())
    if len(pivots) == d:
        return data, AffineTransform.identity(d)
    rows = [[1 if c == p else 0 for c in range(d)] for p in pivots]
    t = AffineTransform(rows, [0] * len(pivots), d)
    pts = tuple(LabeledPoint(t.apply(pt.x), pt.label, pt.multiplicity) for pt in data.points)
    return Dataset(len(pivots), pts), t


def lift_network(t: AffineTransform, net: ReluNetwork) -> ReluNetwork:
    """Compose a network on the reduced space with ``t``."""
    if net.dim != t.out_dim:
        raise DimensionError(f"network dimension {net.dim} != transform codomain {t.out_dim}")
    neurons = []
    for nr in net.neurons:
        w = [sum((nr.w[r] * t.matrix[r][c] for r in range(t.out_dim)), Fraction(0))
             for c in range(t.in_dim)]
        b = nr.b + dot(nr.w, t.offset)
        neurons.append(Neuron(w, b, nr.a))
    return ReluNetwork(tuple(neurons))
