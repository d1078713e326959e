"""Preprocessing shared by the trainers.

Every trainer works on the distinct coordinates of the data expressed in the
coordinates of its affine hull. Observations keep their own labels and
multiplicities and point back to a coordinate index.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from gmpy2 import mpq

from ._numeric import to_fraction, to_mpq
from .core import (
    AffineTransform,
    Dataset,
    DimensionError,
    LabelKindError,
    Neuron,
    ReluNetwork,
    affine_hull_reduce,
    dedupe,
    lift_network,
)

MAX_DIM = 6


@dataclass
class Prepared:
    original: Dataset
    reduced: Dataset
    transform: AffineTransform
    coords: list  # distinct reduced coordinates, mpq tuples
    obs: list  # (coord index, label value mpq, multiplicity)
    dim: int

    @property
    def n_coords(self) -> int:
        return len(self.coords)

    def homogeneous(self) -> list:
        """Rows ``(x, 1)`` for each distinct coordinate."""
        return [tuple(c) + (mpq(1),) for c in self.coords]

    def network(self, theta, signs) -> ReluNetwork:
        """Lift a reduced-space parameter vector back to the input space."""
        D = self.dim + 1
        neurons = []
        for j, a in enumerate(signs):
            blk = theta[j * D:(j + 1) * D]
            w = [to_fraction(v) for v in blk[:-1]]
            neurons.append(Neuron(w, to_fraction(blk[-1]), a))
        return lift_network(self.transform, ReluNetwork(tuple(neurons)))


def prepare(data: Dataset, scalar: bool = True, max_dim: int = MAX_DIM) -> Prepared:
    if scalar and data.has_intervals:
        raise LabelKindError("this trainer needs scalar labels")
    red, t = affine_hull_reduce(dedupe(data))
    if red.dim > max_dim:
        raise DimensionError(f"affine dimension {red.dim} exceeds the limit {max_dim}")
    index: dict = {}
    coords = []
    obs = []
    for pt in red.points:
        c = index.get(pt.x)
        if c is None:
            c = index[pt.x] = len(coords)
            coords.append(tuple(to_mpq(v) for v in pt.x))
        if scalar:
            obs.append((c, to_mpq(pt.label.alpha), pt.multiplicity))
        else:
            obs.append((c, (to_mpq(pt.label.alpha), to_mpq(pt.label.beta)), pt.multiplicity))
    return Prepared(data, red, t, coords, obs, red.dim)


def multiset_count(items: int, k: int) -> int:
    return comb(items + k - 1, k)
