import itertools
import math
import random
from fractions import Fraction as F

import pytest

from exactrelu import (
    Dataset,
    LossSpec,
    ReluNetwork,
    SubproblemSpec,
    affine_hull_reduce,
    check_realizable,
    loss_value,
    solve_subproblem_concave,
    train_concave,
    train_l1,
    verify_pointedness,
)
from exactrelu.concave import EquationPool
from exactrelu.convex import _Ctx
from exactrelu._prep import prepare

from helpers import planted_dataset, random_dataset

BUMP = Dataset.from_xy([[0], [1], [2]], [0, 1, 0])


def test_bump_p0():
    assert train_concave(BUMP, p=0).loss.exact == 1


def test_bump_p1_matches_l1():
    assert train_concave(BUMP, p=1).loss.exact == train_l1(BUMP).loss.exact == 1


def test_p_range():
    with pytest.raises(ValueError):
        train_concave(BUMP, p=2)
    with pytest.raises(ValueError):
        train_concave(BUMP, p=-1)


def test_unknown_strategy():
    with pytest.raises(ValueError):
        train_concave(BUMP, strategy="magic")


@pytest.mark.parametrize("p", [0, F(1, 3), F(1, 2), 1])
def test_realizable_zero(p):
    data, _ = planted_dataset(random.Random(3), 5, 2)
    assert train_concave(data, p=p).loss.approx == 0


class TestSubproblem:
    def test_zero_labels(self):
        d = Dataset.from_xy([[0], [1], [3]], [0, 0, 0])
        net, lv, _ = solve_subproblem_concave(SubproblemSpec(((1, 2),), (1,)), d, F(1, 2))
        assert lv.approx == 0

    def test_two_point_counter(self):
        d = Dataset.from_xy([[0], [1]], [1, 2])
        for plus in ((), (0,), (1,), (0, 1)):
            for a in (1, -1):
                _, _, examined = solve_subproblem_concave(SubproblemSpec((plus,), (a,)), d, 1)
                assert examined <= 6

    @pytest.mark.parametrize("seed", range(5))
    def test_counter_bound(self, seed):
        rng = random.Random(seed)
        d = random_dataset(rng, 4, 2)
        res = train_l1(d)
        _, lv, examined = solve_subproblem_concave(res.certificate, d, 1)
        n = 4
        assert examined <= math.comb(n + n, 3)
        assert lv.exact == res.loss.exact

    def test_candidate_satisfies_cell(self):
        d = random_dataset(random.Random(7), 5, 2)
        res = train_concave(d, p=F(1, 2))
        plus = res.certificate.dichotomies[0]
        nr = res.network.neurons[0]
        for i, pt in enumerate(d.points):
            pre = nr.preactivation(pt.x)
            assert (pre >= 0) if i in plus else (pre <= 0)


class TestPool:
    def test_sizes(self):
        prep = prepare(BUMP)
        pool = EquationPool(_Ctx(prep, 1), (1,))
        assert len(pool.partition_rows) == 3
        assert all(len(r[0]) == 2 for r in pool.rows)


class TestPointedness:
    def test_simplex(self):
        d = Dataset.from_xy([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], [0] * 4)
        for k in (1, 2, 3):
            ok, idx = verify_pointedness(d, k)
            assert ok and len(idx) == 4

    def test_collinear(self):
        d = Dataset.from_xy([[0, 0], [1, 1], [2, 2]], [0] * 3)
        assert verify_pointedness(d, 1) == (False, ())

    @pytest.mark.parametrize("seed", range(5))
    def test_after_reduction(self, seed):
        d = random_dataset(random.Random(seed), 4, 3, lo=-1, hi=1)
        red, _ = affine_hull_reduce(d)
        assert verify_pointedness(red, 2)[0]


def _max_fittable(data):
    """Largest subset one neuron fits exactly, by testing each subset's realizability."""
    pts = data.points
    for size in range(len(pts), 0, -1):
        for sub in itertools.combinations(pts, size):
            cand = Dataset(data.dim, sub)
            # a = +1 fits nonnegative targets, a = -1 fits their negatives
            if all(p.label.alpha >= 0 for p in sub) and check_realizable(cand)[0]:
                return size
            if all(p.label.alpha <= 0 for p in sub) and check_realizable(cand.scaled_labels(-1))[0]:
                return size
    return 0


@pytest.mark.parametrize("seed", range(10))
def test_p0_against_fit_subsets(seed):
    rng = random.Random(seed)
    data = random_dataset(rng, rng.randint(2, 6), rng.randint(1, 2), ylo=-2, yhi=2)
    assert train_concave(data, p=0).loss.exact == len(data.points) - _max_fittable(data)


@pytest.mark.parametrize("seed", range(6))
def test_strategies_agree(seed):
    rng = random.Random(seed)
    data = random_dataset(rng, 5, rng.randint(1, 2), mult=True)
    for p in (0, F(1, 2), 1):
        a = train_concave(data, p=p)
        b = train_concave(data, p=p, strategy="cells")
        assert abs(a.loss.approx - b.loss.approx) < 1e-9


def test_monotone_in_p_on_small_residuals():
    d = Dataset.from_xy([[0], [1]], [F(1, 3), F(1, 2)])
    z = ReluNetwork.zero(1)
    vals = [loss_value(z, d, LossSpec.lp(p)).approx for p in (0, F(1, 4), F(1, 2), 1)]
    assert all(float(a) >= float(b) - 1e-9 for a, b in zip(vals, vals[1:]))
