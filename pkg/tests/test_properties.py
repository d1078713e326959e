"""Randomised invariants, driven by hypothesis."""

from fractions import Fraction as F

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from exactrelu import (
    Dataset,
    LossSpec,
    ReluNetwork,
    affine_hull_reduce,
    dedupe,
    enumerate_open_dichotomies_geometric,
    eval_network,
    lift_network,
    loss_value,
    train_concave,
    train_l1,
    train_linf_interval,
    verify_pointedness,
)
from exactrelu.oracles import oracle_dichotomies, oracle_train_1d
from exactrelu.serialization import dataset_from_json, dataset_to_json

small = st.integers(-3, 3)
rat = st.builds(F, st.integers(-6, 6), st.integers(1, 3))
FAST = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def datasets(draw, d=None, max_n=5, mult=False):
    d = draw(st.integers(1, 2)) if d is None else d
    xs = draw(st.lists(st.tuples(*[small] * d), min_size=1, max_size=max_n, unique=True))
    ys = draw(st.lists(small, min_size=len(xs), max_size=len(xs)))
    ms = draw(st.lists(st.integers(1, 3), min_size=len(xs), max_size=len(xs))) if mult else None
    return Dataset.from_xy(xs, ys, ms)


@FAST
@given(datasets(mult=True))
def test_dedupe_keeps_loss(data):
    doubled = Dataset(data.dim, data.points + data.points)
    z = dedupe(doubled)
    net = ReluNetwork.single([1] * data.dim, -1, -1)
    assert loss_value(net, z, LossSpec.lp(1)).exact == loss_value(net, doubled, LossSpec.lp(1)).exact


@FAST
@given(datasets(d=3, max_n=4), st.lists(rat, min_size=4, max_size=4), st.sampled_from([1, -1]))
def test_reduce_then_lift(data, params, a):
    red, t = affine_hull_reduce(data)
    small_net = ReluNetwork.single(params[:red.dim], params[3], a)
    big = lift_network(t, small_net)
    for pt, r in zip(data.points, red.points):
        assert eval_network(big, pt.x) == eval_network(small_net, r.x)
    assert verify_pointedness(red, 1)[0]


@FAST
@given(st.lists(st.tuples(small, small), min_size=1, max_size=7, unique=True))
def test_geometric_equals_oracle(pts):
    assert enumerate_open_dichotomies_geometric(pts, 2) == oracle_dichotomies(pts)


@FAST
@given(datasets(d=1, max_n=5, mult=True))
def test_l1_matches_sweep(data):
    assert train_l1(data).loss.exact == oracle_train_1d(data, LossSpec.lp(1)).exact


@FAST
@given(datasets(max_n=5))
def test_concave_p1_is_l1(data):
    assert train_concave(data, p=1).loss.exact == train_l1(data).loss.exact


@FAST
@given(datasets(max_n=5))
def test_certificate_reevaluates(data):
    res = train_l1(data)
    assert loss_value(res.network, data, LossSpec.lp(1)).exact == res.loss.exact


@FAST
@given(datasets(max_n=6), st.builds(F, st.integers(1, 5), st.integers(1, 4)))
def test_linf_scales(data, c):
    # scaling labels by c > 0 scales the best interval loss by c
    g = train_linf_interval(data).gamma
    assert train_linf_interval(data.scaled_labels(c)).gamma == c * g


@FAST
@given(datasets(max_n=6))
def test_dataset_json_round_trip(data):
    assert dataset_from_json(dataset_to_json(data)) == data
