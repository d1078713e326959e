"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; pytest prints them in an "acceptance
criteria" section at the end of the run. ``python3 tests/test_acceptance.py``
runs them without pytest.
"""

import math
import random
import time
from decimal import Decimal
from fractions import Fraction as F

from exactrelu import (
    Dataset,
    LossSpec,
    brute_force_multicolored_clique,
    check_realizable,
    compute_params,
    decode_clique,
    enumerate_open_dichotomies,
    enumerate_open_dichotomies_geometric,
    generate_instance,
    loss_value,
    train_concave,
    train_l1,
    train_l2,
    train_linf_interval,
    witness_weights,
)
from exactrelu.cli import main as cli_main
from exactrelu.dichotomies import cover_count
from exactrelu.oracles import oracle_dichotomies, oracle_linf_sweep, oracle_train_1d
from exactrelu.serialization import dataset_to_json, write_json

from helpers import clique_corpus, general_position, planted_dataset, random_dataset, random_points, verdict

TWO, THREE = clique_corpus()


def _summary(failures, total):
    return f"{total - len(failures)}/{total} ok" + (f"; first failure: {failures[0]}" if failures else "")


def test_criterion_1_clique_equivalence_l1():
    t0 = time.time()
    bad = []
    for idx, g in enumerate(TWO + THREE):
        out = generate_instance(g, 1)
        has = brute_force_multicolored_clique(g) is not None
        loss = train_l1(out.dataset).loss.exact
        if (loss <= out.gamma) != has:
            bad.append(f"graph {idx}: loss {loss}, gamma {out.gamma}, clique {has}")
    took = time.time() - t0
    ok = not bad and took <= 600
    verdict("1 clique equivalence, p=1", ok,
            f"{len(TWO)} two-colour + {len(THREE)} three-colour graphs, {_summary(bad, len(TWO) + len(THREE))}, {took:.0f}s")
    assert ok, bad


def _margin(g, p):
    gamma, delta, M = compute_params(g, p)
    k = g.k_colors
    pf, df = float(p), float(delta)
    return min((1 - df) ** pf * (g.n - k + 1) - float(gamma), M * df ** pf - float(gamma))


def test_criterion_2_clique_equivalence_concave():
    t0 = time.time()
    bad = []
    for p in (F(0), F(1, 2)):
        for idx, g in enumerate(TWO):
            out = generate_instance(g, p)
            has = brute_force_multicolored_clique(g) is not None
            lv = train_concave(out.dataset, p=p).loss
            if p == 0:
                below = lv.exact <= out.gamma
            else:
                margin = _margin(g, p)
                if margin < 1e-6:
                    bad.append(f"p={p} graph {idx}: certified margin {margin:g} below 1e-6")
                    continue
                below = float(lv.approx) <= float(out.gamma) + margin / 2
                # a clique instance sits at gamma, the rest at least a margin above
                if has and abs(lv.approx - Decimal(int(out.gamma))) > Decimal("1e-20"):
                    bad.append(f"p={p} graph {idx}: clique loss {lv.approx} != gamma")
                if not has and float(lv.approx) < float(out.gamma) + margin - 1e-9:
                    bad.append(f"p={p} graph {idx}: loss {lv.approx} inside the margin")
            if below != has:
                bad.append(f"p={p} graph {idx}: loss {lv.approx}, gamma {out.gamma}, clique {has}")
    took = time.time() - t0
    ok = not bad and took <= 1800
    verdict("2 clique equivalence, p in {0, 1/2}", ok, f"{_summary(bad, 2 * len(TWO))}, {took:.0f}s")
    assert ok, bad


def _cross_corpus():
    rng = random.Random(33)
    cases = []
    for _ in range(50):
        cases.append((random_dataset(rng, rng.randint(1, 7), rng.randint(1, 2), mult=rng.random() < 0.3), 1))
    for _ in range(30):
        cases.append((random_dataset(rng, rng.randint(1, 7), 1), 2))
    for _ in range(20):
        cases.append((random_dataset(rng, rng.randint(2, 5), 2), 2))
    return cases


def test_criterion_3_concave_p1_equals_l1():
    bad = []
    cases = _cross_corpus()
    for idx, (data, k) in enumerate(cases):
        a, b = train_concave(data, k=k, p=1).loss.exact, train_l1(data, k=k).loss.exact
        if a != b:
            bad.append(f"case {idx} (k={k}): concave {a} vs l1 {b}")
    ok = not bad and len(cases) >= 100
    verdict("3 concave p=1 equals l1", ok, _summary(bad, len(cases)))
    assert ok, bad


def test_criterion_4_dichotomy_counting():
    rng = random.Random(44)
    bad = []
    counted = 0
    for d in (1, 2, 3):
        for n in range(4, 9):
            for _ in range(3):
                pts = general_position(rng, n, d)
                want = cover_count(n, d)
                geo = enumerate_open_dichotomies_geometric(pts, d)
                lp = enumerate_open_dichotomies(pts)
                counted += 1
                if len(geo) != want or len(lp) != want:
                    bad.append(f"d={d} n={n}: {len(geo)}/{len(lp)} vs {want}")
    compared = 0
    for d in (1, 2, 3):
        for n in (3, 6, 9, 12):
            for box in (1, 2, 6):  # small boxes are full of collinear/coplanar points
                pts = random_points(rng, n, d, -box, box)
                compared += 1
                if enumerate_open_dichotomies_geometric(pts, d) != oracle_dichotomies(pts):
                    bad.append(f"set mismatch d={d} n={len(pts)} box={box}")
    line = [(F(i), F(2 * i)) for i in range(6)]
    plane = [(F(a), F(b), F(a + b)) for a in range(3) for b in range(3)]
    for pts, d in ((line, 2), (plane, 3)):
        compared += 1
        if enumerate_open_dichotomies_geometric(pts, d) != oracle_dichotomies(pts):
            bad.append(f"set mismatch on degenerate d={d}")
    ok = not bad
    verdict("4 dichotomy counting and set equality", ok,
            f"{counted} count checks, {compared} set checks, {len(bad)} failures")
    assert ok, bad


def _interval_instance(rng, n, d, spread=6):
    xs = random_points(rng, n, d, -5, 5)
    ivs = []
    for _ in xs:
        a = F(rng.randint(-spread, 3 * spread), rng.randint(1, 3))
        ivs.append((a, a + F(rng.randint(0, 4), rng.randint(1, 3))))
    return Dataset.from_intervals(xs, ivs)


def test_criterion_5_linf():
    rng = random.Random(55)
    bad = []
    for i in range(100):
        data, _ = planted_dataset(rng, rng.randint(1, 10), rng.randint(1, 3), positive=True)
        res = train_linf_interval(data)
        if res.gamma != 0 or not check_realizable(data)[0]:
            bad.append(f"(a) planted {i}: gamma {res.gamma}")
    zig = Dataset.from_xy([[0], [1], [2]], [1, 0, 1])
    if train_linf_interval(zig).gamma != F(1, 2):
        bad.append("(b) zigzag gamma != 1/2")
    swept = 0
    worst_ratio = 0
    for i in range(60):
        n = rng.choice((2, 5, 10, 20, 33))
        data = _interval_instance(rng, n, rng.randint(1, 2))
        sweep = oracle_linf_sweep(data)
        if sweep["r"] > 32:
            continue
        swept += 1
        res = train_linf_interval(data)
        if res.gamma != sweep["min"]:
            bad.append(f"(c) instance {i}: search {res.gamma} vs sweep {sweep['min']}")
        cap = math.ceil(math.log2(sweep["r"] + 1)) + 1
        worst_ratio = max(worst_ratio, res.lp_solves / cap)
        if res.lp_solves > cap:
            bad.append(f"(d) instance {i}: {res.lp_solves} LP solves > {cap}")
    ok = not bad
    verdict("5 interval-loss trainer", ok,
            f"100 planted, zigzag, {swept} sweeps, max LP solves/bound {worst_ratio:.2f}, {len(bad)} failures")
    assert ok, bad


def test_criterion_6_one_dimensional_oracle():
    rng = random.Random(66)
    bad = []
    for i in range(200):
        data = random_dataset(rng, rng.randint(1, 6), 1, mult=rng.random() < 0.3)
        checks = [
            ("l1", train_l1(data).loss.exact, oracle_train_1d(data, LossSpec.lp(1)).exact),
            ("l2", train_l2(data).loss.exact, oracle_train_1d(data, LossSpec.lp(2)).exact),
            ("linf", train_linf_interval(data).gamma, oracle_train_1d(data, LossSpec.linf()).exact),
            ("p0", train_concave(data, p=0).loss.exact, oracle_train_1d(data, LossSpec.lp(0)).exact),
        ]
        for name, got, want in checks:
            if got != want:
                bad.append(f"instance {i} {name}: {got} vs {want}")
        half = float(train_concave(data, p=F(1, 2)).loss.approx)
        ref = float(oracle_train_1d(data, LossSpec.lp(F(1, 2))).approx)
        if abs(half - ref) > 1e-9:
            bad.append(f"instance {i} p=1/2: {half} vs {ref}")
    ok = not bad
    verdict("6 one-dimensional oracle agreement", ok, _summary(bad, 200))
    assert ok, bad


def test_criterion_7_instance_structure():
    bad = []
    checked = 0
    for p in (F(0), F(1, 2), F(1), F(2)):
        for idx, g in enumerate(TWO + THREE):
            out = generate_instance(g, p)
            checked += 1
            pts = out.dataset.points
            if out.dataset.dim != 2 * g.k_colors:
                bad.append(f"graph {idx}: dim {out.dataset.dim}")
            if any(pt.label.alpha not in (0, 1) for pt in pts):
                bad.append(f"graph {idx}: non-binary label")
            if any(sum(1 for v in pt.x if v != 0) > 4 for pt in pts):
                bad.append(f"graph {idx}: more than 4 nonzeros")
            # a vertex point lives in its colour's plane; the first circle point (0, 1) has one nonzero
            if any(not 1 <= sum(1 for v in pt.x if v != 0) <= 2 for pt in pts if pt.label.alpha == 1):
                bad.append(f"graph {idx}: vertex point outside its colour plane")
            if any(pt.multiplicity != out.m_copies for pt in pts if pt.label.alpha == 0):
                bad.append(f"graph {idx}: midpoint multiplicity")
            clique = brute_force_multicolored_clique(g)
            if clique is None:
                continue
            net = witness_weights(g, clique, p)
            lv = loss_value(net, out.dataset, LossSpec.lp(p))
            exact = lv.exact if lv.is_exact else None
            if (exact is not None and exact != out.gamma) or (exact is None and lv.approx != out.gamma):
                bad.append(f"graph {idx} p={p}: witness loss {lv.approx} != {out.gamma}")
            if sorted(decode_clique(net, out)) != sorted(clique):
                bad.append(f"graph {idx}: decode round trip")
    ok = not bad
    verdict("7 structure of generated instances", ok, _summary(bad, checked))
    assert ok, bad


def _embed(rng, data):
    """``x -> A x + c`` with a random rational injective ``A`` from R^2 to R^4."""
    while True:
        A = [[F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(2)] for _ in range(4)]
        if any(A[i][0] * A[j][1] - A[i][1] * A[j][0] != 0 for i in range(4) for j in range(i + 1, 4)):
            break
    c = [F(rng.randint(-4, 4), rng.randint(1, 2)) for _ in range(4)]
    xs = [[sum(A[i][j] * pt.x[j] for j in range(2)) + c[i] for i in range(4)] for pt in data.points]
    return Dataset(4, tuple(type(pt)(tuple(x), pt.label, pt.multiplicity) for pt, x in zip(data.points, xs)))


def _all_losses(data):
    return {
        "l1": train_l1(data).loss.exact,
        "l1 k=2": train_l1(data, k=2).loss.exact,
        "l2": train_l2(data).loss.exact,
        "p0": train_concave(data, p=0).loss.exact,
        "p1/2": train_concave(data, p=F(1, 2)).loss.approx,
        "linf": train_linf_interval(data).gamma,
    }


def test_criterion_8_monotone_and_invariant():
    rng = random.Random(88)
    bad = []
    for i in range(30):
        data = random_dataset(rng, rng.randint(2, 6), rng.randint(1, 2))
        a, b = train_l1(data).loss.exact, train_l1(data, k=2).loss.exact
        if b > a:
            bad.append(f"instance {i}: k=2 loss {b} > k=1 loss {a}")
    for i in range(10):
        data = random_dataset(rng, rng.randint(3, 5), 2, mult=True)
        base, moved = _all_losses(data), _all_losses(_embed(rng, data))
        for name in base:
            if base[name] != moved[name]:
                bad.append(f"embedding {i} {name}: {base[name]} vs {moved[name]}")
    ok = not bad
    verdict("8 monotone in k, invariant under affine embedding", ok, _summary(bad, 40))
    assert ok, bad


def test_criterion_9_thread_determinism(tmp_path):
    rng = random.Random(99)
    jobs = []
    for i in range(4):
        data = random_dataset(rng, 6, 2, mult=True)
        path = tmp_path / f"d{i}.json"
        write_json(str(path), dataset_to_json(data))
        jobs += [["--p", "1", "--k", "2"], ["--p", "2", "--k", "2"], ["--p", "1/2"], ["--p", "0", "--k", "2"]]
        jobs[-4:] = [["--data", str(path)] + j for j in jobs[-4:]]
    bad = []
    for j, args in enumerate(jobs):
        outs = []
        for t in (1, 4, 8):
            res = tmp_path / f"r{j}_{t}.json"
            code = cli_main(["train", *args, "--threads", str(t), "--result", str(res)])
            outs.append((code, res.read_bytes() if res.exists() else b""))
        if any(o != outs[0] for o in outs) or outs[0][0] != 0:
            bad.append(f"job {j} {' '.join(args[2:])}")
    ok = not bad
    verdict("9 byte-identical results for 1, 4, 8 threads", ok, _summary(bad, len(jobs)))
    assert ok, bad


def test_criterion_10_runtime():
    rng = random.Random(1010)
    d20 = random_dataset(rng, 20, 2, lo=-6, hi=6)
    t0 = time.time()
    train_l1(d20)
    t_l1 = time.time() - t0
    d10 = random_dataset(rng, 10, 2, lo=-6, hi=6)
    t0 = time.time()
    train_concave(d10, p=F(1, 2))
    t_cc = time.time() - t0
    ok = t_l1 <= 60 and t_cc <= 120 and len(d20.points) == 20 and len(d10.points) == 10
    verdict("10 runtime envelope", ok, f"l1 n'=20: {t_l1:.1f}s (cap 60), concave n'=10: {t_cc:.1f}s (cap 120)")
    assert ok


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    failed = 0
    tests = [(int(n.split("_")[2]), fn) for n, fn in globals().items() if n.startswith("test_criterion_")]
    for _, fn in sorted(tests):
        if True:
            try:
                if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as tmp:
                        fn(Path(tmp))
                else:
                    fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
