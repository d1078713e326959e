"""Seeded generators shared by the test modules."""

import itertools
import random
from fractions import Fraction

from exactrelu import ColoredGraph, Dataset, Neuron, ReluNetwork, eval_network

VERDICTS: list = []


def verdict(label, ok, detail=""):
    """Record one PASS/FAIL line for the acceptance summary."""
    line = f"{'PASS' if ok else 'FAIL'} {label}" + (f" ({detail})" if detail else "")
    VERDICTS.append(line)
    print(line)
    return ok


def random_points(rng, n, d, lo=-4, hi=4):
    """``n`` distinct small-integer points (fewer if the box is too small)."""
    seen = []
    tries = 0
    while len(seen) < n and tries < 1000:
        p = tuple(Fraction(rng.randint(lo, hi)) for _ in range(d))
        if p not in seen:
            seen.append(p)
        tries += 1
    return seen


def general_position(rng, n, d, lo=-30, hi=30):
    """Points with no d+1 on a common hyperplane (checked exactly)."""
    from exactrelu import rank

    while True:
        pts = random_points(rng, n, d, lo, hi)
        ok = all(rank([list(pts[i]) + [1] for i in idx]) == min(len(idx), d + 1)
                 for idx in itertools.combinations(range(n), min(n, d + 1)))
        if ok:
            return pts


def random_dataset(rng, n, d, ylo=-3, yhi=3, lo=-3, hi=3, mult=False):
    xs = random_points(rng, n, d, lo, hi)
    ys = [rng.randint(ylo, yhi) for _ in xs]
    ms = [rng.randint(1, 3) for _ in xs] if mult else None
    return Dataset.from_xy(xs, ys, ms)


def random_network(rng, d, k=1, lo=-3, hi=3, den=2):
    neurons = []
    for _ in range(k):
        w = [Fraction(rng.randint(lo * den, hi * den), den) for _ in range(d)]
        b = Fraction(rng.randint(lo * den, hi * den), den)
        neurons.append(Neuron(w, b, rng.choice((1, -1))))
    return ReluNetwork(tuple(neurons))


def planted_dataset(rng, n, d, k=1, positive=False):
    net = random_network(rng, d, k)
    if positive:
        net = ReluNetwork(tuple(Neuron(nr.w, nr.b, 1) for nr in net.neurons))
    xs = random_points(rng, n, d)
    return Dataset.from_xy(xs, [eval_network(net, x) for x in xs]), net


def random_graph(rng, n, k, p_edge, max_per_color=None):
    while True:
        cols = [rng.randint(1, k) for _ in range(n)]
        counts = [cols.count(c) for c in range(1, k + 1)]
        if min(counts) == 0:
            continue
        if max_per_color and max(counts) > max_per_color:
            continue
        break
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2)
             if cols[u] != cols[v] and rng.random() < p_edge]
    return ColoredGraph.build(cols, edges, k)


def clique_corpus(seed=2024):
    """Graphs for the clique-equivalence checks: 52 with 2 colours, 8 with 3."""
    rng = random.Random(seed)
    two = [
        ColoredGraph.build([1, 2, 1, 2, 1], [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], 2),  # C5
        ColoredGraph.build([1, 2, 1], [(0, 1), (1, 2)], 2),  # path
        ColoredGraph.build([1, 2], [], 2),  # two isolated vertices
    ]
    while len(two) < 52:
        n = rng.randint(3, 6)
        two.append(random_graph(rng, n, 2, rng.choice((0.2, 0.4, 0.6, 0.8))))
    three = [ColoredGraph.build([1, 2, 3], [(0, 1), (1, 2), (0, 2)], 3)]
    while len(three) < 8:
        n = rng.randint(3, 6)
        three.append(random_graph(rng, n, 3, rng.choice((0.4, 0.7, 0.9)), max_per_color=2))
    return two, three
