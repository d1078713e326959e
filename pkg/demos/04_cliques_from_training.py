"""
Finding cliques by training a neuron
====================================

A coloured graph becomes a training set: one point per vertex on a circle
inside its colour's plane, plus heavy zero-label points between every pair
that may not appear together. A neuron reaches the target error exactly when
the graph has a clique with one vertex of each colour, and the vertices it
switches on spell that clique out.
"""

from exactrelu import (
    ColoredGraph,
    LossSpec,
    brute_force_multicolored_clique,
    decode_clique,
    generate_instance,
    loss_value,
    train_l1,
    witness_weights,
)

# a five-cycle whose colours alternate, and a path that has no valid pair
cycle = ColoredGraph.build({"a": 1, "b": 2, "c": 1, "d": 2, "e": 1},
                           [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")], 2)
split = ColoredGraph.build({"a": 1, "b": 1, "c": 2}, [("a", "b")], 2)

for name, g in (("cycle", cycle), ("split", split)):
    out = generate_instance(g, 1)
    print(f"{name}: {len(out.dataset.points)} distinct points in R^{out.dataset.dim},",
          f"target {out.gamma}, copies per midpoint {out.m_copies}")
    res = train_l1(out.dataset)
    print("  optimum:", res.loss.exact, "reaches target:", res.loss.exact <= out.gamma)
    print("  brute force says:", brute_force_multicolored_clique(g))
    print("  decoded from trained neuron:", decode_clique(res.network, out))

# the other direction: a known clique gives weights with exactly the target error
out = generate_instance(cycle, 1)
net = witness_weights(cycle, ["a", "b"])
print("hand-built loss:", loss_value(net, out.dataset, LossSpec.lp(1)).exact, "target:", out.gamma)
