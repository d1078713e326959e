"""
Fitting intervals instead of numbers
====================================

Each label is a range. The loss is the worst distance of a prediction to its
range, and for one neuron a short sequence of linear programs finds the
exact minimum.
"""

from exactrelu import Dataset, check_realizable, train_linf_interval

# a zigzag no single rectifier can follow
zig = Dataset.from_xy([[0], [1], [2]], [1, 0, 1])
res = train_linf_interval(zig)
print("best worst-case error:", res.gamma, "with w =", res.w, "b =", res.b)
print("linear programs solved:", res.lp_solves)

# widening the targets makes the zigzag reachable
loose = Dataset.from_intervals([[0], [1], [2]], [(1, 2), (0, 1), (1, 3)])
ok, witness = check_realizable(loose)
print("loose targets realizable:", ok, witness)

# a negative range can never be met: a rectifier outputs nothing below zero
neg = Dataset.from_intervals([[0]], [(-2, -1)])
print("negative target error:", train_linf_interval(neg).gamma)
