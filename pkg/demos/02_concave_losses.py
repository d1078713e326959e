"""
Losses that reward fitting some points perfectly
================================================

For p below one the per-point cost |error|^p is concave, so the optimum sits
at a vertex of some activation region. p = 0 simply counts misfit points.
"""

from fractions import Fraction

from exactrelu import Dataset, train_concave, train_l1

data = Dataset.from_xy([[0, 0], [1, 0], [0, 1], [1, 1], [2, 1]], [0, 1, 1, 3, 0])

for p in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)):
    res = train_concave(data, p=p)
    # fractional powers have no exact value; an approximation is reported
    val = res.loss.exact if res.loss.is_exact else f"{float(res.loss.approx):.6f}"
    print(f"p = {p}: optimum {val}")

# at p = 1 the vertex search and the l1 trainer must agree exactly
assert train_concave(data, p=1).loss.exact == train_l1(data).loss.exact

# the search visits a bounded number of candidate systems
res = train_concave(data, p=Fraction(1, 2))
print("systems examined:", res.subproblems_solved, "stats:", res.stats)
