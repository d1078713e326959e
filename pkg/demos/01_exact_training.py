"""
Training a single ReLU to the exact optimum
===========================================

Three points on a line that go up and come back down. No single rectifier
can follow that shape, so the best it can do is leave some error behind.
The trainers here find that best error exactly, as a fraction.
"""

from fractions import Fraction

from exactrelu import Dataset, LossSpec, loss_value, train_l1, train_l2

bump = Dataset.from_xy([[0], [1], [2]], [0, 1, 0])

# absolute error: one point always stays a full unit off
res = train_l1(bump)
print("l1 optimum:", res.loss.exact)
print("network:", res.network)

# squared error spreads the miss over all three points
res2 = train_l2(bump)
print("l2 optimum:", res2.loss.exact)

# the certificate names the activation pattern that reached the optimum
print("active points:", res2.certificate.dichotomies, "output signs:", res2.certificate.signs)

# a second neuron can bend the other way and fit everything
print("l1 with two neurons:", train_l1(bump, k=2).loss.exact)

# the reported loss is always recomputed from the returned network
assert loss_value(res2.network, bump, LossSpec.lp(2)).exact == res2.loss.exact
assert res2.loss.exact == Fraction(2, 3)
