"""
Composite expressions and their bounds
======================================

A product of two inequalities, possibly plus a constant, splits into
factors. Bounds of the factors give the bound of the product.
"""

from bellcanon import BellExpression, OrientedExpression, Scenario, decompose, split_composite, tensor
from bellcanon.canonical import compose_bounds, compose_facets, facet_check, local_bound

s = Scenario.homogeneous(2, 2, 2)
chsh = BellExpression.from_function(s, lambda a, x: (-1) ** (a[0] + a[1] + x[0] * (x[1] + 1)))
print("CHSH is composite:", split_composite(chsh) is not None)

# P_A(1) + P_B(1) + P_AB(11) becomes a product once 1 is added
s11 = Scenario([(2,), (2,)])
e = BellExpression.from_function(s11, lambda a, x: (a[0] == 1) + (a[1] == 1) + (a == (1, 1)))
sp = split_composite(e)
print("kappa", sp.kappa, "factors", [f.as_ints() for f in sp.factors])

#%%
# Bounds of a product: CHSH in [-2, 2] twice
print("composed:", compose_bounds((-2, 2), (-2, 2)))
print("brute force:", local_bound(tensor(chsh, chsh)))

#%%
# Composing facets: positivity on a party with an unused setting, and CHSH
pos = BellExpression.from_function(Scenario([(2, 2)]), lambda a, x: -1 if a == (1,) and x == (1,) else 0)
oe = compose_facets(pos, 0, chsh, 2)
print("local bound", local_bound(oe.expression), "facet:", facet_check(oe.expression, 0))
tree = decompose(oe)
print(tree.describe())
