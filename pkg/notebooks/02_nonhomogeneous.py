"""
A non-homogeneous scenario, step by step
========================================

Alice has two settings (2 and 3 outcomes), Bob three binary settings. We
follow one inequality through reordering, the symmetric basis, projection,
and the final lexicographic minimum.
"""
import numpy as np

from bellcanon import OrientedExpression, Scenario, canonical_scenario, decompose, lex_min
from bellcanon.compendium import from_collins_gisin, to_collins_gisin
from bellcanon.expr import reorder
from bellcanon.nsbasis import from_symmetric, normalize_tensor, project, to_symmetric

s = Scenario([(2, 3), (2, 2, 2)])

# Collins-Gisin coordinates: index = alice + 4 * bob, 0 meaning "no measurement"
A = {None: 0, (1, 1): 1, (1, 2): 2, (2, 2): 3}
B = {None: 0, (1, 1): 1, (1, 2): 2, (1, 3): 3}
cg = [0] * 16
terms = [((1, 1), None, 1), (None, (1, 1), 1), (None, (1, 2), 1),
         ((1, 1), (1, 1), -1), ((1, 1), (1, 2), -1), ((1, 2), (1, 1), -1), ((2, 2), (1, 2), -1),
         ((1, 1), (1, 3), -1), ((1, 2), (1, 3), 1), ((2, 2), (1, 3), 1)]
for a, b, v in terms:
    cg[A[a] + 4 * B[b]] += v

e = -from_collins_gisin(s, cg)          # ">= 0" becomes "<= 0"


def show(title, flat, shape):
    print(title)
    print(np.array([int(v) for v in flat]).reshape(shape, order="F"))

#%%
# Reorder to the canonical scenario: the 3-outcome setting comes first.
target, rmap = canonical_scenario(s)
r = from_collins_gisin(target, to_collins_gisin(reorder(e, rmap)))
shape = r.scenario.party_sizes()
show(f"reordered in {target}, <= 0", r.as_ints(), shape)

t = to_symmetric(r)
show("24 * gamma", t.gamma.ravel(order="F") * 24, t.gamma.shape)

p, bound = project(t, 0)
pn, bn, _ = normalize_tensor(p, bound)
show(f"projected gamma, <= {bn}", pn.gamma.ravel(order="F"), pn.gamma.shape)

prob = from_symmetric(p) * 24
show(f"probability form, <= {bound * 24}", prob.coefficients, shape)
m = lex_min(prob)[0]
show(f"lexicographic minimum, <= {bound * 24}", m.coefficients, shape)

#%%
# decompose does all of this in one call and records how to undo it
tree = decompose(OrientedExpression(e, {"local": 0}))
print(tree.describe())
assert tree.recompose() == e
