"""
CH and CHSH are the same inequality
===================================

Two textbook forms of the two-party, two-setting, two-outcome inequality
look different when written out. Canonicalization shows they are one object.
"""

from bellcanon import BellExpression, OrientedExpression, Scenario, decompose, lex_min
from bellcanon.symmgroup import chain_for, enumerate_orbit, rank_of

s = Scenario.homogeneous(2, 2, 2)

# CH, written with marginals; marginals go through setting 1 of the other party
def ch(a, x):
    v = {(1, 1): 1, (1, 2): -1, (2, 1): 1, (2, 2): 1}[x] if a == (1, 1) else 0
    v -= (a[0] == 1 and x == (2, 1)) + (a[1] == 1 and x == (1, 1))
    return v

e_ch = BellExpression.from_function(s, ch)
print("CH coefficients:", e_ch.as_ints())

tree = decompose(OrientedExpression(e_ch, {"local": 0}))
print(tree.describe())

# the correlator form, bound 2
chsh = BellExpression.from_function(s, lambda a, x: (-1) ** (a[0] + a[1] + x[0] * (x[1] + 1)))
print("same canonical form as CHSH:", tree.expression == lex_min(chsh)[0])
print("scale, shift:", tree.scale, tree.shift)

#%%
# The relabeling group of (2,2,2) has 128 elements but CHSH has only 8 images.
chain = chain_for(s)
orbit = enumerate_orbit(chsh, chain)
for member in orbit:
    print(rank_of(member, chain), member.as_ints())
