"""
A small compendium on disk
==========================

Records are stored by canonical key. Any relabeled, rescaled or shifted
variant of a stored inequality finds its entry.
"""
import tempfile

from bellcanon import BellExpression, OrientedExpression, Scenario, Store, canonical_form, match, parse
from bellcanon.compendium import canonical_record, serialize

s = Scenario.homogeneous(2, 2, 2)
chsh = BellExpression.from_function(s, lambda a, x: (-1) ** (a[0] + a[1] + x[0] * (x[1] + 1)))

root = tempfile.mkdtemp()
db = Store(root)
rec = canonical_record(canonical_form(OrientedExpression(chsh, {"local": 2})),
                       names=["CHSH"], references=["Clauser, Horne, Shimony, Holt 1969"])
key = db.store(rec)
print("stored", key)
print(rec.text())

#%%
# The CH form of the same inequality, with marginal terms and bound 0
doc = parse("""
scenario: "(2,2,2)"
coefficients: [0, -1, 0, 0, 0, 0, -1, 0, -1, 0, 1, 0, 0, 0, 0, 0]
bounds: {local: 0}
""")
report = match(doc.oriented(), db)
print(report.text())
