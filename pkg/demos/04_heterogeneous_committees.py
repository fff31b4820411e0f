"""Committees whose members differ in competence."""

# %%
from fractions import Fraction as F

from doctrinal import (
    ConditionalCompetence,
    PerVoter,
    builtin_rule,
    metrics,
    paradox_probability,
    table_distribution,
)

n = 5
mixed = PerVoter((F("0.55"), F("0.6"), F("0.7"), F("0.8"), F("0.95")))
for kind in ("IbyI", "PbyP", "CbyC"):
    m = metrics(n, mixed, builtin_rule(kind, n))
    print(f"{kind}: TPR={float(m.tpr):.4f}  FPR={float(m.fpr):.4f} ({m.fpr_state.value})")

# %%
# Judging Q may depend on how the voter judged P.
voter = ConditionalCompetence(F("0.8"), F("0.9"), F("0.5"))
print("cells under PQ:", [str(p) for p in voter.cells("PQ")])
dist = table_distribution(3, voter, "PQ")
print("P(all three vote P and Q) =", dist[(3, 0, 0, 0)])

# %%
# How often do premise-wise and conclusion-wise voting disagree?
r1, r3 = builtin_rule("IbyI", n), builtin_rule("CbyC", n)
for state in ("PQ", "PnotQ", "notPnotQ"):
    p = paradox_probability(n, mixed, state, r1, r3)
    print(f"{state:>9}: {float(p):.5f}")
