"""Rates of the three majority rules for an 11-member committee.

Run with ``python demos/01_rates_by_competence.py``.
"""

# %%
from fractions import Fraction

from doctrinal import builtin_rule, metrics
from doctrinal.exact import format_fixed, parse_grid

n = 11
w = Fraction(3, 4)

# %% [markdown]
# Each voter judges P and Q correctly with probability theta.  TPR is the
# chance the committee accepts P and Q when both hold; FPR is the worst case
# over the three other states.

# %%
print(f"{'theta':>6} {'rule':>5} {'TPR':>7} {'FPR':>7} {'AOT':>7} {'WAOT':>7}")
for theta in parse_grid("0.55:0.95:0.05"):
    for kind in ("IbyI", "PbyP", "CbyC"):
        m = metrics(n, theta, builtin_rule(kind, n), [w])
        cols = [format_fixed(v) for v in (m.tpr, m.fpr, m.aot, m.waot[w])]
        print(f"{float(theta):6.2f} {kind:>5} " + " ".join(f"{c:>7}" for c in cols))

# %%
# The values are exact rationals underneath.
m = metrics(3, Fraction(9, 10), builtin_rule("IbyI", 3))
print("n=3, theta=0.9, IbyI TPR =", m.tpr, "=", float(m.tpr))
