"""How large must an IbyI committee be to reach a target rate?"""

# %%
from fractions import Fraction

from doctrinal import NotAttainedError, min_committee_size
from doctrinal.exact import parse_grid

thetas = parse_grid("0.60:0.95:0.05")
targets = [("TPR", Fraction("0.95")), ("TNR", Fraction("0.95")), ("AOT", Fraction("0.45"))]

print("metric  k     " + " ".join(f"{float(t):>5.2f}" for t in thetas))
for metric, k in targets:
    sizes = [min_committee_size("IbyI", th, metric, k) for th in thetas]
    print(f"{metric:<7} {float(k):<5} " + " ".join(f"{s:>5}" for s in sizes))

# %%
# Barely competent voters need very large committees.
try:
    min_committee_size("IbyI", Fraction("0.51"), "TPR", Fraction("0.99"), cap=101)
except NotAttainedError as exc:
    print("not reached:", exc)
