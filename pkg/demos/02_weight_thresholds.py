"""When does the conservative rule win?

With weight w on false positives, IbyI beats PbyP exactly when w < D(theta).
"""

# %%
from fractions import Fraction

from doctrinal import competence_threshold_C, threshold_curve, weight_order_intervals
from doctrinal.exact import format_fixed

curve = threshold_curve(11, "R1R2")
for theta in ("0.55", "0.6", "0.7", "0.8", "0.9"):
    print(f"D({theta}) = {format_fixed(curve(Fraction(theta)))}")

# %%
# Going the other way: the largest competence at which the two rules tie.
c = competence_threshold_C(curve, Fraction(3, 4))
print("C(0.75) =", format_fixed(c, 6))

# %%
# For three voters the crossing weight equals the competence itself.
print("n=3, D(0.7) =", threshold_curve(3, "R1R2")(Fraction(7, 10)))

# %%
# Splitting the weight axis by the order of all three rules.
for theta in ("0.6", "0.75", "0.9"):
    print(f"theta={theta}")
    for iv in weight_order_intervals(11, Fraction(theta)):
        print(f"  w in ({format_fixed(iv.lo)}, {format_fixed(iv.hi)}): {iv.label}")
