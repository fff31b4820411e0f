"""Which decision rules are reasonable?

A rule is admissible when it treats the two premises alike and never flips
from accept to reject as votes move toward P and Q.
"""

# %%
from doctrinal import builtin_rule, enumerate_admissible, is_admissible

family = enumerate_admissible(3)
print("admissible rules for n=3:", family.count)
sizes = sorted(len(rule.accepts()) for rule in family)
print("accept-set sizes:", sizes)
named = {k: builtin_rule(k, 3) for k in ("constant0", "CbyC", "IbyI", "constant1")}
for name, rule in named.items():
    print(f"  {name} accepts {len(rule.accepts())} of 20 tables, member: {rule in list(family)}")

# %%
# Plurality of the P-and-Q cell is not monotone once n reaches 5.
res = is_admissible(builtin_rule("R0", 5))
low, high = res.witness
print("R0 admissible for n=5:", bool(res), res.condition, tuple(low), "->", tuple(high))

# %%
print("n=7 count:", enumerate_admissible(7).count)
