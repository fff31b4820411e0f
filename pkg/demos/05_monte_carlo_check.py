"""Checking the exact engine against simulated committees."""

# %%
from fractions import Fraction

from doctrinal import builtin_rule, estimate_rates, metrics

n, theta = 11, Fraction("0.6")
rule = builtin_rule("IbyI", n)
exact = metrics(n, theta, rule)
report = estimate_rates(n, theta, rule, trials=200_000, seed=42)

for key, value in (("TPR", exact.tpr), ("FPR", exact.fpr)):
    est, se = report.empirical_rates[key]
    print(f"{key}: simulated {est:.4f} +- {se:.4f}, exact {float(value):.4f}, "
          f"z = {(est - float(value)) / se:+.2f}")

# %%
# Splitting the run does not change a single vote.
from doctrinal import simulate_votes

whole = simulate_votes(n, theta, "PQ", 10_000, seed=42, rule=rule)
parts = simulate_votes(n, theta, "PQ", 4_000, seed=42, rule=rule).merge(
    simulate_votes(n, theta, "PQ", 6_000, seed=42, rule=rule, start=4_000))
print("chunked run identical:", whole == parts)
