#!/usr/bin/env python3
"""The recurrence-to-probability model.

A candidate signature seen in k distinct deduplicated records is a true
signature with probability 1/(1 + a^k b). Parameter a (> 1) sets how
fast confidence decays as the candidate recurs; b (> 0) sets the odds
for a unique candidate. The strict threshold rho converts into a
maximum recurrence k_max, which is what makes index pruning cheap.
"""

from siglink import ProbabilityModel, max_recurrence, signature_probability

print("== decay in k for a few models ==")
models = [
    ProbabilityModel(a=2.0, b=0.25),
    ProbabilityModel(a=4.0, b=0.25),
    ProbabilityModel(a=4.0, b=0.02),
]
print("  k   " + "   ".join(f"a={m.a:>4} b={m.b:<5}" for m in models))
for k in range(1, 9):
    row = "   ".join(f"{signature_probability(m, k):12.4f}" for m in models)
    print(f"  {k:<3} {row}")

print()
print("== rho becomes a recurrence cap ==")
model = ProbabilityModel(a=4.0, b=0.02)
for rho in (0.1, 0.3, 0.5, 0.8):
    k_max = max_recurrence(model, rho)
    edge = signature_probability(model, k_max) if k_max else float("nan")
    print(f"  rho={rho:<4} -> k_max={k_max:<3} (p at k_max = {edge:.4f})")

# Consistency: p(k_max) clears the threshold, p(k_max + 1) does not.
rho = 0.3
k_max = max_recurrence(model, rho)
assert signature_probability(model, k_max) > rho
assert signature_probability(model, k_max + 1) <= rho
print("  strict-threshold consistency: ok")
