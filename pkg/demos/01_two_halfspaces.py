"""Smallest possible tour: find a point in the intersection of two
halfspaces with an overrelaxed cyclic projection method.

The overshoot r/phi beyond each projection is what buys finite convergence:
the iterate lands strictly inside the processed set, so after finitely many
corrections it satisfies everything at once (exact sign test, no tolerance).
"""

import numpy as np

from feasik import (ConstantRelaxation, Constraint, Cyclic, Halfspace,
                    Harmonic, PhiOne, Problem, RunConfig, UniformOverActive,
                    feasible, solve)

problem = Problem(2, [
    Constraint(0, Halfspace([1.0, 0.0], 0.0)),   # x <= 0
    Constraint(1, Halfspace([0.0, 1.0], 0.0)),   # y <= 0
])

cfg = RunConfig(
    problem=problem,
    control=Cyclic([0, 1]),
    relaxation=ConstantRelaxation(1.0),
    overrelaxation=Harmonic(),        # r_j = 1/(j+1), divergent sum
    phi=PhiOne(),
    weights=UniformOverActive(),
    x0=[1.0, 1.0],
    counter_mode="bracketed",
)

result = solve(cfg)
print(f"status = {result.status}, feasible at k = {result.k_feasible}, "
      f"corrections = {result.corrections}\n")

print(f"{'k':>3} {'[k]':>4} {'active':>7} {'step':>10}   iterate")
for rec in result.trace:
    act = ",".join(map(str, rec.active)) or "-"
    print(f"{rec.k:>3} {rec.bracket_k:>4} {act:>7} {rec.step_norm:>10.4f}   "
          f"({rec.x[0]: .6f}, {rec.x[1]: .6f})")

final = result.final
print(f"\nfinal iterate ({final[0]}, {final[1]}) is feasible with tolerance 0:",
      feasible(problem, final, tol=0.0))
print("note the terminal point sits strictly inside both halfspaces -- the "
      "overshoot never stops exactly on a boundary.")
