"""Why the correction counter matters, part 1: alternating projections.

Indexing the overrelaxation by the step number k lets satisfied constraints
"burn" schedule entries.  With two halfspaces, alpha = 1/2 and the
nonmonotone schedule r_k = 1/(k+1) on even steps and 2^-k on odd steps, the
odd-step entries shrink geometrically while only odd steps ever move the
iterate: y follows exactly y_{2k} = 2^{-2k} > 0 and never reaches the set.

Re-indexing the same run by the correction counter [k] (and a monotone
harmonic schedule) restores finite convergence in a handful of steps.
"""

from feasik import oracle_a1, reproduce_a1, reproduce_a1_bracketed, solve
from feasik.certificates import build_a1_config

result = solve(build_a1_config("raw", max_iter=10_000))
print("raw mode, 10000 steps:", result.status)
print(f"{'k':>4} {'engine y_k':>24} {'closed form':>24}")
for k in (0, 1, 2, 3, 4, 10, 20, 40, 100, 200):
    _, want = oracle_a1(k)
    print(f"{k:>4} {result.trace[k].x[1]:>24.17g} {want:>24.17g}")

print("\nengine and closed form agree bit for bit: the whole trajectory "
      "stays on exact powers of two in binary64.\n")

rep = reproduce_a1()
print("full oracle check (k <= 100):", "PASS" if rep.ok else "FAIL",
      f"max_rel_err={rep.max_rel_err:.1e}")

rep = reproduce_a1_bracketed()
print("\nsame geometry, bracketed counter + harmonic schedule:")
for line in rep.lines():
    print(" ", line)
