"""
The lower bound on epsilon, and how close codes get to it
=========================================================

For an (n, n - lambda, eps)_q code, eps >= sqrt((q^(2n-lambda) - 1) / (q^(2n) - 1)).
Random codes sit far above it; local search closes the gap, exactly so for
one qubit and one qutrit state.
"""
import math

from pmdkit import epsilon_of, make_field, random_codespace, theorem1_bound
from pmdkit.search import SearchConfig, bloch_grid_oracle, optimize_epsilon

print(" q  n  lambda  bound")
for q in (2, 3):
    for n in (1, 2, 3):
        for lam in range(n + 1):
            print(f"{q:2d} {n:2d} {lam:6d}  {theorem1_bound(n, lam, q):.6f}")

###############################################################################
# Random two-qubit codes storing one qubit
ctx = make_field(2)
eps = sorted(epsilon_of(random_codespace(ctx, 2, 1, s))[0] for s in range(50))
print(f"random codes: min {eps[0]:.4f}, median {eps[25]:.4f}; bound {theorem1_bound(2, 1, 2):.4f}")

###############################################################################
# Search
for n, k, p in [(1, 0, 2), (1, 0, 3), (2, 1, 2), (2, 0, 2)]:
    res = optimize_epsilon(SearchConfig(n=n, k=k, p=p, restarts=8, local_steps=400))
    r = res.report
    print(f"q={r.q} n={n} k={k}: eps {r.epsilon:.6f}  bound {r.bound_theorem1:.6f}  slack {r.slack:.2e}")

###############################################################################
# The single-qubit optimum is the state pointing along (1,1,1)/sqrt(3)
grid_eps, (theta, phi) = bloch_grid_oracle(200)
print(f"grid minimum {grid_eps:.5f} at theta={theta:.3f}, phi={phi:.3f};"
      f" 1/sqrt(3) = {1 / math.sqrt(3):.5f}")
