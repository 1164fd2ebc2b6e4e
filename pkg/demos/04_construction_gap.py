"""
Redundancy of a known construction versus the lower bound
=========================================================

The purity-testing construction uses redundancy 2*ell for
eps <= sqrt((2n+1) q^-ell); the corollary of the lower bound only forces
ell - log_q(2(2n+1)).  The difference grows like ell.
"""
from pmdkit import bergamaschi_gap

print("   n  ell  lambda_con  lambda_lower     gap   eps_upper")
for n in (10, 100, 1000):
    for ell in (4, 10, 20, 40):
        g = bergamaschi_gap(n, ell, 2)
        flag = "  (out of regime)" if g.out_of_regime else ""
        print(f"{n:4d} {ell:4d} {g.lambda_construction:11d} {g.lambda_lower:13.3f} "
              f"{g.gap:7.3f} {g.epsilon_upper:11.4f}{flag}")
