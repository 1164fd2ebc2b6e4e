"""
Finite fields, dual bases and qudit Pauli operators
===================================================

Build GF(4), look at its trace-dual basis, and check that the Pauli
operators it induces on C^4 obey the symplectic commutation rule.
"""
import numpy as np

from pmdkit.finite_field import field_trace, inner_product, make_field
from pmdkit.pauli import commutation_phase, enumerate_paulis, make_label, pauli_matrix

# GF(4) = F_2[x] / (x^2 + x + 1), polynomial basis {1, x}
ctx = make_field(2, 2)
print("modulus (low degree first):", ctx.modulus)
print("dual basis:", [b.coeffs for b in ctx.dual_basis])

# the defining property of the dual pair
for i, a in enumerate(ctx.basis):
    print([field_trace(a * b) for b in ctx.dual_basis])

# coordinates in the dual pair turn field products into dot products
x = ctx.element([0, 1])
print("<x, x> =", inner_product(x, x), "= tr(x^2) =", field_trace(x * x))

###############################################################################
# One GF(4) qudit is two qubits.  E_{x,0} shifts the second qubit only.
e = pauli_matrix(make_label(ctx, [x], [ctx.zero()]), ctx)
print(e.real.astype(int))

###############################################################################
# Commutation phases over a qutrit field, checked against the matrices
gf3 = make_field(3)
w = np.exp(2j * np.pi / 3)
labels = list(enumerate_paulis(gf3, 1))
bad = 0
for l1 in labels:
    for l2 in labels:
        e1, e2 = pauli_matrix(l1, gf3), pauli_matrix(l2, gf3)
        k = commutation_phase(l1, l2)
        bad += not np.allclose(e1 @ e2, w**k * e2 @ e1)
print(f"{len(labels) ** 2} pairs checked, {bad} mismatches")
