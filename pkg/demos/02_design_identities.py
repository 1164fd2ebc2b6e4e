"""
The Pauli twirl and the average overlap
=======================================

Averaging E O E^+ over all q^(2n) Pauli operators returns Tr(O)/q^n times
the identity.  Applied to a code projector this pins the average of
P E^+ P E P to q^(-lambda) P, whatever the code.
"""
import numpy as np

from pmdkit import average_overlap, design_average_check, make_field, random_codespace
from pmdkit.pmd_metrics import pauli_twirl

ctx = make_field(3)
rng = np.random.default_rng(0)
op = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))

twirled = pauli_twirl(ctx, 2, op)
print("diagonal of twirl:", np.round(np.diag(twirled), 12)[:3], "...")
print("Tr(O)/9          :", np.round(np.trace(op) / 9, 12))
print("deviation        :", design_average_check(ctx, 2, op))

###############################################################################
# Average overlap for random codes of every size on two qutrits
for k in range(3):
    value, dev = average_overlap(random_codespace(ctx, 2, k, seed=k))
    print(f"k={k}: value {value:.15f}  expected {3.0 ** -(2 - k):.15f}  deviation {dev:.1e}")
