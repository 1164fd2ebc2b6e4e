"""Numerical toolkit for Pauli manipulation detection codes over GF(q)."""

__version__ = "0.1.0"

from pmdkit.codespace import (  # noqa: E402
    CodeSpace,
    bloch_state,
    load_codespace,
    projector,
    random_codespace,
    save_codespace,
)
from pmdkit.finite_field import FieldCtx, FieldElement, make_field  # noqa: E402
from pmdkit.pauli import PauliLabel, apply_pauli, enumerate_paulis, pauli_matrix  # noqa: E402
from pmdkit.pmd_metrics import (  # noqa: E402
    average_overlap,
    bergamaschi_gap,
    corollary1_bound,
    design_average_check,
    epsilon_of,
    pmd_report,
    theorem1_bound,
)

__all__ = [
    "CodeSpace", "FieldCtx", "FieldElement", "PauliLabel",
    "apply_pauli", "average_overlap", "bergamaschi_gap", "bloch_state",
    "corollary1_bound", "design_average_check", "enumerate_paulis", "epsilon_of",
    "load_codespace", "make_field", "pauli_matrix", "pmd_report", "projector",
    "random_codespace", "save_codespace", "theorem1_bound",
]
