"""Operator norms, the PMD error parameter and the bound formulas.

The error parameter of a code C (orthonormal basis, projector P = C C^+) is

    eps = max over nontrivial labels E of ||P E P||_inf,

evaluated through the k-dimensional reduction M_E = C^+ E C, which has the
same operator norm because C is an isometry.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from pmdkit.codespace import CodeSpace
from pmdkit.finite_field import FieldCtx, prime_power
from pmdkit.pauli import (
    DEFAULT_MAX_LABELS,
    PauliLabel,
    SizeLimitError,
    apply_pauli,
    label_from_index,
    max_dense_dim,
    num_paulis,
    pauli_chunks,
    pauli_kernel,
)

EIG_MAX_DIM = 64
POWER_RTOL = 1e-12
POWER_MAX_ITER = 10_000
# fixed so that results never depend on the worker count
BLOCK_SIZE = 256
THEOREM_TOL = 1e-9


class NormConvergenceError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# operator norm


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value.

    Small matrices use a Hermitian eigensolver on the dilation [[0, M], [M^+, 0]],
    whose eigenvalues are +-sigma_i; this keeps absolute accuracy even when
    the norm is tiny.  Larger ones use power iteration on M^+ M.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError("operator_norm expects a matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if m.size == 0:
        return 0.0
    if max(m.shape) <= EIG_MAX_DIM:
        return float(_dilation_norms(m[None])[0])
    return _power_norm(m)


def _dilation_norms(ms: np.ndarray) -> np.ndarray:
    r, c = ms.shape[1:]
    h = np.zeros((ms.shape[0], r + c, r + c), dtype=complex)
    h[:, :r, r:] = ms
    h[:, r:, :r] = ms.conj().transpose(0, 2, 1)
    return np.maximum(np.linalg.eigvalsh(h)[:, -1], 0.0)


def _power_norm(m: np.ndarray) -> float:
    rng = np.random.default_rng(0x5EED)
    v = rng.standard_normal(m.shape[1]) + 1j * rng.standard_normal(m.shape[1])
    v /= np.linalg.norm(v)
    prev = None
    for _ in range(POWER_MAX_ITER):
        w = m.conj().T @ (m @ v)
        rq = float(np.real(np.vdot(v, w)))
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if prev is not None and abs(rq - prev) <= POWER_RTOL * rq:
            return math.sqrt(rq)
        prev = rq
    raise NormConvergenceError(f"power iteration did not converge in {POWER_MAX_ITER} steps")


def _norms(ms: np.ndarray) -> np.ndarray:
    if ms.shape[0] == 0:
        return np.zeros(0)
    if max(ms.shape[1:]) <= EIG_MAX_DIM:
        return _dilation_norms(ms)
    return np.array([_power_norm(x) for x in ms])


# ---------------------------------------------------------------------------
# reduced error matrices


def _reduced_block(cs: CodeSpace, indices: np.ndarray) -> np.ndarray:
    kernel = pauli_kernel(cs.ctx, cs.n)
    ec = kernel.apply(indices, cs.basis)
    return np.einsum("nk,lnj->lkj", cs.basis.conj(), ec)


def reduced_error_matrix(cs: CodeSpace, label: PauliLabel) -> np.ndarray:
    """M_E = C^+ E C, a q^k x q^k matrix with ||M_E|| = ||P E P||."""
    if label.n != cs.n:
        raise ValueError(f"label acts on {label.n} qudits, code on {cs.n}")
    if label.a and label.a[0].ctx_id != cs.ctx.ctx_id:
        raise ValueError("label and code use different fields")
    return _reduced_block(cs, np.array([label.index()]))[0]


def _check_enumeration(cs: CodeSpace, max_labels: int) -> int:
    total = num_paulis(cs.ctx, cs.n)
    if total > max_labels:
        raise SizeLimitError(f"q^(2n) = {total} exceeds enumeration limit {max_labels}")
    return total


def _map_blocks(fn, total: int, workers: int):
    blocks = [np.arange(r.start, r.stop) for r in pauli_chunks(total, BLOCK_SIZE)]
    if workers <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))


def pauli_norms(cs: CodeSpace, workers: int = 1, max_labels: int = DEFAULT_MAX_LABELS) -> np.ndarray:
    """||P E P|| for every label in enumeration order (identity included)."""
    total = _check_enumeration(cs, max_labels)
    parts = _map_blocks(lambda idx: _norms(_reduced_block(cs, idx)), total, workers)
    return np.concatenate(parts)


def epsilon_of(
    cs: CodeSpace, workers: int = 1, max_labels: int = DEFAULT_MAX_LABELS
) -> tuple[float, PauliLabel]:
    """Max of ||P E P|| over nontrivial labels and the first label attaining it."""
    total = _check_enumeration(cs, max_labels)

    def block_max(idx):
        idx = idx[idx != 0]
        if idx.size == 0:
            return (-1.0, 0)
        norms = _norms(_reduced_block(cs, idx))
        j = int(np.argmax(norms))
        return (float(norms[j]), -int(idx[j]))

    # (norm, -index) ordering picks the enumeration-first maximizer
    best = max(_map_blocks(block_max, total, workers))
    return best[0], label_from_index(cs.ctx, cs.n, -best[1])


def orthogonality_witness(
    cs: CodeSpace, label: PauliLabel, psi1: np.ndarray, psi2: np.ndarray, tol: float = 1e-9
) -> float:
    """|<psi1| E^+ |psi2>| for unit code states; never exceeds ||P E P||."""
    psi1 = np.asarray(psi1, dtype=complex)
    psi2 = np.asarray(psi2, dtype=complex)
    for name, psi in (("psi1", psi1), ("psi2", psi2)):
        if abs(np.linalg.norm(psi) - 1.0) > tol:
            raise ValueError(f"{name} is not a unit vector")
        if not cs.contains(psi, tol):
            raise ValueError(f"{name} does not lie in the code space")
    return float(abs(np.vdot(apply_pauli(label, psi1, cs.ctx), psi2)))


# ---------------------------------------------------------------------------
# design identities


def pauli_twirl(ctx: FieldCtx, n: int, op: np.ndarray) -> np.ndarray:
    """(1/q^(2n)) sum_E E O E^+ over all phaseless labels."""
    kernel = pauli_kernel(ctx, n)
    op = np.asarray(op, dtype=complex)
    if op.shape != (kernel.dim, kernel.dim):
        raise ValueError(f"operator must be {kernel.dim} x {kernel.dim}")
    if kernel.dim > max_dense_dim():
        raise SizeLimitError(f"q^n = {kernel.dim} exceeds dense limit {max_dense_dim()}")
    total = num_paulis(ctx, n)
    acc = np.zeros_like(op)
    for r in pauli_chunks(total, BLOCK_SIZE):
        idx = np.arange(r.start, r.stop)
        src, phase = kernel.gather(idx)
        rows = np.arange(len(idx))[:, None]
        eo = phase[:, :, None] * op[src]  # E O
        x = eo.conj().transpose(0, 2, 1)  # (E O)^+
        y = phase[:, :, None] * x[rows, src]  # E (E O)^+ = E O^+ E^+
        acc += y.conj().transpose(0, 2, 1).sum(axis=0)
    return acc / total


def design_average_check(ctx: FieldCtx, n: int, op: np.ndarray) -> float:
    """|| twirl(O) - Tr(O)/q^n I ||; zero for an exact 1-design."""
    op = np.asarray(op, dtype=complex)
    dim = ctx.q**n
    delta = pauli_twirl(ctx, n, op) - np.trace(op) / dim * np.eye(dim)
    return operator_norm(delta)


def average_overlap(cs: CodeSpace, max_labels: int = DEFAULT_MAX_LABELS) -> tuple[float, float]:
    """Value ||A|| and deviation ||A - q^-lambda P|| for A = avg_E P E^+ P E P.

    Computed in the code basis: C^+ A C = avg_E M_E^+ M_E.
    """
    total = _check_enumeration(cs, max_labels)
    kdim = cs.basis.shape[1]
    acc = np.zeros((kdim, kdim), dtype=complex)
    for r in pauli_chunks(total, BLOCK_SIZE):
        ms = _reduced_block(cs, np.arange(r.start, r.stop))
        acc += np.einsum("lji,ljk->ik", ms.conj(), ms)
    a = acc / total
    target = float(cs.q) ** (-cs.redundancy)
    return operator_norm(a), operator_norm(a - target * np.eye(kdim))


# ---------------------------------------------------------------------------
# bounds


def _check_q(q: int) -> None:
    prime_power(int(q))


def theorem1_bound(n: int, lam: int, q: int) -> float:
    """sqrt((q^(2n-lam) - 1) / (q^(2n) - 1)), radicand in exact integers."""
    _check_q(q)
    if n < 1 or not 0 <= lam <= n:
        raise ValueError(f"need n >= 1 and 0 <= lambda <= n, got n={n}, lambda={lam}")
    return math.sqrt(Fraction(q ** (2 * n - lam) - 1, q ** (2 * n) - 1))


def corollary1_bound(epsilon: float, q: int) -> float:
    """Minimum redundancy 2 log_q(1/eps) - log_q 2 for a given error parameter."""
    _check_q(q)
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return (2.0 * math.log(1.0 / epsilon) - math.log(2.0)) / math.log(q)


def epsilon_floor(n: int, q: int) -> float:
    return float(q) ** (-n)


@dataclass(frozen=True)
class GapRecord:
    lambda_construction: int
    epsilon_upper: float
    lambda_lower: float
    gap: float
    out_of_regime: bool

    def to_dict(self) -> dict:
        return asdict(self)


def bergamaschi_gap(n: int, ell: int, q: int) -> GapRecord:
    """Redundancy of the purity-testing construction (2 ell) versus the lower bound.

    The construction has eps <= sqrt((2n+1) q^-ell); feeding that into the
    corollary gives lambda >= ell - log_q(2(2n+1)).  ``out_of_regime`` flags
    eps_upper >= 1, where the construction's guarantee is vacuous.
    """
    _check_q(q)
    if n < 1 or ell < 1:
        raise ValueError(f"need n, ell >= 1, got n={n}, ell={ell}")
    eps_upper = math.sqrt((2 * n + 1) * float(q) ** (-ell))
    lam_lower = ell - math.log(2 * (2 * n + 1)) / math.log(q)
    lam_con = 2 * ell
    return GapRecord(lam_con, eps_upper, lam_lower, lam_con - lam_lower, eps_upper >= 1.0)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class PmdReport:
    n: int
    k: int
    q: int
    lam: int
    epsilon: float
    worst_label: PauliLabel
    bound_theorem1: float
    slack: float
    corollary_lambda_min: float
    eps_floor_ok: bool

    @property
    def violates_theorem1(self) -> bool:
        return self.slack < -THEOREM_TOL

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "q": self.q,
            "lambda": self.lam,
            "epsilon": self.epsilon,
            "worst_label": self.worst_label.to_text(),
            "bound_theorem1": self.bound_theorem1,
            "slack": self.slack,
            "corollary_lambda_min": self.corollary_lambda_min,
            "eps_floor_ok": self.eps_floor_ok,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        return _one_row_csv(self.to_dict())


def pmd_report(cs: CodeSpace, workers: int = 1) -> PmdReport:
    eps, worst = epsilon_of(cs, workers=workers)
    bound = theorem1_bound(cs.n, cs.redundancy, cs.q)
    return PmdReport(
        n=cs.n,
        k=cs.k,
        q=cs.q,
        lam=cs.redundancy,
        epsilon=eps,
        worst_label=worst,
        bound_theorem1=bound,
        slack=eps - bound,
        corollary_lambda_min=corollary1_bound(eps, cs.q) if eps > 0 else math.inf,
        eps_floor_ok=eps >= epsilon_floor(cs.n, cs.q) - THEOREM_TOL,
    )


@dataclass(frozen=True)
class DesignCheckReport:
    moment_deviation: float
    overlap_deviation: float
    overlap_value: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        return _one_row_csv(self.to_dict())


def _one_row_csv(row: dict) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
    w.writeheader()
    w.writerow(row)
    return buf.getvalue()
