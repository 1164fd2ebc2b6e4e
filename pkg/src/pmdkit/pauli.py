"""Phaseless n-qudit Pauli operators E_{a,b} over GF(q), q = p^m.

A label (a, b) in F_q^n x F_q^n is realized on C^(q^n) as a tensor product
over qudits j and basis components i of single-digit Weyl operators.  The
a-part is expanded in the polynomial basis, the b-part in its trace-dual
basis.  Layout: qudit 1 is the most significant index of the q^n space, and
within a qudit component i = 1 is the most significant base-p digit.

Sign convention.  With T|x> = |x+1> and R|x> = w^x|x>, one has RT = w TR, so
T^a R^b would satisfy E E' = w^(<a',b> - <a,b'>) E' E.  We realize the X-part
as the shift by -a, i.e. each digit factor is T^(-a_i) R^(b_i), so that

    E_{a,b} E_{a',b'} = w^(<a,b'> - <a',b>) E_{a',b'} E_{a,b}

holds exactly.  For p = 2 the two choices coincide; for any p the set of
operators is the same, only which label names which operator changes.
"""
from __future__ import annotations

import functools
import os
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from pmdkit.finite_field import FieldCtx, FieldElement, FieldError, inner_product, is_prime

DEFAULT_MAX_DIM = 1024
DEFAULT_MAX_LABELS = 10**7


class SizeLimitError(ValueError):
    """A dense matrix or an enumeration would exceed the configured limit."""


def max_dense_dim() -> int:
    """Dense-matrix limit on q^n; ``PMD_MAX_DIM`` overrides the default 1024."""
    value = os.environ.get("PMD_MAX_DIM")
    return int(value) if value else DEFAULT_MAX_DIM


@dataclass(frozen=True)
class PauliLabel:
    """Symplectic label (a, b) identifying E_{a,b} up to global phase."""

    a: tuple[FieldElement, ...]
    b: tuple[FieldElement, ...]

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ValueError("a and b must have the same length")
        ids = {e.ctx_id for e in self.a + self.b}
        if len(ids) > 1:
            raise FieldError("label components belong to different fields")

    @property
    def n(self) -> int:
        return len(self.a)

    def is_identity(self) -> bool:
        return all(e.is_zero() for e in self.a + self.b)

    def index(self) -> int:
        """Position in enumerate_paulis order."""
        if not self.a:
            return 0
        q = self.a[0].p ** len(self.a[0].coeffs)
        return _vector_code(self.b, q) * q**self.n + _vector_code(self.a, q)

    def to_text(self) -> str:
        def fmt(vec):
            return "(" + ",".join("(" + ",".join(map(str, e.coeffs)) + ")" for e in vec) + ")"

        return f"a={fmt(self.a)};b={fmt(self.b)}"

    @classmethod
    def from_text(cls, text: str, ctx: FieldCtx) -> PauliLabel:
        m = re.fullmatch(r"\s*a=\((.*)\);\s*b=\((.*)\)\s*", text)
        if not m:
            raise ValueError(f"malformed Pauli label: {text!r}")

        def parse(body):
            groups = re.findall(r"\(([^()]*)\)", body)
            return tuple(ctx.element([int(c) for c in g.split(",")]) for g in groups)

        return cls(parse(m.group(1)), parse(m.group(2)))

    def __str__(self) -> str:
        return self.to_text()


def _vector_code(vec: Sequence[FieldElement], q: int) -> int:
    code = 0
    for e in vec:
        code = code * q + e.to_int()
    return code


def make_label(ctx: FieldCtx, a: Sequence, b: Sequence) -> PauliLabel:
    """Label from per-qudit elements, coefficient lists or integer codes."""

    def conv(x):
        return x if isinstance(x, FieldElement) else ctx.element(x)

    return PauliLabel(tuple(conv(x) for x in a), tuple(conv(x) for x in b))


def identity_label(ctx: FieldCtx, n: int) -> PauliLabel:
    return PauliLabel((ctx.zero(),) * n, (ctx.zero(),) * n)


def label_from_index(ctx: FieldCtx, n: int, index: int) -> PauliLabel:
    """Inverse of PauliLabel.index: the a-part varies fastest."""
    qn = ctx.q**n
    if not 0 <= index < qn * qn:
        raise IndexError(f"label index {index} out of range")
    b_code, a_code = divmod(index, qn)

    def split(code):
        out = []
        for _ in range(n):
            code, r = divmod(code, ctx.q)
            out.append(ctx.element(r))
        return tuple(reversed(out))

    return PauliLabel(split(a_code), split(b_code))


def num_paulis(ctx: FieldCtx, n: int) -> int:
    return ctx.q ** (2 * n)


def enumerate_paulis(
    ctx: FieldCtx,
    n: int,
    start: int = 0,
    stop: int | None = None,
    *,
    max_labels: int = DEFAULT_MAX_LABELS,
) -> Iterator[PauliLabel]:
    """Yield labels ``start..stop-1`` of the q^(2n) labels, identity first.

    Order: index = code(b) * q^n + code(a), where a vector's code reads
    qudit 1 as the most significant base-q digit and a field element's code
    is sum_l c_l p^l.  For q = 2, n = 1 this gives I, X, Z, XZ.
    """
    total = num_paulis(ctx, n)
    if total > max_labels:
        raise SizeLimitError(f"q^(2n) = {total} exceeds enumeration limit {max_labels}")
    stop = total if stop is None else min(stop, total)
    for t in range(start, stop):
        yield label_from_index(ctx, n, t)


def pauli_chunks(total: int, chunk_size: int) -> list[range]:
    """Contiguous index ranges covering ``range(total)``."""
    return [range(s, min(s + chunk_size, total)) for s in range(0, total, chunk_size)]


# ---------------------------------------------------------------------------
# dense realization


def weyl_matrices(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Shift T = sum |x+1><x| and phase R = diag(w^x), w = exp(2 pi i / p)."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    t = np.roll(np.eye(p, dtype=complex), 1, axis=0)
    r = np.diag(np.exp(2j * np.pi * np.arange(p) / p))
    return t, r


def _digit_factors(label: PauliLabel, ctx: FieldCtx) -> tuple[list[int], list[int]]:
    gram = ctx.trace_gram()
    a_dig, b_dig = [], []
    for ea, eb in zip(label.a, label.b):
        if ea.ctx_id != ctx.ctx_id or eb.ctx_id != ctx.ctx_id:
            raise FieldError("label does not belong to this field")
        a_dig.extend(ea.coeffs)
        b_dig.extend(int(v) for v in gram @ np.array(eb.coeffs) % ctx.p)
    return a_dig, b_dig


def pauli_matrix(label: PauliLabel, ctx: FieldCtx, n: int | None = None) -> np.ndarray:
    """Dense q^n x q^n unitary for ``label`` (Kronecker product of digit factors)."""
    n = label.n if n is None else n
    if label.n != n:
        raise ValueError(f"label has {label.n} qudits, expected {n}")
    if ctx.q**n > max_dense_dim():
        raise SizeLimitError(f"q^n = {ctx.q**n} exceeds dense limit {max_dense_dim()}")
    t, r = weyl_matrices(ctx.p)
    t_inv = t.T
    out = np.ones((1, 1), dtype=complex)
    for a_i, b_i in zip(*_digit_factors(label, ctx)):
        factor = np.linalg.matrix_power(t_inv, a_i) @ np.linalg.matrix_power(r, b_i)
        out = np.kron(out, factor)
    return out


# ---------------------------------------------------------------------------
# sparse realization: index gather plus per-entry phase


class PauliKernel:
    """Precomputed digit tables for applying many labels on C^(q^n)."""

    def __init__(self, ctx: FieldCtx, n: int):
        self.ctx, self.n = ctx, n
        p, m = ctx.p, ctx.m
        self.dim = ctx.q**n
        self.ndig = n * m
        self.weights = p ** np.arange(self.ndig - 1, -1, -1, dtype=np.int64)
        idx = np.arange(self.dim, dtype=np.int64)
        self.digits = (idx[:, None] // self.weights[None, :]) % p
        self.gram = ctx.trace_gram()
        self.omega = np.exp(2j * np.pi * np.arange(p) / p)

    def label_digits(self, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(a-digits, b-dual-digits) arrays of shape (L, n*m) for label indices."""
        ctx, p, m, n = self.ctx, self.ctx.p, self.ctx.m, self.n
        indices = np.asarray(indices, dtype=np.int64)
        b_code, a_code = np.divmod(indices, self.dim)

        def coeffs(code):
            # (L, n, m) polynomial coefficients, qudit 0 most significant
            qpow = ctx.q ** np.arange(n - 1, -1, -1, dtype=np.int64)
            elem = (code[:, None] // qpow[None, :]) % ctx.q
            ppow = p ** np.arange(m, dtype=np.int64)
            return (elem[:, :, None] // ppow[None, None, :]) % p

        a = coeffs(a_code).reshape(len(indices), -1)
        b = (coeffs(b_code) @ self.gram.T % p).reshape(len(indices), -1)
        return a, b

    def gather(self, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Source indices and phases so that (E psi)[y] = phase[y] * psi[src[y]]."""
        a, b = self.label_digits(indices)
        shifted = (self.digits[None, :, :] + a[:, None, :]) % self.ctx.p
        src = shifted @ self.weights
        expo = np.einsum("lyd,ld->ly", shifted, b) % self.ctx.p
        return src, self.omega[expo]

    def apply(self, indices: np.ndarray, vectors: np.ndarray) -> np.ndarray:
        """E_l @ vectors for each label index l; returns shape (L, dim, ...)."""
        src, phase = self.gather(indices)
        vectors = np.asarray(vectors)
        gathered = vectors[src]
        return phase.reshape(phase.shape + (1,) * (vectors.ndim - 1)) * gathered


@functools.lru_cache(maxsize=64)
def pauli_kernel(ctx: FieldCtx, n: int) -> PauliKernel:
    return PauliKernel(ctx, n)


def apply_pauli(label: PauliLabel, state: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """E_{a,b} @ state in O(q^n) without forming the matrix.

    ``state`` may be a vector or a matrix whose columns are acted on.
    """
    state = np.asarray(state)
    kernel = pauli_kernel(ctx, label.n)
    if state.shape[0] != kernel.dim:
        raise ValueError(f"state has length {state.shape[0]}, expected {kernel.dim}")
    _digit_factors(label, ctx)  # field membership check
    return kernel.apply(np.array([label.index()]), state)[0]


def commutation_phase(e1: PauliLabel, e2: PauliLabel, ctx: FieldCtx | None = None) -> int:
    """k in F_p with E1 E2 = w^k E2 E1, k = sum_j <a_j, b'_j> - <a'_j, b_j>."""
    if e1.n != e2.n:
        raise ValueError("labels act on different numbers of qudits")
    if e1.n == 0:
        return 0
    p = e1.a[0].p
    total = 0
    for a, b, a2, b2 in zip(e1.a, e1.b, e2.a, e2.b):
        total += inner_product(a, b2, ctx) - inner_product(a2, b, ctx)
    return total % p
