"""Code subspaces of C^(q^n) stored by an orthonormal basis, plus file I/O."""
from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from pmdkit.finite_field import FieldCtx, field_from_record, make_field
from pmdkit.pauli import SizeLimitError, max_dense_dim

FORMAT_VERSION = 1
FILE_TOLERANCE = 1e-8
RANK_TOLERANCE = 1e-8


class CodeSpaceError(ValueError):
    """Malformed, inconsistent or non-orthonormal code-space data."""


class RankDeficiencyError(CodeSpaceError):
    pass


@dataclass(frozen=True, eq=False)
class CodeSpace:
    """Span of the orthonormal columns of ``basis`` (shape q^n x q^k)."""

    ctx: FieldCtx
    n: int
    k: int
    basis: np.ndarray

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise CodeSpaceError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        basis = np.array(self.basis, dtype=complex)
        expected = (self.ctx.q**self.n, self.ctx.q**self.k)
        if basis.shape != expected:
            raise CodeSpaceError(f"basis has shape {basis.shape}, expected {expected}")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def dim(self) -> int:
        return self.ctx.q**self.n

    @property
    def redundancy(self) -> int:
        """lambda = n - k."""
        return self.n - self.k

    def orthonormality_error(self) -> float:
        c = self.basis
        return float(np.abs(c.conj().T @ c - np.eye(c.shape[1])).max())

    def contains(self, psi: np.ndarray, tol: float = 1e-9) -> bool:
        psi = np.asarray(psi, dtype=complex)
        return bool(np.linalg.norm(psi - self.basis @ (self.basis.conj().T @ psi)) <= tol)


def modified_gram_schmidt(vectors: np.ndarray, tol: float = RANK_TOLERANCE) -> np.ndarray:
    """Orthonormalize columns in order; raise RankDeficiencyError on dependence."""
    v = np.array(vectors, dtype=complex)
    for j in range(v.shape[1]):
        for i in range(j):
            v[:, j] -= (v[:, i].conj() @ v[:, j]) * v[:, i]
        norm = np.linalg.norm(v[:, j])
        if norm <= tol:
            raise RankDeficiencyError(f"column {j} is linearly dependent on earlier columns")
        v[:, j] /= norm
    return v


def _check_rank(basis: np.ndarray) -> None:
    if basis.shape[1] == 0:
        return
    s = np.linalg.svd(basis, compute_uv=False)
    if s[-1] <= RANK_TOLERANCE * max(s[0], 1.0):
        raise RankDeficiencyError("basis vectors are not linearly independent")


def projector(cs: CodeSpace) -> np.ndarray:
    """Dense projector C C^dagger."""
    if cs.dim > max_dense_dim():
        raise SizeLimitError(f"q^n = {cs.dim} exceeds dense limit {max_dense_dim()}")
    return cs.basis @ cs.basis.conj().T


def orthonormalize(matrix: np.ndarray) -> np.ndarray:
    """QR with the phase of R's diagonal fixed, so Gaussian input gives Haar frames."""
    q, r = np.linalg.qr(matrix)
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def random_codespace(ctx: FieldCtx, n: int, k: int, seed) -> CodeSpace:
    """Haar-random q^k-dimensional subspace from a seeded complex Gaussian matrix."""
    rng = np.random.default_rng(seed)
    shape = (ctx.q**n, ctx.q**k)
    g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return CodeSpace(ctx, n, k, orthonormalize(g))


def standard_codespace(ctx: FieldCtx, n: int, k: int) -> CodeSpace:
    """Span of the first q^k computational basis vectors."""
    return CodeSpace(ctx, n, k, np.eye(ctx.q**n, ctx.q**k, dtype=complex))


def bloch_state(theta: float, phi: float) -> CodeSpace:
    """Single-qubit code cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    psi = np.array([[np.cos(theta / 2)], [np.exp(1j * phi) * np.sin(theta / 2)]])
    return CodeSpace(make_field(2, 1), 1, 0, psi)


# ---------------------------------------------------------------------------
# file format


def codespace_to_record(cs: CodeSpace, reorthonormalize: bool = False) -> dict:
    record = {"format_version": FORMAT_VERSION}
    record.update(cs.ctx.to_record())
    record.update(
        n=cs.n,
        k=cs.k,
        reorthonormalize=reorthonormalize,
        basis=[[[float(z.real), float(z.imag)] for z in col] for col in cs.basis.T],
    )
    return record


def save_codespace(cs: CodeSpace, path: str | os.PathLike, reorthonormalize: bool = False) -> None:
    Path(path).write_text(json.dumps(codespace_to_record(cs, reorthonormalize)) + "\n")


def codespace_from_record(record: dict) -> CodeSpace:
    try:
        if record.get("format_version") != FORMAT_VERSION:
            raise CodeSpaceError(f"unsupported format_version {record.get('format_version')!r}")
        ctx = field_from_record(record)
        n, k = int(record["n"]), int(record["k"])
        reortho = bool(record.get("reorthonormalize", False))
        cols = record["basis"]
        basis = np.array(
            [[complex(float(re), float(im)) for re, im in col] for col in cols], dtype=complex
        ).T
    except CodeSpaceError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CodeSpaceError(f"malformed code-space record: {exc}") from exc
    expected = (ctx.q**n, ctx.q**k)
    if len(cols) != expected[1] or basis.shape != expected:
        raise CodeSpaceError(f"basis has shape {basis.shape}, expected {expected}")
    if not np.all(np.isfinite(basis)):
        raise CodeSpaceError("basis contains non-finite entries")
    _check_rank(basis)
    err = np.abs(basis.conj().T @ basis - np.eye(basis.shape[1])).max()
    if err > FILE_TOLERANCE:
        if not reortho:
            raise CodeSpaceError(
                f"basis is not orthonormal (error {err:.3g}) and reorthonormalize is false"
            )
        basis = modified_gram_schmidt(basis)
    return CodeSpace(ctx, n, k, basis)


def load_codespace(source: str | os.PathLike | io.TextIOBase) -> CodeSpace:
    """Parse and validate a code-space JSON file (path or open text stream)."""
    try:
        if hasattr(source, "read"):
            text = source.read()
        else:
            text = Path(source).read_text()
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodeSpaceError(f"cannot parse code-space file: {exc}") from exc
    if not isinstance(record, dict):
        raise CodeSpaceError("code-space file must hold a single record")
    return codespace_from_record(record)


def codespace_to_csv(cs: CodeSpace) -> str:
    """Report export: one row per (column, entry); not accepted as input."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["column", "index", "re", "im"])
    for j, col in enumerate(cs.basis.T):
        for i, z in enumerate(col):
            w.writerow([j, i, repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()
