"""Exact arithmetic in GF(p^m), field trace and trace-dual bases.

Elements are coefficient tuples in the polynomial basis {1, x, ..., x^(m-1)},
low degree first.  Fields here are tiny (q <= 2**16), so plain integer
polynomial arithmetic is used instead of log tables.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

DEFAULT_MAX_ORDER = 2**16


class FieldError(ValueError):
    """Invalid field parameters or mixing elements of different fields."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q`` into ``(p, m)`` with ``q == p**m``; raise if q is not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, m


# ---------------------------------------------------------------------------
# polynomials over F_p: lists of ints, low degree first, no trailing zeros


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_divmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = _trim([c % p for c in a])
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(len(r) - len(b) + 1, 0)
    while len(r) >= len(b):
        shift = len(r) - len(b)
        c = r[-1] * inv_lead % p
        q[shift] = c
        for i, bi in enumerate(b):
            r[shift + i] = (r[shift + i] - c * bi) % p
        _trim(r)
    return _trim(q), r


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    return _poly_divmod(a, b, p)[1]


def _poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def _poly_powmod(base: Sequence[int], e: int, mod: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(base, mod, p)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, p), mod, p)
        base = _poly_mod(_poly_mul(base, base, p), mod, p)
        e >>= 1
    return result


def _has_root(f: Sequence[int], p: int) -> bool:
    for x in range(p):
        acc = 0
        for c in reversed(f):
            acc = (acc * x + c) % p
        if acc == 0:
            return True
    return False


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Irreducibility of a monic polynomial ``f`` (low degree first) over F_p.

    Degree <= 3 only needs a root search.  Beyond that we use the gcd test:
    f is irreducible iff gcd(f, x^(p^i) - x) = 1 for every 1 <= i <= deg/2.
    """
    f = _trim([c % p for c in f])
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    if _has_root(f, p):
        return False
    if m <= 3:
        return True
    xp = [0, 1]
    for _ in range(1, m // 2 + 1):
        xp = _poly_powmod(xp, p, f, p)
        if len(_poly_gcd(f, _poly_sub(xp, [0, 1], p), p)) > 1:
            return False
    return True


def smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree m (c_0 compared first)."""
    for low in itertools.product(range(p), repeat=m):
        f = list(low) + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError(f"no irreducible polynomial of degree {m} over F_{p}")  # pragma: no cover


# ---------------------------------------------------------------------------
# linear algebra over F_p


def solve_mod_p(matrix: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square integer matrix over F_p (Gauss-Jordan)."""
    a = np.array(matrix, dtype=np.int64) % p
    n = a.shape[0]
    aug = np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1)
    for col in range(n):
        pivots = [r for r in range(col, n) if aug[r, col] % p]
        if not pivots:
            raise FieldError("matrix is singular over F_p")
        r = pivots[0]
        aug[[col, r]] = aug[[r, col]]
        aug[col] = aug[col] * pow(int(aug[col, col]), -1, p) % p
        for rr in range(n):
            if rr != col and aug[rr, col]:
                aug[rr] = (aug[rr] - aug[rr, col] * aug[col]) % p
    return aug[:, n:]


# ---------------------------------------------------------------------------
# elements and contexts


@dataclass(frozen=True)
class FieldElement:
    """Element of GF(p^m) as polynomial-basis coordinates.

    ``ctx_id`` is ``(p, modulus)``; arithmetic refuses to mix elements whose
    ids differ.
    """

    coeffs: tuple[int, ...]
    ctx_id: tuple[int, tuple[int, ...]]

    @property
    def p(self) -> int:
        return self.ctx_id[0]

    @property
    def modulus(self) -> tuple[int, ...]:
        return self.ctx_id[1]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_int(self) -> int:
        """Integer code sum_l c_l p^l (used for enumeration order)."""
        return sum(c * self.p**i for i, c in enumerate(self.coeffs))

    def __add__(self, other: FieldElement) -> FieldElement:
        return field_add(self, other)

    def __sub__(self, other: FieldElement) -> FieldElement:
        return field_add(self, field_neg(other))

    def __neg__(self) -> FieldElement:
        return field_neg(self)

    def __mul__(self, other: FieldElement) -> FieldElement:
        return field_mul(self, other)

    def __pow__(self, e: int) -> FieldElement:
        return field_pow(self, e)

    def __repr__(self) -> str:
        return f"GF({self.p}^{len(self.coeffs)})({list(self.coeffs)})"


@dataclass(frozen=True)
class FieldCtx:
    """GF(p^m) with its modulus, polynomial basis and trace-dual basis."""

    p: int
    m: int
    modulus: tuple[int, ...]
    basis: tuple[FieldElement, ...] = field(repr=False)
    dual_basis: tuple[FieldElement, ...] = field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.m

    @property
    def ctx_id(self) -> tuple[int, tuple[int, ...]]:
        return (self.p, self.modulus)

    def element(self, coeffs: Sequence[int] | int) -> FieldElement:
        """Build an element from a coefficient sequence or an integer code."""
        if isinstance(coeffs, (int, np.integer)):
            code = int(coeffs)
            if not 0 <= code < self.q:
                raise FieldError(f"integer code {code} out of range for GF({self.q})")
            coeffs = [(code // self.p**i) % self.p for i in range(self.m)]
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) != self.m:
            raise FieldError(f"expected {self.m} coefficients, got {len(coeffs)}")
        if any(not 0 <= c < self.p for c in coeffs):
            raise FieldError(f"coefficients must lie in [0, {self.p})")
        return FieldElement(coeffs, self.ctx_id)

    def zero(self) -> FieldElement:
        return self.element([0] * self.m)

    def one(self) -> FieldElement:
        return self.element([1] + [0] * (self.m - 1))

    def elements(self) -> list[FieldElement]:
        """All q elements in integer-code order."""
        return [self.element(i) for i in range(self.q)]

    def trace_gram(self) -> np.ndarray:
        """G[i, l] = tr(x^i x^l); maps polynomial coordinates to dual-basis coordinates."""
        return _gram(self.basis)

    def to_record(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}


def _check(a: FieldElement, b: FieldElement) -> None:
    if a.ctx_id != b.ctx_id:
        raise FieldError("elements belong to different fields")


def _reduce(poly: list[int], ctx_id) -> FieldElement:
    p, modulus = ctx_id
    m = len(modulus) - 1
    r = _poly_mod(poly, modulus, p)
    return FieldElement(tuple(r + [0] * (m - len(r))), ctx_id)


def field_add(a: FieldElement, b: FieldElement) -> FieldElement:
    _check(a, b)
    return FieldElement(tuple((x + y) % a.p for x, y in zip(a.coeffs, b.coeffs)), a.ctx_id)


def field_neg(a: FieldElement) -> FieldElement:
    return FieldElement(tuple(-x % a.p for x in a.coeffs), a.ctx_id)


def field_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    _check(a, b)
    return _reduce(_poly_mul(a.coeffs, b.coeffs, a.p), a.ctx_id)


def field_pow(a: FieldElement, e: int) -> FieldElement:
    if e < 0:
        return field_pow(field_inv(a), -e)
    return _reduce(_poly_powmod(a.coeffs, e, a.modulus, a.p), a.ctx_id)


def field_inv(a: FieldElement) -> FieldElement:
    if a.is_zero():
        raise ZeroDivisionError("inverse of zero in a finite field")
    q = a.p ** len(a.coeffs)
    return field_pow(a, q - 2)


def field_trace(a: FieldElement) -> int:
    """Absolute trace sum_{i=0}^{m-1} a^(p^i), returned as a residue in F_p."""
    m = len(a.coeffs)
    acc, conj = [], a
    for _ in range(m):
        acc = _poly_sub(acc, [-c % a.p for c in conj.coeffs], a.p)
        conj = field_pow(conj, a.p)
    if len(acc) > 1:
        raise AssertionError("trace did not land in the prime field")  # pragma: no cover
    return acc[0] if acc else 0


def _gram(basis: Sequence[FieldElement]) -> np.ndarray:
    m = len(basis)
    return np.array(
        [[field_trace(field_mul(basis[i], basis[j])) for j in range(m)] for i in range(m)],
        dtype=np.int64,
    )


def dual_basis(basis: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
    """Trace-dual of ``basis``: the unique beta with tr(alpha_i beta_j) = delta_ij.

    Solves through the inverse of the trace Gram matrix G_ij = tr(alpha_i alpha_j).
    """
    basis = list(basis)
    if not basis:
        raise FieldError("empty basis")
    p = basis[0].p
    gram = _gram(basis)
    try:
        ginv = solve_mod_p(gram, p)
    except FieldError as exc:
        raise FieldError("trace Gram matrix is singular; input is not a basis") from exc
    out = []
    for j in range(len(basis)):
        acc = FieldElement((0,) * len(basis[0].coeffs), basis[0].ctx_id)
        for l, alpha in enumerate(basis):
            c = int(ginv[j, l])
            if c:
                acc = field_add(acc, FieldElement(tuple(c * x % p for x in alpha.coeffs), alpha.ctx_id))
        out.append(acc)
    return tuple(out)


def make_field(p: int, m: int = 1, *, max_order: int = DEFAULT_MAX_ORDER) -> FieldCtx:
    """GF(p^m) with the smallest monic irreducible modulus and the polynomial basis."""
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise FieldError(f"characteristic {p} is not prime")
    if m < 1:
        raise FieldError(f"extension degree must be >= 1, got {m}")
    if p**m > max_order:
        raise FieldError(f"field order {p}^{m} exceeds limit {max_order}")
    p, m = int(p), int(m)
    modulus = smallest_irreducible(p, m)
    ctx_id = (p, modulus)
    basis = tuple(
        FieldElement(tuple(1 if j == i else 0 for j in range(m)), ctx_id) for i in range(m)
    )
    return FieldCtx(p, m, modulus, basis, dual_basis(basis))


def field_from_record(record: dict) -> FieldCtx:
    """Rebuild a context from ``{p, m, modulus}``; the modulus must match make_field's choice."""
    ctx = make_field(int(record["p"]), int(record["m"]))
    if "modulus" in record and tuple(int(c) for c in record["modulus"]) != ctx.modulus:
        raise FieldError(
            f"modulus {record['modulus']} differs from the canonical {list(ctx.modulus)}"
        )
    return ctx


def dual_coordinates(b: FieldElement, basis: Sequence[FieldElement]) -> tuple[int, ...]:
    """Coordinates of b in the dual of ``basis``: b_i = tr(alpha_i b)."""
    return tuple(field_trace(field_mul(alpha, b)) for alpha in basis)


def inner_product(a: FieldElement, b: FieldElement, ctx: FieldCtx | None = None) -> int:
    """sum_i a_i b_i with a expanded in the basis and b in its dual basis.

    Without ``ctx`` the polynomial basis is assumed, for which the
    a-coordinates are the coefficients themselves.
    """
    _check(a, b)
    if ctx is None:
        a_coords = a.coeffs
        basis = [FieldElement(tuple(1 if j == i else 0 for j in range(len(a.coeffs))), a.ctx_id)
                 for i in range(len(a.coeffs))]
    else:
        a_coords = basis_coordinates(a, ctx)
        basis = ctx.basis
    b_coords = dual_coordinates(b, basis)
    return sum(x * y for x, y in zip(a_coords, b_coords)) % a.p


def basis_coordinates(a: FieldElement, ctx: FieldCtx) -> tuple[int, ...]:
    """Coordinates of a in ctx.basis, via the dual basis: a_i = tr(a beta_i)."""
    return tuple(field_trace(field_mul(a, beta)) for beta in ctx.dual_basis)
