import io
import json

import numpy as np
import pytest

from pmdkit.codespace import (
    CodeSpace,
    CodeSpaceError,
    RankDeficiencyError,
    bloch_state,
    codespace_to_csv,
    codespace_to_record,
    load_codespace,
    modified_gram_schmidt,
    projector,
    random_codespace,
    save_codespace,
    standard_codespace,
)
from pmdkit.finite_field import make_field


def _record(p, m, n, k, cols, reortho=False, modulus=None):
    rec = {"format_version": 1, "p": p, "m": m, "n": n, "k": k,
           "reorthonormalize": reortho,
           "basis": [[[float(np.real(z)), float(np.imag(z))] for z in col] for col in cols]}
    if modulus is not None:
        rec["modulus"] = modulus
    return io.StringIO(json.dumps(rec))


def test_load_single_vector():
    cs = load_codespace(_record(2, 1, 2, 0, [[1, 0, 0, 0]], modulus=[0, 1]))
    assert cs.k == 0 and cs.redundancy == 2


def test_load_standard_columns():
    cols = np.eye(9)[:3]
    cs = load_codespace(_record(3, 1, 2, 1, cols))
    np.testing.assert_array_equal(cs.basis, np.eye(9, 3))


def test_load_rank_deficient():
    with pytest.raises(RankDeficiencyError):
        load_codespace(_record(2, 1, 1, 1, [[1, 0], [1, 0]]))
    with pytest.raises(RankDeficiencyError):
        load_codespace(_record(2, 1, 1, 1, [[1, 0], [1, 0]], reortho=True))


def test_load_non_orthonormal():
    cols = [[1, 0], [1, 1]]
    with pytest.raises(CodeSpaceError, match="orthonormal"):
        load_codespace(_record(2, 1, 1, 1, cols))
    cs = load_codespace(_record(2, 1, 1, 1, cols, reortho=True))
    assert cs.orthonormality_error() < 1e-12


def test_load_tolerates_rounding():
    s = round(1 / np.sqrt(2), 9)
    cs = load_codespace(_record(2, 1, 1, 0, [[s, s]]))
    assert cs.k == 0


@pytest.mark.parametrize("text", [
    "not json",
    "[1, 2]",
    json.dumps({"format_version": 2, "p": 2, "m": 1, "n": 1, "k": 0, "basis": [[[1, 0], [0, 0]]]}),
    json.dumps({"format_version": 1, "p": 2, "m": 1, "n": 1, "k": 0, "basis": [[[1, 0]]]}),
    json.dumps({"format_version": 1, "p": 2, "m": 1, "n": 1, "k": 0}),
    json.dumps({"format_version": 1, "p": 4, "m": 1, "n": 1, "k": 0, "basis": [[[1, 0], [0, 0]]]}),
    json.dumps({"format_version": 1, "p": 2, "m": 2, "modulus": [1, 0, 1], "n": 1, "k": 0,
                "basis": [[[1, 0], [0, 0], [0, 0], [0, 0]]]}),
])
def test_load_malformed(text):
    with pytest.raises(ValueError):
        load_codespace(io.StringIO(text))


def test_scientific_notation_accepted():
    text = ('{"format_version": 1, "p": 2, "m": 1, "n": 1, "k": 0, "reorthonormalize": false,'
            ' "basis": [[[1.0E0, 0e-3], [0.0, 0.0]]]}')
    assert load_codespace(io.StringIO(text)).basis[0, 0] == 1


def test_projector_examples():
    ctx = make_field(2)
    np.testing.assert_array_equal(projector(standard_codespace(ctx, 2, 2)), np.eye(4))
    np.testing.assert_array_equal(projector(bloch_state(0, 0)), np.diag([1, 0]))
    cs = random_codespace(make_field(3), 2, 1, 7)
    pi = projector(cs)
    assert abs(np.trace(pi) - 3) < 1e-9
    np.testing.assert_allclose(pi @ pi, pi, atol=1e-10)
    np.testing.assert_allclose(pi, pi.conj().T, atol=1e-12)


def test_random_full_space():
    cs = random_codespace(make_field(2), 1, 1, 123)
    np.testing.assert_allclose(projector(cs), np.eye(2), atol=1e-12)


def test_random_deterministic():
    ctx = make_field(2)
    a = random_codespace(ctx, 2, 1, 5)
    b = random_codespace(ctx, 2, 1, 5)
    assert np.array_equal(a.basis, b.basis)
    assert not np.array_equal(a.basis, random_codespace(ctx, 2, 1, 6).basis)


def test_random_orthonormal_over_seeds():
    ctx = make_field(2)
    for seed in range(100):
        assert random_codespace(ctx, 2, 1, seed).orthonormality_error() <= 1e-10


def test_random_is_unitarily_invariant_in_mean():
    # Haar subspaces average to the maximally mixed projector q^(k-n) I
    ctx = make_field(2)
    acc = sum(projector(random_codespace(ctx, 2, 1, s)) for s in range(2000)) / 2000
    np.testing.assert_allclose(acc, np.eye(4) / 2, atol=0.03)


def test_bloch_states():
    np.testing.assert_allclose(bloch_state(0, 0).basis[:, 0], [1, 0])
    v = bloch_state(np.pi, 0).basis[:, 0]
    assert abs(abs(v[1]) - 1) < 1e-15 and abs(v[0]) < 1e-15
    theta = np.arccos(1 / np.sqrt(3))
    v = bloch_state(theta, np.pi / 4).basis[:, 0]
    rho = np.outer(v, v.conj())
    bloch = [2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real]
    np.testing.assert_allclose(bloch, np.ones(3) / np.sqrt(3), atol=1e-12)


def test_invariants_on_construction():
    ctx = make_field(2)
    with pytest.raises(CodeSpaceError):
        CodeSpace(ctx, 1, 2, np.eye(2))
    with pytest.raises(CodeSpaceError):
        CodeSpace(ctx, 2, 1, np.eye(2))
    cs = standard_codespace(ctx, 2, 1)
    with pytest.raises(ValueError):
        cs.basis[0, 0] = 2


def test_roundtrip_bit_exact(tmp_path):
    for (p, m, n, k, seed) in [(2, 1, 2, 1, 0), (3, 1, 2, 0, 1), (2, 2, 1, 1, 2), (5, 1, 1, 0, 3)]:
        cs = random_codespace(make_field(p, m), n, k, seed)
        path = tmp_path / f"c{seed}.json"
        save_codespace(cs, path)
        back = load_codespace(path)
        assert np.array_equal(back.basis, cs.basis)
        assert back.ctx == cs.ctx and (back.n, back.k) == (cs.n, cs.k)


def test_record_fields():
    rec = codespace_to_record(standard_codespace(make_field(2, 2), 1, 0))
    assert rec["modulus"] == [1, 1, 1]
    assert set(rec) == {"format_version", "p", "m", "modulus", "n", "k", "reorthonormalize", "basis"}


def test_csv_export():
    text = codespace_to_csv(bloch_state(0, 0))
    assert text.splitlines()[0] == "column,index,re,im"
    assert len(text.splitlines()) == 3


def test_mgs():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
    q = modified_gram_schmidt(a)
    np.testing.assert_allclose(q.conj().T @ q, np.eye(3), atol=1e-12)
    # same span
    np.testing.assert_allclose(q @ (q.conj().T @ a), a, atol=1e-12)
