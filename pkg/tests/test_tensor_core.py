"""Unit tests for the chain containers and their algebra."""

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mpoq import tensor_core as tc
from mpoq.gate_library import CONTROL_1, IDENTITY, PAULI_X, cnot_mpo

from conftest import kron_chain


def random_mpo(n, rank, seed):
    rng = np.random.default_rng(seed)
    ranks = [1] + [rank] * (n - 1) + [1]
    cores = [
        rng.standard_normal((ranks[i], 2, 2, ranks[i + 1]))
        + 1j * rng.standard_normal((ranks[i], 2, 2, ranks[i + 1]))
        for i in range(n)
    ]
    return tc.MPO(cores)


# ---------------------------------------------------------------------------
# construction and invariants


def test_basis_state_dense():
    assert_allclose(tc.basis_state_mps([0, 0]).to_dense(), [1, 0, 0, 0])
    assert_allclose(tc.basis_state_mps([1, 0]).to_dense(), [0, 0, 1, 0])
    # first bit is the most significant: 1010 -> index 10
    expected = np.zeros(16)
    expected[10] = 1.0
    assert_allclose(tc.basis_state_mps([1, 0, 1, 0]).to_dense(), expected)


def test_basis_state_rejects_empty_and_bad_bits():
    with pytest.raises(ValueError):
        tc.basis_state_mps([])
    with pytest.raises(ValueError):
        tc.basis_state_mps([0, 2])


def test_chain_consistency_enforced():
    good = np.zeros((1, 2, 3)), np.zeros((3, 2, 1))
    tc.MPS(good)
    with pytest.raises(ValueError):
        tc.MPS([np.zeros((1, 2, 3)), np.zeros((2, 2, 1))])
    with pytest.raises(ValueError):
        tc.MPS([np.zeros((2, 2, 1))])  # boundary rank must be 1


def test_cores_are_read_only():
    state = tc.basis_state_mps([0, 1])
    with pytest.raises(ValueError):
        state.cores[0][0, 0, 0] = 5.0


def test_ghz_dense():
    dense = tc.named_state_mps("ghz", 3).to_dense()
    expected = np.zeros(8)
    expected[0] = expected[7] = 1 / np.sqrt(2)
    assert_allclose(dense, expected, atol=1e-15)


def test_w_state_dense_and_ranks():
    state = tc.named_state_mps("w", 4)
    assert state.ranks == (1, 2, 2, 2, 1)
    dense = state.to_dense()
    expected = np.zeros(16)
    expected[[8, 4, 2, 1]] = 0.5
    assert_allclose(dense, expected, atol=1e-15)
    assert state.element((1, 0, 0, 0)) == pytest.approx(0.5)


def test_w_state_n2_is_bell_psi_plus():
    assert_allclose(
        tc.named_state_mps("w", 2).to_dense(),
        tc.named_state_mps("bell_psi_plus", 2).to_dense(),
        atol=1e-15,
    )


def test_bell_states():
    s2 = 1 / np.sqrt(2)
    assert_allclose(tc.named_state_mps("bell_phi_minus", 2).to_dense(), [s2, 0, 0, -s2])
    assert_allclose(tc.named_state_mps("bell_psi_minus", 2).to_dense(), [0, s2, -s2, 0])
    with pytest.raises(ValueError):
        tc.named_state_mps("nope", 3)
    with pytest.raises(ValueError):
        tc.named_state_mps("bell_phi_plus", 3)


def test_element_matches_dense_on_random_states():
    for seed in range(5):
        state = tc.random_mps(6, 3, seed=seed)
        dense = state.to_dense()
        rng = np.random.default_rng(seed)
        for _ in range(20):
            bits = tuple(rng.integers(0, 2, 6))
            index = int("".join(map(str, bits)), 2)
            assert abs(state.element(bits) - dense[index]) <= 1e-12


def test_element_rejects_out_of_range():
    state = tc.basis_state_mps([1, 1])
    assert state.element((1, 1)) == pytest.approx(1.0)
    assert state.element((0, 1)) == pytest.approx(0.0)
    with pytest.raises(IndexError):
        state.element((0, 2))


def test_product_state_dense_is_kron():
    rng = np.random.default_rng(0)
    vecs = [rng.standard_normal(2) + 1j * rng.standard_normal(2) for _ in range(4)]
    cores = [v[None, :, None] for v in vecs]
    assert_allclose(tc.MPS(cores).to_dense(), kron_chain(vecs), atol=1e-14)


def test_dense_cap_guard(monkeypatch):
    monkeypatch.setenv("MPOQ_DENSE_CAP", "8")
    with pytest.raises(tc.DenseCapExceeded):
        tc.basis_state_mps([0, 0, 0, 0]).to_dense()
    monkeypatch.setenv("MPOQ_DENSE_CAP", "16")
    tc.basis_state_mps([0, 0, 0, 0]).to_dense()


# ---------------------------------------------------------------------------
# operator algebra


def test_cnot_mpo_dense_matrix():
    expected = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )
    assert_allclose(cnot_mpo(1, 2, 2).to_dense(), expected, atol=1e-15)


def test_identity_apply_is_noop():
    state = tc.random_mps(5, 3, seed=1)
    out = tc.MPO.identity(5).apply(state)
    assert_allclose(out.to_dense(), state.to_dense(), atol=1e-14)


def test_apply_matches_dense_matvec():
    op = random_mpo(6, 2, seed=2)
    state = tc.random_mps(6, 2, seed=3)
    assert_allclose(
        op.apply(state).to_dense(), op.to_dense() @ state.to_dense(), atol=1e-10
    )


def test_apply_rank_product_law():
    op = random_mpo(5, 3, seed=4)
    state = tc.random_mps(5, 2, seed=5)
    out = op.apply(state)
    assert out.ranks == tuple(a * b for a, b in zip(op.ranks, state.ranks))


def test_matmul_matches_dense_product():
    a = random_mpo(4, 2, seed=6)
    b = random_mpo(4, 3, seed=7)
    assert_allclose((a @ b).to_dense(), a.to_dense() @ b.to_dense(), atol=1e-10)
    assert_allclose((a @ tc.MPO.identity(4)).to_dense(), a.to_dense(), atol=1e-12)


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        random_mpo(3, 2, seed=0).apply(tc.random_mps(4, 2, seed=0))
    with pytest.raises(ValueError):
        random_mpo(3, 2, seed=0) @ random_mpo(4, 2, seed=0)


def test_adjoint_and_conj():
    op = random_mpo(4, 2, seed=8)
    dense = op.to_dense()
    assert_allclose(op.adjoint().to_dense(), dense.conj().T, atol=1e-12)
    assert_allclose(op.conj().to_dense(), dense.conj(), atol=1e-12)


def test_mpo_add():
    a = random_mpo(4, 2, seed=9)
    b = random_mpo(4, 3, seed=10)
    total = tc.mpo_add(a, b)
    assert total.ranks[1:-1] == tuple(x + y for x, y in zip(a.ranks[1:-1], b.ranks[1:-1]))
    assert_allclose(total.to_dense(), a.to_dense() + b.to_dense(), atol=1e-12)


# ---------------------------------------------------------------------------
# norms


def test_norms():
    ghz = tc.named_state_mps("ghz", 3)
    assert ghz.norm() == pytest.approx(1.0, abs=1e-12)
    assert ghz.scaled(2.0).norm() == pytest.approx(2.0, abs=1e-12)
    state = tc.random_mps(6, 4, seed=11).scaled(3.7)
    assert state.norm() == pytest.approx(np.linalg.norm(state.to_dense()), abs=1e-10)
    assert state.normalized().norm() == pytest.approx(1.0, abs=1e-12)


def test_normalize_zero_raises():
    zero = tc.MPS([np.zeros((1, 2, 1))])
    with pytest.raises(ZeroDivisionError):
        zero.normalized()


# ---------------------------------------------------------------------------
# orthonormalization


def test_right_orthonormalize_preserves_tensor_and_certifies():
    state = tc.random_mps(7, 5, seed=12)
    out = tc.orthonormalize_right(state, tc.LOSSLESS)
    assert out.right_orthonormal
    assert tc.is_right_orthonormal(out, tol=1e-10)
    assert_allclose(out.to_dense(), state.to_dense(), atol=1e-10 * state.norm())
    assert all(a <= b for a, b in zip(out.ranks, state.ranks))


def test_left_orthonormalize_preserves_tensor():
    state = tc.random_mps(6, 4, seed=13)
    out = tc.orthonormalize_left(state, tc.LOSSLESS)
    assert_allclose(out.to_dense(), state.to_dense(), atol=1e-10)
    for core in out.cores[:-1]:
        mat = core.reshape(-1, core.shape[2], order="F")
        assert_allclose(mat.conj().T @ mat, np.eye(core.shape[2]), atol=1e-10)


def test_orthonormalize_idempotent_on_orthonormal_input():
    state = tc.orthonormalize_right(tc.random_mps(5, 3, seed=14), tc.LOSSLESS)
    again = tc.orthonormalize_right(state, tc.DEFAULT_POLICY)
    assert again.ranks == state.ranks
    assert_allclose(again.to_dense(), state.to_dense(), atol=1e-12)


def _with_duplicated_bonds(state):
    """Double every internal bond without changing the represented tensor."""
    cores = [np.asarray(c) for c in state.cores]
    n = len(cores)
    out = []
    for i, core in enumerate(cores):
        new = core
        if i > 0:
            new = np.concatenate([0.25 * new, 0.75 * new], axis=0)
        if i < n - 1:
            new = np.concatenate([new, new], axis=2)
        out.append(new)
    return tc.MPS(out)


def test_orthonormalize_drops_duplicated_rows():
    state = tc.random_mps(5, 4, seed=15)
    inflated = _with_duplicated_bonds(state)
    assert inflated.max_rank == 8
    assert_allclose(inflated.to_dense(), state.to_dense(), atol=1e-12)
    rounded = tc.orthonormalize_right(inflated, tc.TruncationPolicy(rel_threshold=1e-12))
    assert rounded.ranks == state.ranks
    assert rounded.max_rank == 4
    assert_allclose(rounded.to_dense(), state.to_dense(), atol=1e-10)


def test_max_rank_cap():
    state = tc.random_mps(6, 8, seed=16)
    capped = tc.orthonormalize_right(state, tc.TruncationPolicy(0.0, max_rank=3))
    assert capped.max_rank <= 3


def test_compress_mpo_finds_minimal_ranks():
    # product of two overlapping controlled gates has true rank 4 in the overlap
    a = cnot_mpo(1, 4, 5)
    b = cnot_mpo(2, 5, 5)
    product = a @ b
    rounded = tc.compress_mpo(product)
    assert_allclose(rounded.to_dense(), product.to_dense(), atol=1e-12)
    assert rounded.max_rank <= 4
    identity_squared = cnot_mpo(1, 3, 3) @ cnot_mpo(1, 3, 3)
    assert tc.compress_mpo(identity_squared).max_rank == 1


# ---------------------------------------------------------------------------
# core transformations


def test_transform_bond_preserves_tensor():
    rng = np.random.default_rng(17)
    state = tc.random_mps(5, 3, seed=18)
    for i in range(4):
        r = state.ranks[i + 1]
        while True:
            q = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
            if np.linalg.cond(q) <= 1e3:
                break
        moved = tc.transform_bond(state, i, q)
        assert_allclose(moved.to_dense(), state.to_dense(), atol=1e-10)


def test_transform_identity_is_noop():
    state = tc.random_mps(4, 2, seed=19)
    out = tc.transform_core_right(state, 1, np.eye(state.ranks[2]))
    assert_allclose(out.to_dense(), state.to_dense(), atol=1e-14)


def test_transform_bond_rejects_singular():
    state = tc.random_mps(4, 2, seed=20)
    with pytest.raises(np.linalg.LinAlgError):
        tc.transform_bond(state, 1, np.zeros((2, 2)))


def test_factored_cnot_core_manipulation():
    # alternative two-core factorization of the controlled flip:
    # [I  C] x [I; X-I]  ==  [I-C  C] x [I; X]
    cnot = cnot_mpo(1, 2, 2)
    q = np.array([[1.0, 0.0], [-1.0, 1.0]])
    alt = tc.transform_bond(cnot, 0, q)
    assert_allclose(alt.to_dense(), cnot.to_dense(), atol=1e-14)
    assert_allclose(alt.cores[0][0, :, :, 0], IDENTITY - CONTROL_1, atol=1e-14)
    assert_allclose(alt.cores[0][0, :, :, 1], CONTROL_1, atol=1e-14)
    assert_allclose(alt.cores[1][0, :, :, 0], IDENTITY, atol=1e-14)
    assert_allclose(alt.cores[1][1, :, :, 0], PAULI_X, atol=1e-14)


# ---------------------------------------------------------------------------
# diagonal lifting and debug dumps


def test_diag_mpo_of_basis_state_is_projector():
    state = tc.basis_state_mps([1, 0])
    dense = tc.diag_mpo(state).to_dense()
    expected = np.zeros((4, 4))
    expected[2, 2] = 1.0
    assert_allclose(dense, expected, atol=1e-15)


def test_diag_identity_hadamard_square():
    for seed, n in ((21, 3), (22, 5)):
        state = tc.random_mps(n, 3, seed=seed)
        squared = tc.diag_mpo(state).apply(state).to_dense()
        assert_allclose(squared, state.to_dense() ** 2, atol=1e-12)


def test_diag_mpo_dense_is_diagonal():
    state = tc.random_mps(5, 2, seed=23)
    dense = tc.diag_mpo(state).to_dense()
    assert_allclose(np.diag(dense), state.to_dense(), atol=1e-12)
    assert_allclose(dense - np.diag(np.diag(dense)), 0.0, atol=1e-14)


def test_debug_json_round_trip():
    state = tc.named_state_mps("ghz", 3)
    payload = json.loads(state.to_debug_json())
    assert payload["ranks"] == [1, 2, 2, 1]
    assert payload["dims"] == [2, 2, 2]
    core = np.array(payload["cores"][0])
    assert core.shape == (1, 2, 2, 2)  # trailing axis holds [re, im]
    op = tc.MPO.identity(2)
    assert json.loads(op.to_debug_json())["ranks"] == [1, 1, 1]
