import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from remote_prep.qstate import (
    QubitCapacityError,
    StateVector,
    apply_unitary,
    check_unitary,
    fidelity_up_to_phase,
    inverse_permutation,
    permute_qubits,
    project_subsystem,
    tensor,
)

H = 1 / math.sqrt(2)
EPR_PAIR = StateVector([H, 0, 0, H])

complex_vecs = hnp.arrays(
    np.complex128,
    st.sampled_from([2, 4, 8, 16]),
    elements=st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False),
).filter(lambda v: np.linalg.norm(v) > 1e-3)


def normalized(v):
    return StateVector(v / np.linalg.norm(v))


def random_unitary(rng, dim):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_state_vector_rejects_bad_input():
    with pytest.raises(ValueError):
        StateVector([1, 0, 0])
    with pytest.raises(ValueError):
        StateVector([1, 1])
    with pytest.raises(ValueError):
        StateVector([np.nan, 0])
    with pytest.raises(QubitCapacityError):
        StateVector(np.ones(64) / 8)
    StateVector([1, 1], normalized=False)


def test_state_vector_is_read_only():
    s = StateVector.basis("01")
    with pytest.raises(ValueError):
        s.amps[0] = 1


def test_tensor_basis():
    np.testing.assert_array_equal(tensor(StateVector.basis("0"), StateVector.basis("0")).amps, [1, 0, 0, 0])


def test_tensor_two_epr_pairs():
    out = tensor(EPR_PAIR, EPR_PAIR)
    expected = np.zeros(16)
    expected[[0, 3, 12, 15]] = 0.5
    np.testing.assert_allclose(out.amps, expected, atol=1e-15)
    assert out.n_qubits == 4 and out.normalized


def test_tensor_partial_pairs():
    out = tensor(StateVector([0.6, 0, 0, 0.8]), StateVector([0.6, 0, 0, 0.8]))
    nz = np.flatnonzero(out.amps)
    np.testing.assert_array_equal(nz, [0, 3, 12, 15])
    np.testing.assert_allclose(out.amps[nz].real, [0.36, 0.48, 0.48, 0.64], atol=1e-15)
    assert out.norm_sq() == pytest.approx(1.0, abs=1e-12)


def test_tensor_unnormalized_tag_propagates():
    out = tensor(StateVector([2, 0], normalized=False), StateVector.basis("1"))
    assert not out.normalized


def test_tensor_capacity():
    with pytest.raises(QubitCapacityError):
        tensor(StateVector.basis("000"), StateVector.basis("000"))


def test_permute_identity_and_swap():
    s = StateVector.basis("0100")
    np.testing.assert_array_equal(permute_qubits(s, [0, 1, 2, 3]).amps, s.amps)
    np.testing.assert_array_equal(permute_qubits(s, [0, 2, 1, 3]).amps, StateVector.basis("0010").amps)


def test_permute_rejects_non_bijection():
    with pytest.raises(ValueError):
        permute_qubits(StateVector.basis("00"), [0, 0])
    with pytest.raises(ValueError):
        permute_qubits(StateVector.basis("00"), [0, 1, 2])


def test_permuted_epr_product_projections():
    # particles (1,2,3,4) -> (1,3,2,4); only |0000>, |0101>, |1010>, |1111> survive
    state = permute_qubits(tensor(EPR_PAIR, EPR_PAIR), [0, 2, 1, 3])
    for bits, idx in (("00", 0), ("11", 3)):
        residual, prob = project_subsystem(state, StateVector.basis(bits), [0, 1])
        expected = np.zeros(4)
        expected[idx] = 0.5
        np.testing.assert_allclose(residual.amps, expected, atol=1e-15)
        assert prob == pytest.approx(0.25, abs=1e-15)
        assert not residual.normalized


@given(complex_vecs, st.data())
def test_permute_inverse_roundtrip(v, data):
    s = normalized(v)
    perm = data.draw(st.permutations(range(s.n_qubits)))
    back = permute_qubits(permute_qubits(s, perm), inverse_permutation(perm))
    np.testing.assert_array_equal(back.amps, s.amps)


def test_apply_unitary_matches_dense_kron(rng):
    # oracle: explicit Kronecker embedding + basis reordering
    s = normalized(rng.standard_normal(8) + 1j * rng.standard_normal(8))
    u = random_unitary(rng, 2)
    full = np.kron(np.kron(np.eye(2), u), np.eye(2))
    np.testing.assert_allclose(apply_unitary(s, u, [1]).amps, full @ s.amps, atol=1e-14)
    u2 = random_unitary(rng, 4)
    full = np.kron(u2, np.eye(2))
    np.testing.assert_allclose(apply_unitary(s, u2, [0, 1]).amps, full @ s.amps, atol=1e-14)
    # reversed target order flips the operator's bit significance
    swap = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_allclose(apply_unitary(s, u2, [1, 0]).amps, apply_unitary(s, swap @ u2 @ swap, [0, 1]).amps, atol=1e-14)


def test_apply_unitary_errors():
    s = StateVector.basis("00")
    with pytest.raises(ValueError):
        apply_unitary(s, np.eye(2), [0, 1])
    with pytest.raises(ValueError):
        apply_unitary(s, np.eye(4), [0, 0])
    with pytest.raises(ValueError):
        apply_unitary(s, np.eye(2), [2])
    with pytest.raises(ValueError):
        apply_unitary(s, 2 * np.eye(2), [0])


def test_apply_identity():
    s = StateVector([0.6, 0.8j])
    np.testing.assert_array_equal(apply_unitary(s, np.eye(2), [0]).amps, s.amps)


@given(complex_vecs, st.integers(0, 2**32 - 1))
def test_apply_unitary_preserves_norm(v, seed):
    s = normalized(v)
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, s.n_qubits + 1))
    targets = list(rng.permutation(s.n_qubits)[:k])
    u = random_unitary(rng, 2**k)
    assert check_unitary(u, 1e-12)
    assert apply_unitary(s, u, targets).norm_sq() == pytest.approx(1.0, abs=1e-12)


def test_project_conjugates_bra():
    s = tensor(StateVector([H, 1j * H]), StateVector.basis("0"))
    bra = StateVector([H, 1j * H])
    residual, prob = project_subsystem(s, bra, [0])
    np.testing.assert_allclose(residual.amps, [1, 0], atol=1e-15)
    assert prob == pytest.approx(1.0)


def test_project_errors():
    s = StateVector.basis("000")
    with pytest.raises(ValueError):
        project_subsystem(s, StateVector.basis("0"), [0, 1])
    with pytest.raises(ValueError):
        project_subsystem(s, StateVector.basis("000"), [0, 1, 2])


@given(complex_vecs.filter(lambda v: v.size >= 8), st.integers(0, 2**32 - 1))
def test_projection_completeness(v, seed):
    s = normalized(v)
    rng = np.random.default_rng(seed)
    targets = list(rng.permutation(s.n_qubits)[:2])
    basis = random_unitary(rng, 4)
    rebuilt = np.zeros(s.amps.size, dtype=complex)
    total = 0.0
    for k in range(4):
        b = StateVector(basis[:, k])
        residual, prob = project_subsystem(s, b, targets)
        total += prob
        piece = tensor(b, residual)
        rest = [q for q in range(s.n_qubits) if q not in targets]
        rebuilt += permute_qubits(piece, inverse_permutation(targets + rest)).amps
    assert total == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(rebuilt, s.amps, atol=1e-10)


@given(complex_vecs.filter(lambda v: v.size <= 8), complex_vecs.filter(lambda v: v.size <= 4))
def test_tensor_then_project_recovers_right_factor(left, right):
    ls = StateVector(left, normalized=False)
    rs = StateVector(right, normalized=False)
    joint = tensor(ls, rs)
    for i in range(left.size):
        bits = format(i, f"0{ls.n_qubits}b")
        residual, _ = project_subsystem(joint, StateVector.basis(bits), list(range(ls.n_qubits)))
        np.testing.assert_array_equal(residual.amps, left[i] * rs.amps)


def test_fidelity_examples():
    s = StateVector([0.6, 0.8j])
    assert fidelity_up_to_phase(s, s) == pytest.approx(1.0, abs=1e-15)
    assert fidelity_up_to_phase(s, StateVector(np.exp(2.0j) * s.amps)) == pytest.approx(1.0, abs=1e-15)
    assert fidelity_up_to_phase(StateVector.basis("00"), EPR_PAIR) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(ValueError):
        fidelity_up_to_phase(StateVector.basis("0"), EPR_PAIR)


@given(complex_vecs, st.integers(0, 2**32 - 1), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_fidelity_phase_invariant(v, seed, t1, t2):
    x = normalized(v)
    rng = np.random.default_rng(seed)
    y = normalized(rng.standard_normal(v.size) + 1j * rng.standard_normal(v.size))
    f = fidelity_up_to_phase(x, y)
    assert 0 <= f <= 1 + 1e-12
    assert fidelity_up_to_phase(StateVector(np.exp(1j * t1) * x.amps), StateVector(np.exp(1j * t2) * y.amps)) == pytest.approx(f, abs=1e-12)


def test_check_unitary():
    assert check_unitary(np.eye(4))
    u = np.eye(4)
    u[1, 2] = 1e-3
    assert not check_unitary(u, 1e-6)
    assert not check_unitary(np.ones((2, 3)))


def test_normalize_tiny_residual():
    s = StateVector([1e-160, 0, 0, 1e-160], normalized=False).normalize()
    np.testing.assert_allclose(s.amps, [H, 0, 0, H], atol=1e-15)
    with pytest.raises(ValueError):
        StateVector([0, 0], normalized=False).normalize()
