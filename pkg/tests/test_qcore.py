import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entloss import qcore
from entloss.channels import random_state
from entloss.errors import DimMismatch, IndexOutOfRange, InvalidState, NotHermitian, NotSquare


def loop_partial_trace_b(rho, dA, dB):
    """Index-sum oracle for Tr_B."""
    out = np.zeros((dA, dA), dtype=complex)
    for i in range(dA):
        for j in range(dA):
            for b in range(dB):
                out[i, j] += rho[i * dB + b, j * dB + b]
    return out


def loop_partial_trace_a(rho, dA, dB):
    out = np.zeros((dB, dB), dtype=complex)
    for i in range(dB):
        for j in range(dB):
            for a in range(dA):
                out[i, j] += rho[a * dB + i, a * dB + j]
    return out


@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3)]))
@settings(max_examples=30, deadline=None)
def test_partial_trace_matches_index_sum(seed, dims):
    dA, dB = dims
    rho = random_state(dims, seed=seed)
    assert np.allclose(qcore.partial_trace(rho, [0]).mat, loop_partial_trace_b(rho.mat, dA, dB))
    assert np.allclose(qcore.partial_trace(rho, [1]).mat, loop_partial_trace_a(rho.mat, dA, dB))


def test_partial_trace_three_parties_and_order():
    rng = np.random.default_rng(3)
    a, b, c = (random_state(d, seed=rng).mat for d in (2, 3, 2))
    rho = qcore.DensityMatrix(np.kron(np.kron(a, b), c), (2, 3, 2))
    assert np.allclose(qcore.partial_trace(rho, [1]).mat, b)
    assert np.allclose(qcore.partial_trace(rho, [2, 0]).mat, np.kron(a, c))
    with pytest.raises(IndexOutOfRange):
        qcore.partial_trace(rho, [3])


def test_eigh_2x2_against_quadratic_formula():
    m = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    tr, det = np.trace(m).real, np.linalg.det(m).real
    disc = np.sqrt(tr**2 / 4 - det)
    w, _ = qcore.eigh(m)
    assert np.allclose(w, [tr / 2 - disc, tr / 2 + disc])


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        qcore.eigh(np.array([[0, 1], [0, 0]]))


def test_trace_norm():
    assert np.isclose(qcore.trace_norm(np.diag([1.0, -2.0, 0.5])), 3.5)
    m = np.array([[1, 2], [3, 4]], dtype=float)
    assert np.isclose(qcore.trace_norm(m), np.sum(np.linalg.svd(m, compute_uv=False)))
    with pytest.raises(NotSquare):
        qcore.trace_norm(np.ones((2, 3)))


def test_density_matrix_validation():
    with pytest.raises(InvalidState):
        qcore.DensityMatrix(np.eye(2), (2,))
    with pytest.raises(InvalidState):
        qcore.DensityMatrix(np.diag([1.5, -0.5]), (2,))
    with pytest.raises(NotHermitian):
        qcore.DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]), (2,))
    with pytest.raises(DimMismatch):
        qcore.DensityMatrix(np.eye(4) / 4, (2, 3))
    rho = qcore.maximally_mixed(3)
    assert not rho.mat.flags.writeable


@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
@settings(max_examples=25, deadline=None)
def test_purification_reduces_to_input(seed, d):
    rho = random_state(d, rank=1 + seed % d, seed=seed)
    psi = qcore.purify(rho)
    assert np.isclose(np.linalg.norm(psi.vec), 1.0)
    joint = psi.density()
    assert np.allclose(qcore.partial_trace(joint, [1]).mat, rho.mat, atol=1e-10)


def test_as_density_from_vector_and_kron():
    v = np.array([1, 1j]) / np.sqrt(2)
    rho = qcore.as_density(v)
    assert np.allclose(rho.mat, np.outer(v, v.conj()))
    assert np.allclose(qcore.kron(np.eye(2), np.ones((1, 1)), np.eye(3)), np.eye(6))


def test_psd_power_pseudo_inverse():
    m = np.diag([4.0, 1.0, 0.0])
    assert np.allclose(qcore.psd_power(m, 0.5), np.diag([2, 1, 0]))
    assert np.allclose(qcore.psd_power(m, -0.5), np.diag([0.5, 1, 0]))


def test_haar_isometry_columns_orthonormal():
    rng = np.random.default_rng(0)
    V = qcore.haar_isometry(6, 3, rng)
    assert np.allclose(V.conj().T @ V, np.eye(3))
    U = qcore.haar_unitary(4, rng)
    assert np.allclose(U @ U.conj().T, np.eye(4))


def test_maximally_entangled():
    phi = qcore.maximally_entangled(2)
    assert np.allclose(phi, np.array([1, 0, 0, 1]) / np.sqrt(2))


X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_kron_examples():
    assert np.allclose(qcore.kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(qcore.kron(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))
    assert np.allclose(qcore.kron(X, X) @ np.array([1, 0, 0, 0]), [0, 0, 0, 1])
    rng = np.random.default_rng(1)
    a, b, c = (rng.standard_normal((2, 2)) for _ in range(3))
    assert np.allclose(qcore.kron(qcore.kron(a, b), c), qcore.kron(a, qcore.kron(b, c)), atol=1e-12)


def test_eigh_examples():
    w, _ = qcore.eigh(np.eye(3))
    assert np.allclose(w, 1)
    w, v = qcore.eigh(X)
    assert np.allclose(w, [-1, 1])
    assert np.allclose(v @ np.diag(w) @ v.conj().T, X, atol=1e-9)


def test_trace_norm_examples():
    zero = np.diag([1.0, 0.0])
    plus = np.full((2, 2), 0.5)
    assert np.isclose(qcore.trace_norm(zero - plus), np.sqrt(2))
    assert np.isclose(qcore.trace_norm(random_state(3, seed=5).mat), 1.0)
    rng = np.random.default_rng(2)
    a, b = rng.standard_normal((2, 3, 3))
    assert qcore.trace_norm(a + b) <= qcore.trace_norm(a) + qcore.trace_norm(b) + 1e-10
    assert np.isclose(qcore.trace_norm(-2.5 * a), 2.5 * qcore.trace_norm(a))


def test_purify_examples():
    psi = qcore.purify(np.diag([1.0, 0.0]))
    s = np.linalg.svd(psi.matrix(), compute_uv=False)
    assert np.allclose(s, [1, 0])
    psi = qcore.purify(qcore.maximally_mixed(2))
    joint = psi.density()
    assert np.allclose(qcore.partial_trace(joint, [0]).mat, np.eye(2) / 2)
    assert np.allclose(qcore.partial_trace(joint, [1]).mat, np.eye(2) / 2)
    psi = qcore.purify(np.diag([0.7, 0.3]))
    s = np.linalg.svd(psi.matrix(), compute_uv=False)
    assert np.allclose(s, [np.sqrt(0.7), np.sqrt(0.3)])
    assert (psi.dimR, psi.dimA) == (2, 2)


def test_partial_trace_bell_state():
    bell = qcore.ket_to_dm(qcore.maximally_entangled(2), (2, 2))
    assert np.allclose(qcore.partial_trace(bell, [0]).mat, np.eye(2) / 2)
