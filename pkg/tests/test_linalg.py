import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from qprob import linalg
from qprob.errors import DimMismatch, NotHermitian
from qprob.linalg import I2, SIGMA_X, SIGMA_Y, SIGMA_Z

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 6)


def test_sigma_z_decomposition():
    sd = linalg.spectral_decompose(SIGMA_Z)
    assert np.allclose(sd.eigenvalues, [-1, 1])
    assert np.allclose(sd.projectors[1], np.diag([1, 0]))
    assert np.allclose(sd.projectors[0], np.diag([0, 1]))


def test_degenerate_eigenvalues_merge():
    sd = linalg.spectral_decompose(np.diag([2.0, 2.0, -1.0]))
    assert sd.ranks == (1, 2)
    assert np.allclose(sd.eigenvalues, [-1, 2])


def test_near_degenerate_merge_uses_tolerance():
    sd = linalg.spectral_decompose(np.diag([1.0, 1.0 + 1e-12]))
    assert len(sd) == 1
    assert len(linalg.spectral_decompose(np.diag([1.0, 1.0 + 1e-3]))) == 2


def test_not_hermitian_reports_deviation():
    with pytest.raises(NotHermitian) as info:
        linalg.spectral_decompose(np.array([[0, 1], [0, 0]]))
    assert info.value.deviation == pytest.approx(1.0)


def test_non_square_rejected():
    with pytest.raises(DimMismatch):
        linalg.spectral_decompose(np.zeros((2, 3)))


@given(seeds, dims)
def test_projectors_resolve_identity(seed, dim):
    H = linalg.random_hermitian(dim, np.random.default_rng(seed))
    sd = linalg.spectral_decompose(H)
    assert linalg.max_norm(sum(sd.projectors) - np.eye(dim)) <= 1e-10
    for i, P in enumerate(sd.projectors):
        assert linalg.max_norm(P @ P - P) <= 1e-10
        for Q in sd.projectors[i + 1:]:
            assert linalg.max_norm(P @ Q) <= 1e-10
    assert linalg.max_norm(sd.reconstruct() - H) <= 1e-10 * max(1.0, linalg.max_norm(H))


def test_pauli_commutator():
    assert np.allclose(linalg.commutator(SIGMA_X, SIGMA_Y), 2j * SIGMA_Z)
    assert linalg.max_norm(linalg.commutator(SIGMA_Z, SIGMA_Z)) == 0.0


def test_partial_trace_of_bell_state():
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = np.outer(phi, phi.conj())
    assert np.allclose(linalg.partial_trace(rho, (2, 2), keep="first"), I2 / 2)
    assert np.allclose(linalg.partial_trace(rho, (2, 2), keep="second"), I2 / 2)


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_partial_trace_of_product(seed, da, db):
    rng = np.random.default_rng(seed)
    a, b = linalg.random_density(da, rng), linalg.random_density(db, rng)
    ab = linalg.tensor_product(a, b)
    assert linalg.max_norm(linalg.partial_trace(ab, (da, db), keep=0) - a) <= 1e-12
    assert linalg.max_norm(linalg.partial_trace(ab, (da, db), keep=1) - b) <= 1e-12


def test_partial_trace_dims_checked():
    with pytest.raises(DimMismatch):
        linalg.partial_trace(np.eye(4), (2, 3))


def test_matrix_exp_zero_is_identity():
    assert np.array_equal(linalg.matrix_exp(np.zeros((3, 3))), np.eye(3))


@given(seeds, dims)
def test_matrix_exp_matches_scipy(seed, dim):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    H = linalg.random_hermitian(dim, rng)
    assert np.allclose(linalg.matrix_exp(M), expm(M), atol=1e-10)
    assert np.allclose(linalg.matrix_exp(-1j * H), expm(-1j * H), atol=1e-10)


@given(seeds, dims)
def test_unitary_from_hamiltonian_is_unitary(seed, dim):
    H = linalg.random_hermitian(dim, np.random.default_rng(seed))
    assert linalg.is_unitary(linalg.unitary_from_hamiltonian(H, 0.7))


def test_trace_distance_orthogonal_states():
    assert linalg.trace_distance(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(1.0)


@given(seeds, dims)
def test_random_density_is_a_state(seed, dim):
    rho = linalg.random_density(dim, np.random.default_rng(seed))
    assert abs(np.trace(rho) - 1) <= 1e-12
    assert np.linalg.eigvalsh(rho).min() >= -1e-12


def test_matrix_json_roundtrip(rng):
    M = linalg.random_hermitian(3, rng)
    assert np.array_equal(linalg.matrix_from_json(linalg.matrix_to_json(M)), M)
