import json
import warnings

import numpy as np
import pytest
import scipy.linalg

from hamrec.models import assemble_dense, enumerate_terms, random_instance
from hamrec.pauli import dense, PauliString
from hamrec.pipeline import spec_from_profile
from hamrec.spectral import (
    AmbiguousClusteringWarning,
    SteadyStateSpec,
    WeightClass,
    build_steady_state,
    cluster_weights,
    complement_basis,
    eigendecompose,
)

from conftest import instance, random_state


def test_eigendecompose_diagonal():
    eig = eigendecompose(np.diag([1.0, 2.0]))
    np.testing.assert_allclose(eig.eigenvalues, [1, 2])
    np.testing.assert_allclose(np.abs(eig.eigenvectors), np.eye(2))


def test_eigendecompose_pauli_x():
    eig = eigendecompose(dense(PauliString("X")))
    np.testing.assert_allclose(eig.eigenvalues, [-1, 1])


def test_eigendecompose_rejects_non_hermitian():
    with pytest.raises(ValueError):
        eigendecompose(np.array([[0, 1], [0, 0]], dtype=float))


def test_reconstruction_identity():
    basis = enumerate_terms("h2", 3)
    H = assemble_dense(basis, random_instance("h2", 3, 0))
    eig = eigendecompose(H)
    V, w = eig.eigenvectors, eig.eigenvalues
    np.testing.assert_allclose((V * w) @ V.conj().T, H, atol=1e-10)
    np.testing.assert_allclose(V.conj().T @ V, np.eye(8), atol=1e-12)
    np.testing.assert_allclose(H @ V, V * w, atol=1e-10 * np.linalg.norm(H, 2))


def test_spec_validation():
    with pytest.raises(ValueError):
        SteadyStateSpec((WeightClass(0.25, (0, 1)), WeightClass(0.25, (2, 3))))
    with pytest.raises(ValueError):
        SteadyStateSpec((WeightClass(0.5, (0, 1)), WeightClass(0.5, (1,))))
    with pytest.raises(ValueError):
        SteadyStateSpec((WeightClass(0.4, (0, 1)),))
    with pytest.raises(ValueError):
        SteadyStateSpec((WeightClass(-1.0, (0,)), WeightClass(2.0, (1,))))


def test_spec_json_roundtrip():
    spec = spec_from_profile((2, 2))
    data = json.loads(spec.to_json())
    assert data == {"classes": [{"weight": 0.2, "indices": [0, 1]}, {"weight": 0.3, "indices": [2, 3]}]}
    assert SteadyStateSpec.from_json(spec.to_json()) == spec


def test_single_class_rho():
    _, _, H, rho, _ = instance("h2", 3, (2,))
    w = np.linalg.eigvalsh(rho)[::-1]
    np.testing.assert_allclose(w, [0.5, 0.5] + [0] * 6, atol=1e-14)


def test_rho_me_pattern():
    basis, a, H, rho, blocks = instance("h2", 4, (2, 2))
    V = np.linalg.eigh(H)[1]
    expected = 0.2 * (V[:, :2] @ V[:, :2].conj().T) + 0.3 * (V[:, 2:4] @ V[:, 2:4].conj().T)
    np.testing.assert_allclose(rho, expected, atol=1e-14)
    assert blocks.weights == [0.2, 0.3]


@pytest.mark.parametrize("kind,L,q", [("h2", 3, (2,)), ("h3", 5, (2, 2)), ("h2", 6, (3,))])
def test_constructed_state_commutes(kind, L, q):
    _, _, H, rho, _ = instance(kind, L, q)
    comm = H @ rho - rho @ H
    assert np.linalg.norm(comm) <= 1e-10 * np.linalg.norm(H)


def test_cluster_maximally_mixed():
    blocks = cluster_weights(np.eye(8) / 8)
    assert blocks.profile == (8,)
    assert blocks.weights[0] == pytest.approx(1 / 8)
    assert blocks.complement.shape == (8, 0)


def test_cluster_single_eigenvalued():
    _, _, _, rho, _ = instance("h2", 4, (2,))
    blocks = cluster_weights(rho)
    assert blocks.profile == (2,)
    assert blocks.weights[0] == pytest.approx(0.5, abs=1e-12)
    assert blocks.complement.shape == (16, 14)


def test_cluster_rho_me():
    _, _, _, rho, _ = instance("h3", 4, (2, 2))
    blocks = cluster_weights(rho)
    assert blocks.profile == (2, 2)
    np.testing.assert_allclose(blocks.weights, [0.2, 0.3], atol=1e-12)
    assert blocks.Q == 4


def principal_angles(A, B):
    return scipy.linalg.subspace_angles(A, B)


@pytest.mark.parametrize(
    "kind,L,q",
    [("h2", 3, (2,)), ("h2", 5, (2, 2)), ("h3", 6, (3,)), ("h3", 8, (2, 2)), ("h2", 8, (1, 2, 3)), ("h2", 9, (2, 2))],
)
def test_cluster_roundtrip(kind, L, q):
    _, _, _, rho, truth = instance(kind, L, q, seed=L)
    found = cluster_weights(rho)
    assert found.profile == truth.profile
    np.testing.assert_allclose(found.weights, truth.weights, atol=1e-10)
    for B_found, B_true in zip(found.blocks, truth.blocks):
        assert np.max(principal_angles(B_found, B_true)) <= 1e-8
    assert found.Q + found.complement.shape[1] == 2**L


def test_complement_matches_zero_eigenspace():
    _, _, _, rho, _ = instance("h2", 5, (2, 2))
    found = cluster_weights(rho)
    w, v = np.linalg.eigh(rho)
    zero_space = v[:, w < 1e-12]
    assert np.max(principal_angles(found.complement, zero_space)) <= 1e-8


def test_ambiguous_gap_warns():
    rho = np.diag([0.5 - 4e-11, 0.5 + 4e-11, 0, 0])
    with pytest.warns(AmbiguousClusteringWarning):
        blocks = cluster_weights(rho)
    assert blocks.profile == (1, 1)


def test_clear_gap_does_not_warn():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        cluster_weights(np.diag([0.2, 0.2, 0.3, 0.3]))


def test_cluster_rejects_bad_trace():
    with pytest.raises(ValueError):
        cluster_weights(np.eye(4) / 2)


def test_complement_basics():
    e0 = np.zeros((8, 1))
    e0[0] = 1
    C = complement_basis([e0], 8)
    assert C.shape == (8, 7)
    np.testing.assert_allclose(C.conj().T @ e0, 0, atol=1e-15)
    np.testing.assert_allclose(C.conj().T @ C, np.eye(7), atol=1e-14)
    assert complement_basis([np.eye(4)], 4).shape == (4, 0)


def test_complement_orthogonality_inner_products():
    _, _, _, _, blocks = instance("h2", 4, (2,))
    C = blocks.complement
    products = C.conj().T @ blocks.stacked()
    assert products.size == 2 * (16 - 2)
    assert np.max(np.abs(products)) <= 1e-10


def test_complement_coordinates_match_explicit_basis(rng):
    _, _, _, _, blocks = instance("h3", 5, (2, 2))
    X = random_state(rng, 32, 6)
    np.testing.assert_allclose(blocks.complement_coordinates(X), blocks.complement.conj().T @ X, atol=1e-13)


def test_index_out_of_range():
    basis = enumerate_terms("h2", 2)
    eig = eigendecompose(assemble_dense(basis, random_instance("h2", 2, 0)))
    with pytest.raises(IndexError):
        build_steady_state(SteadyStateSpec((WeightClass(0.5, (3, 4)),)), eig)
