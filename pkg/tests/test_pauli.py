import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamrec.models import enumerate_terms
from hamrec.pauli import PauliString, apply, dense, matrix_element

from conftest import random_state

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def test_x_flips_zero():
    np.testing.assert_array_equal(apply(PauliString("X"), ket("0")), ket("1"))


def test_y_on_zero():
    np.testing.assert_array_equal(apply(PauliString("Y"), ket("0")), 1j * ket("1"))


def test_zz_parity_phase():
    np.testing.assert_array_equal(apply(PauliString("ZZ"), ket("01")), -ket("01"))


def test_site_one_is_most_significant_bit():
    # X on site 1 of |00> gives |10>, index 2
    out = apply(PauliString("XI"), ket("00"))
    assert out[2] == 1


def test_matrix_elements():
    assert matrix_element(ket("1"), PauliString("X"), ket("0")) == 1
    assert matrix_element(ket("0"), PauliString("Z"), ket("0")) == 1
    assert matrix_element(ket("1"), PauliString("Z"), ket("1")) == -1


def test_identity_matrix_element_is_norm(rng):
    psi = random_state(rng, 8)
    val = matrix_element(psi, PauliString("III"), psi)
    assert val == pytest.approx(np.vdot(psi, psi).real, rel=1e-14)


def test_dense_small_cases():
    np.testing.assert_array_equal(dense(PauliString("X")), X)
    np.testing.assert_array_equal(dense(PauliString("II")), np.eye(4))
    expected = np.array(
        [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, -1, 0]], dtype=complex
    )
    np.testing.assert_array_equal(dense(PauliString("ZX")), expected)


def test_dense_limit():
    with pytest.raises(ValueError):
        dense(PauliString("I" * 7))
    assert dense(PauliString("I" * 7), limit=7).shape == (128, 128)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        apply(PauliString("XX"), np.ones(8))
    with pytest.raises(ValueError):
        matrix_element(np.ones(4), PauliString("XX"), np.ones(2))


def test_invalid_label():
    with pytest.raises(ValueError):
        PauliString("XQ")


pauli_strings = st.integers(1, 5).flatmap(
    lambda L: st.text(alphabet="IXYZ", min_size=L, max_size=L)
)


@settings(max_examples=150, deadline=None)
@given(ops=pauli_strings, seed=st.integers(0, 2**32 - 1))
def test_matches_kron_oracle(ops, seed):
    rng = np.random.default_rng(seed)
    P = PauliString(ops)
    psi = random_state(rng, 2 ** len(ops))
    kron = np.ones((1, 1))
    for c in ops:
        kron = np.kron(kron, {"I": np.eye(2), "X": X, "Y": Y, "Z": Z}[c])
    np.testing.assert_allclose(apply(P, psi), kron @ psi, rtol=0, atol=1e-13)
    np.testing.assert_allclose(apply(P, psi), dense(P) @ psi, rtol=0, atol=1e-13)


@settings(max_examples=100, deadline=None)
@given(ops=pauli_strings, seed=st.integers(0, 2**32 - 1))
def test_involution_and_hermiticity(ops, seed):
    rng = np.random.default_rng(seed)
    P = PauliString(ops)
    psi = random_state(rng, 2 ** len(ops))
    phi = random_state(rng, 2 ** len(ops))
    twice = apply(P, apply(P, psi))
    np.testing.assert_allclose(twice, psi, rtol=1e-15, atol=0)
    assert matrix_element(phi, P, psi) == pytest.approx(
        np.conj(matrix_element(psi, P, phi)), rel=1e-13
    )


def test_batched_columns(rng):
    P = PauliString("XYZ")
    block = random_state(rng, 8, 3)
    out = apply(P, block)
    for k in range(3):
        np.testing.assert_array_equal(out[:, k], apply(P, block[:, k]))


@pytest.mark.parametrize("kind,L", [("h2", 2), ("h2", 3), ("h2", 4), ("h3", 3), ("h3", 4)])
def test_trace_orthogonality(kind, L):
    mats = [dense(P) for P in enumerate_terms(kind, L).terms]
    flat = np.array([m.ravel() for m in mats])
    # Tr(P P') = sum_ij P_ij P'_ji; all Paulis are Hermitian so use P'^* entries
    gram = flat.conj() @ flat.T
    np.testing.assert_allclose(gram, 2**L * np.eye(len(mats)), atol=1e-12)
    for m in mats[:10]:
        np.testing.assert_allclose(m, m.conj().T, atol=0)
        np.testing.assert_allclose(m @ m, np.eye(2**L), atol=1e-15)


def test_all_two_site_strings_square_to_identity():
    for ops in map("".join, itertools.product("IXYZ", repeat=2)):
        d = dense(PauliString(ops))
        np.testing.assert_allclose(d @ d, np.eye(4), atol=0)
