import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_complex, random_psd
from dichoricc._errors import DimensionMismatch, NotHermitian
from dichoricc.operator_model import (
    HamiltonianSystem,
    KreinSymmetry,
    assemble_hamiltonian,
    check_krein_structure,
    split_diag_offdiag,
)


def test_assemble_scalar():
    np.testing.assert_array_equal(assemble_hamiltonian([[1]], [[1]], [[3]]), [[1, 1], [3, -1]])


def test_assemble_zero():
    np.testing.assert_array_equal(assemble_hamiltonian([[0]], [[0]], [[0]]), np.zeros((2, 2)))


def test_assemble_lower_right_block_is_minus_adjoint():
    T = assemble_hamiltonian([[1, 1], [0, 2]], np.eye(2), np.eye(2))
    np.testing.assert_array_equal(T[2:, 2:], [[-1, 0], [-1, -2]])
    np.testing.assert_array_equal(T[:2, 2:], np.eye(2))


def test_assemble_complex_conjugates():
    A = np.array([[1 + 2j, 3j], [0, 1]])
    T = assemble_hamiltonian(A, np.eye(2), np.eye(2))
    np.testing.assert_array_equal(T[2:, 2:], -A.conj().T)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        assemble_hamiltonian(np.eye(2), np.eye(3), np.eye(2))
    with pytest.raises(DimensionMismatch):
        assemble_hamiltonian(np.ones((2, 3)), np.eye(2), np.eye(2))


def test_not_hermitian():
    with pytest.raises(NotHermitian):
        assemble_hamiltonian(np.eye(2), [[0, 1], [0, 0]], np.eye(2))


def test_nan_rejected():
    with pytest.raises(ValueError):
        assemble_hamiltonian([[np.nan]], [[1]], [[1]])


def test_system_is_immutable(scalar113):
    with pytest.raises(ValueError):
        scalar113.A[0, 0] = 5
    with pytest.raises(Exception):
        scalar113.A = np.eye(1)


def test_nonnegative_flags():
    assert HamiltonianSystem([[1]], [[1]], [[3]]).nonnegative
    s = HamiltonianSystem([[1]], [[1]], [[-1]])
    assert s.B_nonnegative and not s.C_nonnegative and not s.nonnegative


def test_split_scalar(scalar113):
    sp = split_diag_offdiag(scalar113)
    np.testing.assert_array_equal(sp.S, [[1, 0], [0, -1]])
    np.testing.assert_array_equal(sp.R, [[0, 1], [3, 0]])


def test_split_zero_offdiag():
    s = HamiltonianSystem([[1, 1], [0, 2]], np.zeros((2, 2)), np.zeros((2, 2)))
    sp = split_diag_offdiag(s)
    assert not sp.R.any()
    np.testing.assert_array_equal(sp.S, s.T)


def test_krein_symmetries():
    J = KreinSymmetry.for_dim(3)
    I = np.eye(6)
    for M in (J.J1, J.J2):
        np.testing.assert_array_equal(M @ M, I)
        np.testing.assert_array_equal(M, M.conj().T)
    assert J.J1[0, 3] == -1j and J.J1[3, 0] == 1j


def test_structure_scalar(scalar113):
    rep = check_krein_structure(scalar113.T)
    assert rep.j1_skew_defect <= 1e-12
    assert rep.j2_hermitian_part_psd


def test_structure_negative_C():
    T = assemble_hamiltonian([[1]], [[1]], [[-1]])
    rep = check_krein_structure(T)
    assert not rep.j2_hermitian_part_psd
    assert rep.j2_defect == pytest.approx(1.0)


def test_structure_nonhermitian_B_breaks_skew():
    T = np.zeros((4, 4), dtype=complex)
    T[:2, 2:] = [[0, 1], [0, 0]]
    assert check_krein_structure(T).j1_skew_defect > 0


def test_structure_odd_size():
    with pytest.raises(DimensionMismatch):
        check_krein_structure(np.eye(3))


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6))
def test_split_roundtrip_and_skew(seed, n):
    rng = np.random.default_rng(seed)
    B = random_psd(rng, n) - random_psd(rng, n)
    sys = HamiltonianSystem(random_complex(rng, n), B, random_psd(rng, n))
    sp = split_diag_offdiag(sys)
    np.testing.assert_array_equal(sp.S + sp.R, sys.T)
    assert not sp.R[:n, :n].any() and not sp.S[:n, n:].any()
    rep = check_krein_structure(sys.T)
    assert rep.j1_skew_defect <= 1e-12 * (1 + np.linalg.norm(sys.T, 2))


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5), st.floats(-1.0, 1.0))
def test_j2_psd_iff_blocks_nonnegative(seed, n, shift):
    rng = np.random.default_rng(seed)
    B = random_psd(rng, n) + shift * np.eye(n)
    C = random_psd(rng, n)
    sys = HamiltonianSystem(random_complex(rng, n), B, C)
    rep = check_krein_structure(sys.T)
    assert rep.j2_hermitian_part_psd == sys.nonnegative
