"""Hamiltonian block matrices, their diagonal/off-diagonal split and the
two Krein-space fundamental symmetries."""

from dataclasses import dataclass, field

import numpy as np

from ._errors import DimensionMismatch
from .validation import (
    DEFAULT_TOLERANCES,
    check_hermitian,
    check_square,
    hermitian_part,
    norm2,
)


def assemble_hamiltonian(A, B, C, tol_herm=DEFAULT_TOLERANCES["tol_herm"]):
    """Return the block matrix ``[[A, B], [C, -A*]]``.

    Raises
    ------
    DimensionMismatch
        If the blocks are not all ``n x n``.
    NotHermitian
        If ``B`` or ``C`` fails the Hermiticity tolerance.
    """
    A = check_square(A, "A")
    B = check_hermitian(B, "B", tol_herm)
    C = check_hermitian(C, "C", tol_herm)
    if not (A.shape == B.shape == C.shape):
        raise DimensionMismatch(
            f"blocks must share one shape, got A{A.shape} B{B.shape} C{C.shape}")
    return np.block([[A, B], [C, -A.conj().T]])


@dataclass(frozen=True, eq=False)
class HamiltonianSystem:
    """The triple ``(A, B, C)`` defining ``T = [[A, B], [C, -A*]]``.

    ``B`` and ``C`` must be Hermitian within ``tol_herm * (1 + ||M||)``.
    Nonnegativity is not enforced, only reported by :attr:`nonnegative`.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    tol_herm: float = DEFAULT_TOLERANCES["tol_herm"]
    tol_psd: float = DEFAULT_TOLERANCES["tol_psd"]
    _T: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        T = assemble_hamiltonian(self.A, self.B, self.C, self.tol_herm)
        n = T.shape[0] // 2
        object.__setattr__(self, "A", T[:n, :n].copy())
        object.__setattr__(self, "B", T[:n, n:].copy())
        object.__setattr__(self, "C", T[n:, :n].copy())
        object.__setattr__(self, "_T", T)
        for name in ("A", "B", "C", "_T"):
            getattr(self, name).setflags(write=False)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def T(self):
        return self._T

    def _psd(self, M):
        lam = float(np.linalg.eigvalsh(hermitian_part(M))[0])
        return lam >= -self.tol_psd * (1.0 + norm2(M))

    @property
    def B_nonnegative(self):
        return self._psd(self.B)

    @property
    def C_nonnegative(self):
        return self._psd(self.C)

    @property
    def nonnegative(self):
        return self.B_nonnegative and self.C_nonnegative

    def scaled(self, r):
        """The system of ``S + r R``: ``(A, r B, r C)``."""
        return HamiltonianSystem(self.A, r * self.B, r * self.C, self.tol_herm, self.tol_psd)

    def dual(self):
        """System of ``J2 T J2 = [[-A*, C], [B, A]]``; its graph subspaces are
        the inverse graphs of ``T``."""
        return HamiltonianSystem(-self.A.conj().T, self.C, self.B, self.tol_herm, self.tol_psd)


@dataclass(frozen=True)
class BlockSplit:
    S: np.ndarray
    R: np.ndarray


def split_diag_offdiag(system):
    """Split ``T = S + R`` into ``S = diag(A, -A*)`` and ``R = [[0, B], [C, 0]]``."""
    n = system.n
    S = np.zeros((2 * n, 2 * n), dtype=complex)
    R = np.zeros_like(S)
    S[:n, :n] = system.A
    S[n:, n:] = -system.A.conj().T
    R[:n, n:] = system.B
    R[n:, :n] = system.C
    return BlockSplit(S, R)


@dataclass(frozen=True)
class KreinSymmetry:
    J1: np.ndarray
    J2: np.ndarray

    @classmethod
    def for_dim(cls, n):
        """``J1 = [[0, -iI], [iI, 0]]`` and ``J2 = [[0, I], [I, 0]]`` on ``C^n x C^n``."""
        I = np.eye(n, dtype=complex)
        Z = np.zeros((n, n), dtype=complex)
        J1 = np.block([[Z, -1j * I], [1j * I, Z]])
        J2 = np.block([[Z, I], [I, Z]])
        return cls(J1, J2)

    @property
    def n(self):
        return self.J1.shape[0] // 2


@dataclass(frozen=True)
class StructureReport:
    j1_skew_defect: float
    j2_hermitian_part_psd: bool
    j2_defect: float


def check_krein_structure(T, J=None, tol_psd=DEFAULT_TOLERANCES["tol_psd"]):
    """Measure J1-skew-symmetry of ``T`` and J2-accretivity (nonnegativity)."""
    T = check_square(T, "T")
    if T.shape[0] % 2:
        raise DimensionMismatch(f"T must have even size, got {T.shape}")
    if J is None:
        J = KreinSymmetry.for_dim(T.shape[0] // 2)
    elif J.J1.shape != T.shape:
        raise DimensionMismatch("Krein symmetry does not match T")
    J1T = J.J1 @ T
    j1_skew = norm2(J1T + J1T.conj().T)
    lam = float(np.linalg.eigvalsh(hermitian_part(J.J2 @ T))[0])
    psd = lam >= -tol_psd * (1.0 + norm2(T))
    return StructureReport(j1_skew, bool(psd), max(0.0, -lam))
