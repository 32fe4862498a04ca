"""
Dense complex linear algebra kernel.

Vectors are 1-D complex numpy arrays, Hermitian matrices are square 2-D
complex numpy arrays. The helpers here validate shapes and Hermitian
symmetry and wrap LAPACK's Hermitian eigensolver with a descending
eigenvalue convention. Problem sizes are tiny (n <= 16), so everything is
dense.
"""

from typing import NamedTuple

import numpy as np

from .exceptions import DimensionError, NotHermitianError

TAU_HERM = 1e-10
TAU_EIG = 1e-10
TAU_PSD = 1e-9


class EigDecomposition(NamedTuple):
    """Eigenvalues in descending order and matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def as_vector(x) -> np.ndarray:
    """Return `x` as a 1-D complex array of length at least one."""
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    return v


def as_hermitian(A, tol: float = TAU_HERM) -> np.ndarray:
    """
    Validate `A` as a Hermitian matrix and return it as a complex array.

    The matrix is not symmetrized: an asymmetry larger than
    ``tol * max(1, max|A_ij|)`` raises :class:`NotHermitianError`.
    """
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M))))
    asym = float(np.max(np.abs(M - M.conj().T)))
    if asym > tol * scale:
        raise NotHermitianError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    return M


def norm(v) -> float:
    v = as_vector(v)
    return float(np.sqrt(np.real(np.vdot(v, v))))


def inner(a, b) -> complex:
    """Scalar product ``a^H b`` (conjugate-linear in the first argument)."""
    a = as_vector(a)
    b = as_vector(b)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.size} vs {b.size}")
    return complex(np.vdot(a, b))


def outer(a) -> np.ndarray:
    """Rank-one Hermitian matrix ``a a^H``."""
    a = as_vector(a)
    return np.outer(a, a.conj())


def trace_product(A, B) -> float:
    """Real part of ``trace(A B)`` for Hermitian `A`, `B`.

    Computed as ``sum(A * B^T)`` without forming the product.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.ndim != 2 or A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise DimensionError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return float(np.real(np.sum(A * B.T)))


def eigh(A) -> EigDecomposition:
    """Hermitian eigendecomposition with eigenvalues sorted descending."""
    M = as_hermitian(A)
    w, V = np.linalg.eigh(M)
    return EigDecomposition(w[::-1].copy(), V[:, ::-1].copy())


def min_eig(A, check: bool = True) -> float:
    """Smallest eigenvalue of a Hermitian matrix.

    ``check=False`` skips validation; the solver's inner loops use it on
    matrices that are Hermitian by construction.
    """
    M = as_hermitian(A) if check else A
    return float(np.linalg.eigvalsh(M)[0])


def op_norm(A) -> float:
    """Operator (spectral) norm of a Hermitian matrix: max |eigenvalue|."""
    w = np.linalg.eigvalsh(as_hermitian(A))
    return float(max(abs(w[0]), abs(w[-1])))


def is_psd(A, tol: float = TAU_PSD) -> bool:
    """True iff ``min_eig(A) >= -tol * ||A||``."""
    w = np.linalg.eigvalsh(as_hermitian(A))
    scale = max(abs(w[0]), abs(w[-1]))
    return bool(w[0] >= -tol * scale)
