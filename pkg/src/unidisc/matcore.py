"""
Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of complex dtype.  Bipartite vectors
follow the row-major convention ``|E>> = sum_ij E_ij |i>|j>``, so that
``vec(E) = E.reshape(-1)`` and local actions obey
``(A ⊗ B) |C>> = |A C B^T>>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg
from scipy.stats import unitary_group

from .errors import (
    DimensionNotSquare,
    NoConvergence,
    NotDensityMatrix,
    NotUnitary,
)

TOL_ALG = 1e-12
TOL_DECOMP = 1e-10
TOL_CLUSTER = 1e-8

ComplexArray = npt.NDArray[np.complex128]


def as_matrix(M) -> ComplexArray:
    """Coerce ``M`` to a finite square complex array, raising ``ValueError`` otherwise."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def dagger(M: ComplexArray) -> ComplexArray:
    return np.conj(M).T


def is_unitary(M, tol: float = TOL_DECOMP) -> bool:
    """Return True iff ``max|M^† M - I| <= tol``."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    if not np.all(np.isfinite(A)):
        return False
    dev = dagger(A) @ A - np.eye(A.shape[0])
    return bool(np.max(np.abs(dev), initial=0.0) <= tol)


def require_unitary(M, tol: float = TOL_DECOMP, name: str = "matrix") -> ComplexArray:
    A = as_matrix(M)
    if not is_unitary(A, tol):
        dev = np.max(np.abs(dagger(A) @ A - np.eye(A.shape[0])))
        raise NotUnitary(f"{name} is not unitary (max|M^†M - I| = {dev:.3e} > {tol:.1e})")
    return A


@dataclass(frozen=True)
class EigenSystem:
    """Spectral decomposition ``U = V diag(eigenvalues) V^†``.

    Columns of ``eigenvectors`` are orthonormal eigenvectors.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def residuals(self, U) -> np.ndarray:
        U = np.asarray(U, dtype=complex)
        R = U @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return np.linalg.norm(R, axis=0)

    def reconstruct(self) -> ComplexArray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ dagger(V)


def _clusters(values: np.ndarray, threshold: float) -> list[list[int]]:
    """Group indices whose values chain together within ``threshold``."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= threshold:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def eig_unitary(
    U,
    tol: float = TOL_DECOMP,
    cluster_tol: float = TOL_CLUSTER,
) -> EigenSystem:
    """
    Eigendecomposition of a unitary matrix.

    The complex Schur form of a normal matrix is diagonal, so the Schur
    vectors are already an orthonormal eigenbasis.  Columns belonging to
    eigenvalues closer than ``cluster_tol`` are re-orthonormalized as a block
    and eigenvalues are projected onto the unit circle.

    Raises
    ------
    NotUnitary
        If ``U`` fails the unitarity check at ``tol``.
    NoConvergence
        If the Schur iteration fails or the residual check does not hold.
    """
    U = require_unitary(U, tol)
    try:
        T, Z = scipy.linalg.schur(U, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(str(exc)) from exc
    lam = np.diag(T).copy()
    lam /= np.abs(lam)
    V = Z.copy()
    for block in _clusters(lam, cluster_tol):
        if len(block) > 1:
            Q, _ = np.linalg.qr(V[:, block])
            V[:, block] = Q
    es = EigenSystem(lam, V)
    scale = max(np.linalg.norm(U, 2), 1.0)
    if np.max(es.residuals(U)) > tol * scale:
        raise NoConvergence(
            f"eigen-residual {np.max(es.residuals(U)):.3e} exceeds {tol * scale:.1e}"
        )
    return es


def kron(A, B) -> ComplexArray:
    """Kronecker product, ``(A⊗B)[i*d2+k, j*d2+l] = A[i,j] B[k,l]``."""
    return np.kron(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))


def vec(E) -> np.ndarray:
    """Row-major vectorization |E>> of a square operator."""
    return as_matrix(E).reshape(-1)


def unvec(v) -> ComplexArray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    d = _int_sqrt(v.size)
    return v.reshape(d, d)


def inner(A, B) -> complex:
    """<<A|B>> = Tr[A^† B]."""
    return complex(np.vdot(vec(A), vec(B)))


def _int_sqrt(n: int) -> int:
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise DimensionNotSquare(f"dimension {n} is not a perfect square")
    return d


def partial_trace(M, subsystem: str = "first") -> ComplexArray:
    """
    Partial trace of an operator on H⊗H.

    ``subsystem="first"`` traces out the left factor (Tr_1), ``"second"`` the
    right one (Tr_2).  For a pure bipartite state,
    ``Tr_1 |E>><<E| = (E^† E)^T`` and ``Tr_2 |E>><<E| = E E^†``.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    d = _int_sqrt(M.shape[0])
    T = M.reshape(d, d, d, d)
    if subsystem == "first":
        return np.einsum("ijik->jk", T)
    if subsystem == "second":
        return np.einsum("ijkj->ik", T)
    raise ValueError(f"subsystem must be 'first' or 'second', not {subsystem!r}")


def von_neumann_entropy(
    rho,
    base: float = 2,
    tol: float = TOL_DECOMP,
    cutoff: float = 1e-14,
) -> float:
    """
    Von Neumann entropy ``-Tr rho log rho``, in bits by default.

    Eigenvalues at or below ``cutoff`` contribute nothing (0 log 0 = 0).
    """
    rho = as_matrix(rho)
    if np.max(np.abs(rho - dagger(rho))) > tol:
        raise NotDensityMatrix("matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise NotDensityMatrix(f"trace {np.trace(rho).real:.6g} != 1")
    p = np.linalg.eigvalsh((rho + dagger(rho)) / 2)
    if p.min() < -tol:
        raise NotDensityMatrix(f"negative eigenvalue {p.min():.3e}")
    p = p[p > cutoff]
    s = -float(np.sum(p * np.log(p)))
    return float(max(s, 0.0) / np.log(base))


def numeric_rank(M, rel_tol: float = TOL_DECOMP) -> int:
    """Number of singular values above ``rel_tol`` times the largest one."""
    s = np.linalg.svd(np.asarray(M, dtype=complex), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def random_unitary(d: int, rng: np.random.Generator | int | None = None) -> ComplexArray:
    """Haar-distributed ``d x d`` unitary."""
    if d == 1:
        rng = np.random.default_rng(rng)
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(d, random_state=np.random.default_rng(rng))


def random_state(d: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
    rng = np.random.default_rng(rng)
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_hermitian(d: int, rng: np.random.Generator | int | None = None) -> ComplexArray:
    rng = np.random.default_rng(rng)
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (A + dagger(A)) / 2
