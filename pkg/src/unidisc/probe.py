"""Bipartite pure probe states |E>> handled through their operator E."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import DimensionMismatch, ZeroMatrix

MAJORIZATION_TOL = 1e-12


@dataclass(frozen=True)
class ProbeState:
    """Normalized probe; ``E`` satisfies Tr[E^† E] = 1."""

    E: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.E.shape[0]

    @property
    def vec(self) -> np.ndarray:
        return matcore.vec(self.E)

    def spectrum(self) -> np.ndarray:
        """Eigenvalues of E^† E in descending order.

        E^† E and E^T E^* share this spectrum, so either partial trace of
        |E>><<E| gives the same entropy and majorization data.
        """
        s = np.linalg.svd(self.E, compute_uv=False)
        return s**2


@dataclass(frozen=True)
class SchmidtData:
    coefficients: np.ndarray
    schmidt_number: int
    entanglement_entropy: float


class Majorization(enum.Enum):
    A_PRECEDES_B = "a_precedes_b"
    B_PRECEDES_A = "b_precedes_a"
    EQUIVALENT = "equivalent"
    INCOMPARABLE = "incomparable"


def make_probe(E) -> ProbeState:
    """Build a probe from any nonzero square matrix, rescaling to unit norm."""
    E = matcore.as_matrix(E)
    norm = np.linalg.norm(E)
    if norm == 0:
        raise ZeroMatrix("probe operator is identically zero")
    return ProbeState(E / norm)


def maximally_entangled(U, tol: float = matcore.TOL_DECOMP) -> ProbeState:
    U = matcore.require_unitary(U, tol)
    return ProbeState(U / np.sqrt(U.shape[0]))


def product_probe(d: int, k: int = 0) -> ProbeState:
    """The product state |k>|k>, i.e. E = |k><k|."""
    E = np.zeros((d, d), dtype=complex)
    E[k, k] = 1
    return ProbeState(E)


def schmidt(p: ProbeState, rel_tol: float = matcore.TOL_DECOMP) -> SchmidtData:
    c = np.linalg.svd(p.E, compute_uv=False)
    number = int(np.sum(c > rel_tol * c[0]))
    w = c**2
    w = w[w > 1e-14]
    entropy = max(-float(np.sum(w * np.log2(w))), 0.0)
    return SchmidtData(c, number, entropy)


def is_maximally_entangled(p: ProbeState, tol: float = 1e-10) -> bool:
    c = np.linalg.svd(p.E, compute_uv=False)
    return bool(np.max(np.abs(c - 1 / np.sqrt(p.dim))) <= tol)


def majorizes_spectra(a, b, tol: float = MAJORIZATION_TOL) -> Majorization:
    """Compare two probability spectra under the majorization preorder."""
    a = np.sort(np.asarray(a, dtype=float))[::-1]
    b = np.sort(np.asarray(b, dtype=float))[::-1]
    if a.shape != b.shape:
        raise DimensionMismatch(f"spectra of length {a.size} and {b.size}")
    sa, sb = np.cumsum(a), np.cumsum(b)
    a_le_b = bool(np.all(sa <= sb + tol))
    b_le_a = bool(np.all(sb <= sa + tol))
    if a_le_b and b_le_a:
        return Majorization.EQUIVALENT
    if a_le_b:
        return Majorization.A_PRECEDES_B
    if b_le_a:
        return Majorization.B_PRECEDES_A
    return Majorization.INCOMPARABLE


def majorizes(a: ProbeState, b: ProbeState, tol: float = MAJORIZATION_TOL) -> Majorization:
    """
    Majorization order between two probes.

    ``A_PRECEDES_B`` means |A>> ≺ |B>>: every partial sum of the sorted
    spectrum of A^† A is at most the matching partial sum for B, so A is at
    least as entangled as B and can be turned into B by LOCC.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"probe dimensions {a.dim} and {b.dim}")
    return majorizes_spectra(a.spectrum(), b.spectrum(), tol)


def probe_from_spectrum(weights, rng=None) -> ProbeState:
    """Probe whose E^† E has eigenvalues ``weights``, in a random local frame if ``rng`` is given."""
    w = np.asarray(weights, dtype=float)
    E = np.diag(np.sqrt(w / w.sum())).astype(complex)
    if rng is not None:
        d = len(w)
        E = matcore.random_unitary(d, rng) @ E @ matcore.random_unitary(d, rng)
    return make_probe(E)


def random_probe(d: int, rank: int | None = None, rng=None) -> ProbeState:
    """Random probe with Schmidt rank ``rank`` (full rank by default)."""
    rng = np.random.default_rng(rng)
    k = d if rank is None else rank
    A = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    B = rng.normal(size=(k, d)) + 1j * rng.normal(size=(k, d))
    return make_probe(A @ B)
