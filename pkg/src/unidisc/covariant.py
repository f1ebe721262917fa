"""
Finite projective unitary representations and the figures of merit for
discriminating their elements with a bipartite probe.

Group averages use the discrete weights mu(g) = d/|G|, so mu(G) = d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import (
    AmbiguousMatch,
    DimensionMismatch,
    Inconsistent,
    InvalidSeed,
    NotClosed,
    NotIrreducible,
)
from .probe import ProbeState

MATCH_TOL = 1e-8
REP_TOL = 1e-10
IRREP_TOL = 1e-8
DOUBLE_AVERAGE_MAX = 64


@dataclass(frozen=True)
class ProjectiveRep:
    """
    Unitaries ``elements[g]`` with ``U_g U_h = cocycle[g, h] U_{mult_table[g, h]}``.

    ``residuals`` holds the worst deviations found for the representation
    law, unit modulus, normalization (ω(g,e) = ω(g,g⁻¹) = 1) and
    associativity of the cocycle.
    """

    elements: tuple[np.ndarray, ...] = field(repr=False)
    mult_table: np.ndarray = field(repr=False)
    cocycle: np.ndarray = field(repr=False)
    identity_index: int
    residuals: dict = field(default_factory=dict, compare=False)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def mu_g(self) -> float:
        return self.dim / self.order

    @property
    def mu_G(self) -> float:
        return float(self.dim)

    def inverse(self, g: int) -> int:
        return int(np.flatnonzero(self.mult_table[g] == self.identity_index)[0])


def _cocycle_from_table(elements, table) -> tuple[np.ndarray, float]:
    n, d = len(elements), elements[0].shape[0]
    omega = np.empty((n, n), dtype=complex)
    worst = 0.0
    for g in range(n):
        for h in range(n):
            P = elements[g] @ elements[h]
            k = table[g, h]
            w = np.trace(matcore.dagger(elements[k]) @ P) / d
            w /= abs(w)
            omega[g, h] = w
            worst = max(worst, float(np.max(np.abs(P - w * elements[k]))))
    return omega, worst


def _check_cocycle(omega, table, e) -> dict:
    n = omega.shape[0]
    inv = [int(np.flatnonzero(table[g] == e)[0]) for g in range(n)]
    assoc = 0.0
    for g in range(n):
        for h in range(n):
            gh = table[g, h]
            for l in range(n):
                lhs = omega[gh, l] * omega[g, h]
                rhs = omega[g, table[h, l]] * omega[h, l]
                assoc = max(assoc, abs(lhs - rhs))
    return {
        "modulus": float(np.max(np.abs(np.abs(omega) - 1))),
        "identity": float(np.max(np.abs(omega[:, e] - 1))),
        "inverse": float(max(abs(omega[g, inv[g]] - 1) for g in range(n))),
        "associativity": float(assoc),
    }


def _fix_gauge(elements, table, e) -> list[np.ndarray]:
    """Rephase elements so that U_e = I and U_g U_{g^-1} = I."""
    d = elements[0].shape[0]
    els = [U.copy() for U in elements]
    els[e] = els[e] / (np.trace(els[e]) / d / abs(np.trace(els[e]) / d))
    done = {e}
    for g in range(len(els)):
        if g in done:
            continue
        gi = int(np.flatnonzero(table[g] == e)[0])
        w = np.trace(els[g] @ els[gi]) / d
        w /= abs(w)
        if gi == g:
            els[g] = els[g] / np.sqrt(w)
        else:
            els[gi] = els[gi] / w
        done.update((g, gi))
    return els


def rep_from_table(elements, mult_table, tol: float = REP_TOL) -> ProjectiveRep:
    """
    Build a representation from elements and a known multiplication table.

    Elements are rephased so the cocycle is normalized; the representation
    law and cocycle constraints are then checked at ``tol``.  Duplicate
    elements are allowed here (unlike :func:`validate_rep`).
    """
    els = [matcore.require_unitary(U, tol, f"element {i}") for i, U in enumerate(elements)]
    if len({U.shape for U in els}) != 1:
        raise DimensionMismatch("elements have different dimensions")
    table = np.asarray(mult_table, dtype=int)
    n = len(els)
    if table.shape != (n, n):
        raise ValueError(f"multiplication table has shape {table.shape}, expected {(n, n)}")
    ids = [g for g in range(n) if np.all(table[g] == np.arange(n))]
    if not ids:
        raise NotClosed("multiplication table has no identity")
    e = ids[0]
    if any(not np.any(table[g] == e) for g in range(n)):
        raise NotClosed("some element has no inverse")
    els = _fix_gauge(els, table, e)
    omega, law = _cocycle_from_table(els, table)
    residuals = {"representation": law, **_check_cocycle(omega, table, e)}
    bad = {k: v for k, v in residuals.items() if v > tol}
    if bad:
        raise NotClosed(f"representation constraints violated: {bad}")
    return ProjectiveRep(tuple(els), table, omega, e, residuals)


def validate_rep(elements, tol: float = MATCH_TOL, unitary_tol: float = REP_TOL) -> ProjectiveRep:
    """
    Infer the multiplication table of a finite projective representation.

    Each product U_g U_h must be proportional to exactly one listed element;
    A and B count as proportional when |Tr[A^† B]| = d within d * ``tol``.
    """
    els = [matcore.require_unitary(U, unitary_tol, f"element {i}") for i, U in enumerate(elements)]
    if not els:
        raise ValueError("empty element list")
    d = els[0].shape[0]
    if any(U.shape != (d, d) for U in els):
        raise DimensionMismatch("elements have different dimensions")
    n = len(els)
    stack = np.stack(els)

    def matches(P):
        overlaps = np.abs(np.einsum("kij,ij->k", stack.conj(), P))
        return np.flatnonzero(np.abs(overlaps - d) <= d * tol)

    for g in range(n):
        hits = matches(els[g])
        if len(hits) > 1:
            raise AmbiguousMatch(f"elements {hits.tolist()} are proportional to each other")
    table = np.empty((n, n), dtype=int)
    for g in range(n):
        for h in range(n):
            hits = matches(els[g] @ els[h])
            if len(hits) == 0:
                raise NotClosed(f"product of elements {g} and {h} matches no listed element")
            table[g, h] = hits[0]
    return rep_from_table(els, table, unitary_tol)


def weyl_heisenberg(d: int) -> ProjectiveRep:
    """
    Clock-and-shift unitaries U(m, n) = sum_k e^{2πikm/d} |k><k⊕n|, indexed g = m*d + n.

    Matrices are rephased by :func:`rep_from_table` to normalize the cocycle.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    k = np.arange(d)
    elements = []
    for m in range(d):
        for n in range(d):
            U = np.zeros((d, d), dtype=complex)
            U[k, (k + n) % d] = np.exp(2j * np.pi * k * m / d)
            elements.append(U)
    idx = np.arange(d * d)
    m, n = idx // d, idx % d
    table = ((m[:, None] + m[None, :]) % d) * d + (n[:, None] + n[None, :]) % d
    return rep_from_table(elements, table)


def twirl(rep: ProjectiveRep, O) -> np.ndarray:
    """Group average sum_g mu(g) U_g O U_g^†."""
    O = np.asarray(O, dtype=complex)
    if O.shape != (rep.dim, rep.dim):
        raise DimensionMismatch(f"operator shape {O.shape} vs representation dimension {rep.dim}")
    U = np.stack(rep.elements)
    terms = U @ O @ np.conj(np.transpose(U, (0, 2, 1)))
    return rep.mu_g * terms.sum(axis=0)


def is_irreducible(rep: ProjectiveRep, trials: int = 20, tol: float = IRREP_TOL, seed: int = 0) -> bool:
    """Probabilistic certificate: the twirl sends random Hermitian O to Tr[O] I."""
    rng = np.random.default_rng(seed)
    I = np.eye(rep.dim)
    for _ in range(trials):
        O = matcore.random_hermitian(rep.dim, rng)
        if np.max(np.abs(twirl(rep, O) - np.trace(O) * I)) > tol:
            return False
    return True


def _require_irreducible(rep: ProjectiveRep, certify: bool) -> None:
    if certify and not is_irreducible(rep):
        raise NotIrreducible("representation failed the twirl irreducibility test")


def _check_probe(rep: ProjectiveRep, probe: ProbeState) -> None:
    if probe.dim != rep.dim:
        raise DimensionMismatch(f"probe dimension {probe.dim} vs representation dimension {rep.dim}")


def output_states(rep: ProjectiveRep, probe: ProbeState) -> np.ndarray:
    """Rows are |Psi_g>> = (U_g ⊗ I)|E>> = |U_g E>>."""
    _check_probe(rep, probe)
    return np.stack([matcore.vec(U @ probe.E) for U in rep.elements])


def output_gram(rep: ProjectiveRep, probe: ProbeState) -> np.ndarray:
    psi = output_states(rep, probe)
    return psi.conj() @ psi.T


def output_support_operator(rep: ProjectiveRep, probe: ProbeState) -> np.ndarray:
    """sum_g mu(g) |Psi_g>><<Psi_g|."""
    psi = output_states(rep, probe)
    return rep.mu_g * (psi.T @ psi.conj())


def output_dimension(
    rep: ProjectiveRep,
    probe: ProbeState,
    rel_tol: float = matcore.TOL_DECOMP,
    certify: bool = True,
) -> int:
    """Dimension of the space spanned by the outputs; equals d * rank(E^† E) for an irreducible rep."""
    _require_irreducible(rep, certify)
    direct = matcore.numeric_rank(output_support_operator(rep, probe), rel_tol)
    closed = rep.dim * matcore.numeric_rank(matcore.dagger(probe.E) @ probe.E, rel_tol)
    if direct != closed:
        raise Inconsistent(f"rank of averaged output projector is {direct}, closed form gives {closed}")
    return closed


def holevo_chi(rep: ProjectiveRep, probe: ProbeState, certify: bool = True) -> tuple[float, float]:
    """
    Holevo information (bits) of the equiprobable output ensemble.

    Returns ``(chi_direct, chi_closed)``: the first from the entropy of the
    ensemble average minus the mean output entropy, the second from
    log2 d + S(E^T E^*).
    """
    _require_irreducible(rep, certify)
    psi = output_states(rep, probe)
    rhos = psi[:, :, None] * psi.conj()[:, None, :]
    avg = rhos.mean(axis=0)
    chi_direct = matcore.von_neumann_entropy(avg) - float(
        np.mean([matcore.von_neumann_entropy(r) for r in rhos])
    )
    E = probe.E
    chi_closed = math.log2(rep.mu_G) + matcore.von_neumann_entropy(E.T @ E.conj())
    if abs(chi_direct - chi_closed) > 1e-8:
        raise Inconsistent(f"chi direct {chi_direct!r} vs closed form {chi_closed!r}")
    return chi_direct, chi_closed


def average_overlap(rep: ProjectiveRep, probe: ProbeState, tol: float = matcore.TOL_DECOMP) -> float:
    """
    Average pairwise squared overlap of the outputs, Tr[(E^† E)^2] / (2 mu(G)).

    For |G| <= 64 the defining double group average over the output Gram
    matrix is also evaluated and must agree.
    """
    _check_probe(rep, probe)
    EE = matcore.dagger(probe.E) @ probe.E
    closed = float(np.real(np.trace(EE @ EE))) / (2 * rep.mu_G)
    if rep.order <= DOUBLE_AVERAGE_MAX:
        G = output_gram(rep, probe)
        direct = rep.mu_g**2 * float(np.sum(np.abs(G) ** 2)) / (2 * rep.mu_G**2)
        if abs(direct - closed) > tol:
            raise Inconsistent(f"average overlap {closed!r} vs double average {direct!r}")
    return closed


def covariant_povm(rep: ProjectiveRep, P) -> list[np.ndarray]:
    """Elements mu(g) (U_g ⊗ I) P (U_g^† ⊗ I)."""
    I = np.eye(rep.dim)
    out = []
    for U in rep.elements:
        UI = matcore.kron(U, I)
        out.append(rep.mu_g * UI @ P @ matcore.dagger(UI))
    return out


def check_seed(P, d: int, psd_tol: float = 1e-10, norm_tol: float = 1e-8) -> np.ndarray:
    """Validate a POVM seed: P >= 0 on H⊗H and Tr_1[P] = I."""
    P = np.asarray(P, dtype=complex)
    if P.shape != (d * d, d * d):
        raise InvalidSeed(f"seed shape {P.shape}, expected {(d * d, d * d)}")
    if np.max(np.abs(P - matcore.dagger(P))) > psd_tol:
        raise InvalidSeed("seed is not Hermitian")
    lam_min = np.linalg.eigvalsh((P + matcore.dagger(P)) / 2).min()
    if lam_min < -psd_tol:
        raise InvalidSeed(f"seed has negative eigenvalue {lam_min:.3e}")
    dev = np.max(np.abs(matcore.partial_trace(P, "first") - np.eye(d)))
    if dev > norm_tol:
        raise InvalidSeed(f"Tr_1[P] deviates from identity by {dev:.3e}")
    return P


def random_seed(d: int, rng=None, rank: int | None = None) -> np.ndarray:
    """Random valid seed: a PSD operator rescaled on the second factor so that Tr_1[P] = I."""
    rng = np.random.default_rng(rng)
    k = d * d if rank is None else rank
    A = rng.normal(size=(d * d, k)) + 1j * rng.normal(size=(d * d, k))
    Q = A @ matcore.dagger(A)
    lam, V = np.linalg.eigh(matcore.partial_trace(Q, "first"))
    R = (V / np.sqrt(lam)) @ matcore.dagger(V)
    IR = matcore.kron(np.eye(d), R)
    P = IR @ Q @ matcore.dagger(IR)
    return (P + matcore.dagger(P)) / 2


def saturating_seed(U) -> np.ndarray:
    """P = |U>><<U| for a unitary U."""
    v = matcore.vec(U)
    return np.outer(v, v.conj())


def covariant_likelihood(rep: ProjectiveRep, probe: ProbeState, P) -> float:
    """<<E|P|E>>, the likelihood of the correct outcome (up to mu(g)) under the covariant POVM."""
    _check_probe(rep, probe)
    P = check_seed(P, rep.dim)
    e = probe.vec
    val = np.vdot(e, P @ e)
    if abs(val.imag) > 1e-10:
        raise Inconsistent(f"likelihood has imaginary part {val.imag:.3e}")
    if val.real > rep.dim + 1e-10:
        raise Inconsistent(f"likelihood {val.real!r} exceeds the bound d = {rep.dim}")
    return float(val.real)


@dataclass(frozen=True)
class CovariantReport:
    dim_out: int
    chi_bits: float
    chi_closed_form_bits: float
    omega_avg: float
    likelihood: float | None


def analyze(rep: ProjectiveRep, probe: ProbeState, P=None, rel_tol: float = matcore.TOL_DECOMP) -> CovariantReport:
    _require_irreducible(rep, True)
    chi, chi_closed = holevo_chi(rep, probe, certify=False)
    return CovariantReport(
        dim_out=output_dimension(rep, probe, rel_tol, certify=False),
        chi_bits=chi,
        chi_closed_form_bits=chi_closed,
        omega_avg=average_overlap(rep, probe),
        likelihood=None if P is None else covariant_likelihood(rep, probe, P),
    )
