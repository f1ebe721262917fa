"""
Discrimination of two unitaries U1, U2 through the eigenphases of W = U2^† U1.

For a local probe |psi>, the overlap <psi|W|psi> = sum_j |psi_j|^2 e^{i gamma_j}
ranges over the convex polygon K spanned by the eigenvalues of W.  Its
distance r from the origin fixes the minimum error probability
``P_E = (1 - sqrt(1 - r^2)) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import matcore
from .errors import DimensionMismatch, Inconsistent, NotNormalized, OutOfRange

TWO_PI = 2 * math.pi
MERGE_TOL = 1e-9
ANGLE_TOL = 1e-12
NCOPY_TOL = 1e-9
DIRECT_PHASE_CAP = 256


@dataclass(frozen=True)
class PhaseSet:
    """Distinct eigenphases in [0, 2π), ascending, with multiplicities."""

    phases: tuple[float, ...]
    multiplicities: tuple[int, ...]

    @property
    def dim(self) -> int:
        return sum(self.multiplicities)


@dataclass(frozen=True)
class PolygonK:
    vertices: tuple[complex, ...]
    spread: float
    contains_origin: bool
    r: float
    closest_point: complex


@dataclass(frozen=True)
class DiscriminationReport:
    delta: float
    r: float
    p_error: float
    probe: np.ndarray = field(repr=False)
    weights: tuple[float, ...]
    phases: PhaseSet
    closest_point: complex
    n_bar: int | None
    exact: bool


@dataclass(frozen=True)
class SweepRow:
    n: int
    delta_closed: float
    delta_direct: float | None
    r: float
    p_error: float


def _phase_clusters(eigenvalues, merge_tol: float = MERGE_TOL) -> tuple[PhaseSet, np.ndarray]:
    """Merge eigenphases within ``merge_tol`` (circularly).

    Returns the phase set and, for each input eigenvalue, the index of the
    phase it was merged into.  A merged phase takes the value of its
    smallest member.
    """
    gamma = np.mod(np.angle(np.asarray(eigenvalues, dtype=complex)), TWO_PI)
    gamma[gamma >= TWO_PI] = 0.0
    order = np.argsort(gamma, kind="stable")
    labels = np.empty(len(gamma), dtype=int)
    phases: list[float] = []
    counts: list[int] = []
    prev = None
    for idx in order:
        g = gamma[idx]
        if prev is None or g - prev > merge_tol:
            phases.append(float(g))
            counts.append(0)
        labels[idx] = len(phases) - 1
        counts[-1] += 1
        prev = g
    # wrap-around: last cluster sits just below 2π, next to the first one
    if len(phases) > 1 and (phases[0] + TWO_PI) - gamma[order[-1]] <= merge_tol:
        last = len(phases) - 1
        counts[0] += counts.pop()
        phases.pop()
        labels[labels == last] = 0
    return PhaseSet(tuple(phases), tuple(counts)), labels


def phase_set(W, merge_tol: float = MERGE_TOL, tol: float = matcore.TOL_DECOMP) -> PhaseSet:
    """Eigenphases of a single unitary ``W``."""
    es = matcore.eig_unitary(W, tol)
    return _phase_clusters(es.eigenvalues, merge_tol)[0]


def _relative_unitary(U1, U2, tol: float) -> np.ndarray:
    U1 = matcore.require_unitary(U1, tol, "U1")
    U2 = matcore.require_unitary(U2, tol, "U2")
    if U1.shape != U2.shape:
        raise DimensionMismatch(f"U1 is {U1.shape[0]}-dimensional, U2 is {U2.shape[0]}-dimensional")
    return matcore.dagger(U2) @ U1


def relative_phases(
    U1, U2, merge_tol: float = MERGE_TOL, tol: float = matcore.TOL_DECOMP
) -> PhaseSet:
    """Eigenphases of U2^† U1, merged and sorted."""
    return phase_set(_relative_unitary(U1, U2, tol), merge_tol, tol)


def spread(ps: PhaseSet) -> float:
    """Length of the shortest arc containing every phase: 2π minus the largest circular gap."""
    g = np.asarray(ps.phases, dtype=float)
    if g.size == 0:
        raise ValueError("empty phase set")
    if g.size == 1:
        return 0.0
    gaps = np.diff(np.append(g, g[0] + TWO_PI))
    return float(TWO_PI - gaps.max())


def _closest_on_segment(a: complex, b: complex) -> tuple[complex, float]:
    """Point of segment [a, b] nearest the origin, with its parameter t (a + t(b-a))."""
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0:
        return a, 0.0
    t = -(a.real * ab.real + a.imag * ab.imag) / denom
    t = min(max(t, 0.0), 1.0)
    return a + t * ab, t


def _edges(n: int) -> list[tuple[int, int]]:
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    return [(i, (i + 1) % n) for i in range(n)]


def polygon(ps: PhaseSet, angle_tol: float = ANGLE_TOL) -> PolygonK:
    """
    Geometry of the overlap polygon K.

    Vertices on the unit circle in phase order are in convex position, so the
    hull edges join circularly consecutive vertices.  ``r`` is the exact
    distance from 0 to K, minimized over all edges and vertices.  A spread of
    π (origin on an edge) counts as containment.
    """
    verts = tuple(complex(np.exp(1j * g)) for g in ps.phases)
    delta = spread(ps)
    if delta >= math.pi - angle_tol:
        return PolygonK(verts, delta, True, 0.0, 0j)
    best, best_d = verts[0], abs(verts[0])
    for i, j in _edges(len(verts)):
        p, _ = _closest_on_segment(verts[i], verts[j])
        if abs(p) < best_d:
            best, best_d = p, abs(p)
    return PolygonK(verts, delta, False, float(best_d), complex(best))


def _convex_weights(K: PolygonK) -> np.ndarray:
    """Convex weights over the vertices of K reproducing its closest point."""
    v = np.asarray(K.vertices)
    n = len(v)
    w = np.zeros(n)
    if n == 1:
        w[0] = 1.0
        return w
    if not K.contains_origin or n == 2:
        best = None
        for i, j in _edges(n):
            p, t = _closest_on_segment(v[i], v[j])
            if best is None or abs(p) < best[0] - 1e-15:
                best = (abs(p), i, j, t)
        _, i, j, t = best
        w[i] += 1 - t
        w[j] += t
        return w
    # origin inside: fan triangulation from vertex 0, barycentric coordinates
    best_bc, best_tri = None, None
    for i in range(1, n - 1):
        tri = (0, i, i + 1)
        A = np.array([[v[k].real for k in tri], [v[k].imag for k in tri], [1.0, 1.0, 1.0]])
        bc = np.linalg.solve(A, np.array([0.0, 0.0, 1.0]))
        if best_bc is None or bc.min() > best_bc.min():
            best_bc, best_tri = bc, tri
    bc = np.clip(best_bc, 0.0, None)
    bc /= bc.sum()
    for k, b in zip(best_tri, bc):
        w[k] += b
    return w


def p_error_from_overlap(z_abs: float, tol: float = matcore.TOL_ALG) -> float:
    """Minimum error probability for two equiprobable pure states with overlap modulus ``z_abs``."""
    if not (-tol <= z_abs <= 1 + tol) or math.isnan(z_abs):
        raise OutOfRange(f"overlap modulus {z_abs} outside [0, 1]")
    z = min(max(z_abs, 0.0), 1.0)
    return 0.5 * (1.0 - math.sqrt(1.0 - z * z))


def n_bar_from_spread(delta: float, angle_tol: float = ANGLE_TOL) -> int | None:
    """Smallest N with min(NΔ, 2π) >= π, or None when Δ = 0."""
    if delta >= math.pi - angle_tol:
        return 1
    if delta <= 0:
        return None
    n = max(1, math.ceil(math.pi / delta) - 1)
    while n * delta < math.pi - angle_tol:
        n += 1
    return n


def optimal_probe(
    U1,
    U2,
    merge_tol: float = MERGE_TOL,
    tol: float = matcore.TOL_DECOMP,
    angle_tol: float = ANGLE_TOL,
) -> tuple[np.ndarray, DiscriminationReport]:
    """
    Optimal local probe for telling U1 from U2 apart, with the resulting report.

    The probe is ``sum_j sqrt(w_j) |j>`` in the eigenbasis of U2^† U1, where
    ``w`` are convex weights placing the overlap at the point of K nearest
    the origin.  For a degenerate eigenphase, all of its weight goes to the
    first eigenvector of the degenerate block; any vector in the block gives
    the same overlap.
    """
    W = _relative_unitary(U1, U2, tol)
    es = matcore.eig_unitary(W, tol)
    ps, labels = _phase_clusters(es.eigenvalues, merge_tol)
    K = polygon(ps, angle_tol)
    w = _convex_weights(K)
    psi = np.zeros(W.shape[0], dtype=complex)
    for k, wk in enumerate(w):
        rep = int(np.flatnonzero(labels == k)[0])
        psi += math.sqrt(wk) * es.eigenvectors[:, rep]
    psi /= np.linalg.norm(psi)
    report = DiscriminationReport(
        delta=K.spread,
        r=K.r,
        p_error=p_error_from_overlap(K.r),
        probe=psi,
        weights=tuple(float(x) for x in w),
        phases=ps,
        closest_point=K.closest_point,
        n_bar=n_bar_from_spread(K.spread, angle_tol),
        exact=K.contains_origin,
    )
    return psi, report


def _helstrom_batch(phi1: np.ndarray, phi2: np.ndarray) -> np.ndarray:
    """P_E = 1/2 - sum|eig(Γ)|/2 with Γ = (|φ1><φ1| - |φ2><φ2|)/2, row-wise over a batch."""
    rho1 = phi1[:, :, None] * phi1.conj()[:, None, :]
    rho2 = phi2[:, :, None] * phi2.conj()[:, None, :]
    gamma = 0.5 * (rho1 - rho2)
    lam = np.linalg.eigvalsh(gamma)
    return 0.5 - 0.5 * np.abs(lam).sum(axis=1)


def helstrom_oracle(phi1, phi2, tol: float = matcore.TOL_DECOMP) -> float:
    """
    Minimum error probability between two equiprobable pure states, from the
    trace norm of the weighted difference of their density matrices.
    """
    phi1 = np.asarray(phi1, dtype=complex).reshape(-1)
    phi2 = np.asarray(phi2, dtype=complex).reshape(-1)
    if phi1.shape != phi2.shape:
        raise DimensionMismatch(f"state lengths {phi1.size} and {phi2.size}")
    for name, phi in (("phi1", phi1), ("phi2", phi2)):
        if abs(np.linalg.norm(phi) - 1) > tol:
            raise NotNormalized(f"{name} has norm {np.linalg.norm(phi):.12g}")
    return float(_helstrom_batch(phi1[None], phi2[None])[0])


def _probe_grid(d: int, n_samples: int, seed: int) -> np.ndarray:
    if d == 2:
        m = int(math.ceil(math.sqrt(n_samples)))
        theta, phi = np.meshgrid(np.linspace(0, math.pi, m), np.linspace(0, TWO_PI, m, endpoint=False))
        theta, phi = theta.ravel(), phi.ravel()
        return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n_samples, d)) + 1j * rng.normal(size=(n_samples, d))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def grid_search_oracle(
    U1,
    U2,
    n_samples: int = 10_000,
    seed: int = 0,
    refine: int = 0,
) -> tuple[float, np.ndarray]:
    """
    Brute-force minimum of the Helstrom error over probe states.

    Qubits use a regular Bloch-sphere grid; larger dimensions use
    ``n_samples`` Haar-random states drawn from ``seed``.  With ``refine > 0``
    the best ``refine`` grid points seed a Nelder-Mead polish.  Nothing here
    touches the eigenphase route.
    """
    U1 = matcore.as_matrix(U1)
    U2 = matcore.as_matrix(U2)
    d = U1.shape[0]
    psis = _probe_grid(d, n_samples, seed)
    pe = _helstrom_batch(psis @ U1.T, psis @ U2.T)
    i_best = int(np.argmin(pe))
    best_pe, best_psi = float(pe[i_best]), psis[i_best]
    if refine > 0:

        def objective(x):
            psi = x[:d] + 1j * x[d:]
            psi = psi / np.linalg.norm(psi)
            return float(_helstrom_batch((U1 @ psi)[None], (U2 @ psi)[None])[0])

        for i in np.argsort(pe)[:refine]:
            x0 = np.concatenate([psis[i].real, psis[i].imag])
            res = minimize(objective, x0, method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20_000})
            if res.fun < best_pe:
                psi = res.x[:d] + 1j * res.x[d:]
                best_pe, best_psi = float(res.fun), psi / np.linalg.norm(psi)
    return best_pe, best_psi


def entanglement_invariance_check(
    U1, U2, merge_tol: float = MERGE_TOL, tol: float = matcore.TOL_DECOMP
) -> tuple[float, float]:
    """r for W = U2^† U1 and for W ⊗ I, the latter built explicitly."""
    W = _relative_unitary(U1, U2, tol)
    r_local = polygon(phase_set(W, merge_tol, tol)).r
    WI = matcore.kron(W, np.eye(W.shape[0]))
    r_ext = polygon(phase_set(WI, merge_tol, tol)).r
    if abs(r_local - r_ext) > matcore.TOL_DECOMP:
        raise Inconsistent(f"r(W)={r_local!r} but r(W⊗I)={r_ext!r}")
    return r_local, r_ext


def tensor_power(M, n: int) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for _ in range(n):
        out = matcore.kron(out, M)
    return out


def _tensor_power_phases(gamma: np.ndarray, n: int) -> np.ndarray:
    sums = np.zeros(1)
    for _ in range(n):
        sums = np.add.outer(sums, gamma).ravel()
    return sums


def n_copies_analysis(
    U1,
    U2,
    n_max: int,
    merge_tol: float = MERGE_TOL,
    tol: float = matcore.TOL_DECOMP,
    direct_cap: int = DIRECT_PHASE_CAP,
    consistency_tol: float = NCOPY_TOL,
) -> tuple[int | None, list[SweepRow]]:
    """
    Spread, overlap distance and error probability for N = 1..n_max parallel uses.

    The closed form min(NΔ, 2π) is checked against a direct enumeration of
    the tensor-power eigenphases whenever d**N <= ``direct_cap``.  The two
    coincide for NΔ < π.  Past that point the wrapped spread of the
    tensor-power phases can fall short of min(NΔ, 2π) (e.g. Δ = π/3, N = 6
    gives 5π/3), but both stay >= π, so only the exactness verdict is
    compared there.

    Returns ``(n_bar, rows)``; ``n_bar`` is None when Δ = 0.
    """
    if n_max < 1:
        raise ValueError("n_max must be positive")
    W = _relative_unitary(U1, U2, tol)
    d = W.shape[0]
    es = matcore.eig_unitary(W, tol)
    base, _ = _phase_clusters(es.eigenvalues, merge_tol)
    delta = spread(base)
    gamma = np.angle(es.eigenvalues)
    rows = []
    for n in range(1, n_max + 1):
        closed = min(n * delta, TWO_PI)
        direct = None
        if d**n <= direct_cap:
            ps_n, _ = _phase_clusters(np.exp(1j * _tensor_power_phases(gamma, n)), merge_tol)
            K = polygon(ps_n)
            direct = K.spread
            r = K.r
            if closed < math.pi and abs(direct - closed) > consistency_tol:
                raise Inconsistent(f"N={n}: direct spread {direct!r} vs closed form {closed!r}")
            if abs(closed - math.pi) > consistency_tol and (direct >= math.pi - ANGLE_TOL) != (
                closed >= math.pi - ANGLE_TOL
            ):
                raise Inconsistent(f"N={n}: exactness verdict differs (direct {direct!r}, closed {closed!r})")
        else:
            r = 0.0 if closed >= math.pi - ANGLE_TOL else math.cos(closed / 2)
        rows.append(SweepRow(n, closed, direct, r, p_error_from_overlap(r)))
    return n_bar_from_spread(delta), rows


def sweep_csv(rows: list[SweepRow], fmt=lambda x: f"{x:.12g}") -> str:
    lines = ["N,delta_N,r_N,p_error_N,delta_direct_N"]
    for row in rows:
        direct = "" if row.delta_direct is None else fmt(row.delta_direct)
        lines.append(f"{row.n},{fmt(row.delta_closed)},{fmt(row.r)},{fmt(row.p_error)},{direct}")
    return "\n".join(lines) + "\n"

