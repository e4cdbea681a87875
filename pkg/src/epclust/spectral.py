"""Spectra, exceptional-point location and Jordan structure at the EP.

Ranks are decided exactly whenever the matrix lives in Q(sqrt2, sqrt3);
float matrices fall back to singular-value thresholds.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

import mpmath
import numpy as np
import scipy.linalg

from . import linalg
from .errors import (BracketError, ClusterizationError, DegeneracyError, SolverError,
                     SpectralError, StructuralError)
from .exact import ExactScalar, is_exact_number
from .hamiltonians import HamiltonianMatrix, ModelFamily, build_jordan, split_by_coupling_graph

REALITY_TOL = 1e-9
RANK_TOL = linalg.DEFAULT_RANK_TOL
RESIDUAL_TOL = 1e-9


def _entries(H):
    if isinstance(H, HamiltonianMatrix):
        return H.entries
    return np.asarray(H)


def _float(H) -> np.ndarray:
    return linalg.to_float(_entries(H))


def sort_spectrum(values: np.ndarray) -> np.ndarray:
    """Permutation ordering values by real part, then imaginary part."""
    values = np.asarray(values, dtype=complex)
    return np.lexsort((values.imag, values.real))


def min_pairwise_gap(values) -> float:
    v = np.asarray(values, dtype=complex)
    if v.size < 2:
        return float("inf")
    d = np.abs(v[:, None] - v[None, :])
    return float(d[np.triu_indices(v.size, k=1)].min())


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    is_real: bool
    min_gap: float
    max_residual: float

    def to_json(self) -> dict:
        return {
            "eigenvalues": [[float(e.real), float(e.imag)] for e in self.eigenvalues],
            "is_real": self.is_real,
            "min_gap": self.min_gap,
            "max_residual": self.max_residual,
        }


def eigen(H, tol: float = REALITY_TOL) -> SpectralReport:
    """Full eigendecomposition, sorted, with a per-pair residual check."""
    A = _float(H)
    try:
        w, v = scipy.linalg.eig(A)
    except (np.linalg.LinAlgError, ValueError) as err:
        raise SolverError(f"eigensolver failed on {A.shape} matrix: {err}") from err
    order = sort_spectrum(w)
    w, v = w[order], v[:, order]
    v = v / np.linalg.norm(v, axis=0)
    norm = max(np.linalg.norm(A, 2), 1.0)
    residuals = np.linalg.norm(A @ v - v * w, axis=0)
    worst = float(residuals.max()) if residuals.size else 0.0
    if worst > RESIDUAL_TOL * norm:
        raise SolverError(f"eigenpair residual {worst:.3e} exceeds {RESIDUAL_TOL:.0e}*|H|")
    radius = float(np.max(np.abs(w))) if w.size else 0.0
    real = bool(np.all(np.abs(w.imag) <= tol * (1.0 + radius)))
    if real:
        w = w.real.astype(complex)
        # real eigenvalues of a real matrix have real eigenvectors up to phase
        phase = np.exp(-1j * np.angle(v[np.argmax(np.abs(v), axis=0), range(v.shape[1])]))
        v = (v * phase).real
    return SpectralReport(w, v, real, min_pairwise_gap(w), worst)


def find_ep(family: ModelFamily, bracket, tol: float = 1e-9,
            reality_tol: float = REALITY_TOL, scan: int = 16) -> float:
    """Bisect the reality boundary of the spectrum inside ``bracket``.

    The bracket is given in the family's native coupling; the family is
    evaluated past t = 1 by analytic continuation so that the non-real
    side exists.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise BracketError(f"empty bracket [{lo}, {hi}]")

    def real_at(x):
        H = family.at_native(x, backend="float", continuation=True)
        rep = eigen(H, reality_tol)
        scale = max(float(np.linalg.norm(H.to_float(), 2)), 1.0)
        # rounding moves an EP cluster by about eps^(1/n) |H|; re-decide there
        if rep.min_gap > 10 * np.finfo(float).eps ** (1 / H.n) * scale:
            return rep.is_real
        return _is_real_mp(family, family.to_t(x))

    grid = np.linspace(lo, hi, scan + 1)
    flags = [real_at(x) for x in grid]
    if not flags[0]:
        raise BracketError(f"spectrum is not real at the lower end {lo}")
    if flags[-1]:
        raise BracketError(f"spectrum is real on the whole bracket [{lo}, {hi}]")
    first_false = flags.index(False)
    if any(flags[first_false:]):
        raise BracketError("reality predicate is not monotone on the bracket")
    a, b = grid[first_false - 1], grid[first_false]
    while b - a > tol:
        mid = 0.5 * (a + b)
        if real_at(mid):
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def _is_real_mp(family: ModelFamily, t) -> bool:
    dps = 20 + 7 * family.n
    M = family.hamiltonian_mp(t, dps)
    with mpmath.workdps(dps):
        E = mpmath.eig(M, left=False, right=False)
        radius = max(abs(e) for e in E)
        return all(abs(mpmath.im(e)) <= mpmath.mpf(10) ** (-dps // 2) * (1 + radius) for e in E)


def numerical_rank(M, tol: float = RANK_TOL) -> int:
    return linalg.rank(_entries(M), tol)


@dataclass(frozen=True)
class JordanStructure:
    eta: object
    block_sizes: tuple[int, ...]
    rank_filtration: tuple[int, ...]

    @property
    def K(self) -> int:
        return len(self.block_sizes)

    @property
    def N(self) -> int:
        return sum(self.block_sizes)

    def to_json(self) -> dict:
        eta = self.eta
        eta = eta.to_json() if isinstance(eta, ExactScalar) else float(eta)
        return {"eta": eta, "blocks": list(self.block_sizes)}

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _shifted(H, eta):
    A = _entries(H)
    exact = linalg.is_exact_array(A) and is_exact_number(eta)
    n = A.shape[0]
    if exact:
        A = linalg.to_exact(A).copy()
        e = ExactScalar.coerce(eta)
        for i in range(n):
            A[i, i] = A[i, i] - e
        return A, True
    A = linalg.to_float(A).copy()
    A[np.diag_indices(n)] -= float(eta)
    return A, False


def blocks_from_ranks(ranks) -> tuple[int, ...]:
    """Block sizes from r_p = rank((H - eta)^p), p = 0, 1, ..."""
    counts = [ranks[p - 1] - ranks[p] for p in range(1, len(ranks))]
    sizes = []
    for p, c in enumerate(counts, start=1):
        nxt = counts[p] if p < len(counts) else 0
        sizes += [p] * (c - nxt)
    return tuple(sorted(sizes, reverse=True))


def jordan_structure(H, eta, tol: float = RANK_TOL) -> JordanStructure:
    """Block sizes of the eigenvalue ``eta`` from the rank filtration of H - eta."""
    A, exact = _shifted(H, eta)
    n = A.shape[0]
    scale = None if exact else max(np.linalg.norm(A, 2), 1e-300)
    ranks = [n]
    P = linalg.identity(n, exact)
    while True:
        P = linalg.matmul(P, A)
        p = len(ranks)
        r = linalg.rank(P, tol, None if exact else scale ** p)
        if r == ranks[-1]:
            break
        ranks.append(r)
        if r == 0:
            break
    if ranks[-1] != 0:
        raise DegeneracyError(
            f"rank of (H - {eta})^p stalls at {ranks[-1]}; eta is not the only eigenvalue")
    counts = [ranks[p - 1] - ranks[p] for p in range(1, len(ranks))]
    if any(a < b for a, b in zip(counts, counts[1:])):
        raise DegeneracyError(f"rank filtration {ranks} is not a Jordan filtration")
    return JordanStructure(eta, blocks_from_ranks(ranks), tuple(ranks))


@dataclass(frozen=True)
class TransitionMatrix:
    Q: np.ndarray
    jordan: JordanStructure
    residual: float
    det_abs: float

    @property
    def J(self):
        return build_jordan(self.jordan.block_sizes, self.jordan.eta,
                            exact=linalg.is_exact_array(self.Q))


def _normalize(u, exact):
    mags = np.abs(linalg.to_float(u))
    lead = u[int(np.argmax(mags))]
    if exact:
        inv = lead.inverse()
        return np.array([x * inv for x in u], dtype=object)
    return u / lead


def transition_matrix(H, jordan: JordanStructure, tol: float = RANK_TOL) -> TransitionMatrix:
    """Q whose columns are Jordan chains, so that H Q = Q J."""
    A, exact = _shifted(H, jordan.eta)
    n = A.shape[0]
    if jordan.N != n:
        raise StructuralError(f"Jordan data for N={jordan.N} applied to {n}x{n} matrix")
    scale = None if exact else max(np.linalg.norm(A, 2), 1.0)
    sizes = Counter(jordan.block_sizes)

    def rk(M, p=1):
        return linalg.rank(M, tol, None if exact else scale ** p)

    powers = [linalg.identity(n, exact)]
    for _ in range(max(jordan.block_sizes)):
        powers.append(linalg.matmul(powers[-1], A))

    built: list[tuple[int, object]] = []
    for s in sorted(sizes, reverse=True):
        kernel = linalg.nullspace(powers[s], tol, None if exact else scale ** s)
        below = (linalg.nullspace(powers[s - 1], tol, None if exact else scale ** (s - 1))
                 if s > 1 else linalg.zeros((n, 0), exact))
        # level-s vectors of longer chains already chosen
        lifted = [linalg.matmul(powers[L - s], g.reshape(n, 1)) for L, g in built if L > s]
        base = linalg.hstack([below] + lifted, n, exact)
        current = rk(base) if base.shape[1] else 0
        chosen = []
        for k in range(kernel.shape[1]):
            if len(chosen) == sizes[s]:
                break
            u = kernel[:, k]
            trial = linalg.hstack([base] + [c.reshape(n, 1) for c in chosen] + [u.reshape(n, 1)],
                                  n, exact)
            r = rk(trial)
            if r > current:
                chosen.append(_normalize(u, exact))
                current = r
        if len(chosen) != sizes[s]:
            raise StructuralError(
                f"found {len(chosen)} of {sizes[s]} Jordan chains of length {s}")
        built += [(s, u) for u in chosen]

    cols = []
    for s, g in built:
        chain = [linalg.matmul(powers[s - 1 - k], g.reshape(n, 1)) for k in range(s)]
        if not exact:
            # per-chain scaling keeps HQ = QJ; balance column sizes so the
            # absolute residual does not grow like |A|^s
            logs = [np.log(np.max(np.abs(c))) for c in chain]
            chain = [c * np.exp(-np.mean(logs)) for c in chain]
        cols += chain
    Q = linalg.hstack(cols, n, exact)
    residual, det_abs = verify_intertwiner(H, Q, build_jordan(jordan.block_sizes, jordan.eta,
                                                              exact=exact))
    return TransitionMatrix(Q, jordan, residual, det_abs)


def verify_intertwiner(H, Q, J) -> tuple[float, float]:
    """(max |HQ - QJ|, |det Q|)."""
    Hm, Q, J = _entries(H), np.asarray(Q), np.asarray(J)
    n = Hm.shape[0]
    if Q.shape != (n, n) or J.shape != (n, n):
        raise StructuralError(f"shapes H{Hm.shape}, Q{Q.shape}, J{J.shape} do not match")
    exact = all(linalg.is_exact_array(M) for M in (Hm, Q, J))
    if not exact:
        Hm, Q, J = linalg.to_float(Hm), linalg.to_float(Q), linalg.to_float(J)
    R = linalg.matmul(Hm, Q) - linalg.matmul(Q, J)
    return linalg.max_abs(R), abs(float(linalg.determinant(Q)))


@dataclass(frozen=True)
class ClusterAssignment:
    subsets: tuple[tuple[int, ...], ...]
    limit_vectors: np.ndarray
    overlaps: np.ndarray

    @property
    def K(self) -> int:
        return len(self.subsets)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.subsets)


def _ep_null_directions(H_ep, eta, tol) -> np.ndarray:
    cols = []
    n = H_ep.n
    for idx, sub in split_by_coupling_graph(H_ep):
        A, exact = _shifted(sub, eta)
        kern = linalg.to_float(linalg.nullspace(A, tol))
        for k in range(kern.shape[1]):
            v = np.zeros(n)
            v[list(idx)] = kern[:, k]
            cols.append(v / np.linalg.norm(v))
    if not cols:
        raise DegeneracyError(f"H at the EP has no null vectors for eta={eta}")
    return np.column_stack(cols)


def cluster_levels(family: ModelFamily, t_near, tol: float = 1e-6) -> ClusterAssignment:
    """Assign each level at ``t_near`` to the EP eigenvector it overlaps most.

    Level indices are 0-based positions in the ascending spectrum.
    """
    rep = eigen(family.hamiltonian(t_near, backend="float"))
    if not rep.is_real or rep.min_gap <= REALITY_TOL:
        raise SpectralError(f"spectrum at t={t_near} is not real and simple")
    chi = _ep_null_directions(family.hamiltonian(1), family.eta, RANK_TOL)
    psi = rep.eigenvectors / np.linalg.norm(rep.eigenvectors, axis=0)
    overlaps = np.abs(psi.T @ chi)
    groups: list[list[int]] = [[] for _ in range(chi.shape[1])]
    for level, row in enumerate(overlaps):
        order = np.argsort(row)[::-1]
        if row.size > 1 and row[order[0]] - row[order[1]] <= tol:
            raise ClusterizationError(
                f"level {level} overlaps directions {order[0]} and {order[1]} equally",
                candidates=(int(order[0]), int(order[1])))
        groups[int(order[0])].append(level)
    return ClusterAssignment(tuple(tuple(g) for g in groups), chi, overlaps)
