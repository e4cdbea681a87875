"""Metric operators Theta with H^T Theta = Theta H, and corridor sweeps."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import EPClustError, SpectralError, StructuralError
from .hamiltonians import HamiltonianMatrix, ModelFamily
from .spectral import REALITY_TOL, eigen, sort_spectrum

BASIS_TOL = 1e-10
PD_TOL = 1e-12


def _float(H) -> np.ndarray:
    if isinstance(H, HamiltonianMatrix):
        return H.to_float()
    return np.asarray(H, dtype=float)


def _sym_coordinates(n: int):
    return [(i, j) for i in range(n) for j in range(i, n)]


def _sym_matrix(n, pairs, coords) -> np.ndarray:
    T = np.zeros((n, n))
    for (i, j), x in zip(pairs, coords):
        T[i, j] = x
        T[j, i] = x
    return T


def metric_basis(H, tol: float = BASIS_TOL) -> list[np.ndarray]:
    """Basis of symmetric solutions of H^T Theta = Theta H.

    The map Theta -> H^T Theta - Theta H is written on the N(N+1)/2
    independent entries of a symmetric Theta and its null space is taken
    with a singular-value cutoff of tol * sigma_max.
    """
    A = _float(H)
    n = A.shape[0]
    pairs = _sym_coordinates(n)
    L = np.empty((n * n, len(pairs)))
    for k, (i, j) in enumerate(pairs):
        E = np.zeros((n, n))
        E[i, j] = E[j, i] = 1.0
        L[:, k] = (A.T @ E - E @ A).ravel()
    _, s, vh = np.linalg.svd(L)
    cutoff = tol * (s[0] if s.size and s[0] > 0 else 1.0)
    r = int(np.sum(s > cutoff))
    return [_sym_matrix(n, pairs, v) for v in vh[r:]]


@dataclass(frozen=True)
class MetricOperator:
    Theta: np.ndarray
    weights: np.ndarray
    residual: float
    condition: float = field(default=math.nan)

    @property
    def relative_residual(self) -> float:
        return self.residual / (np.linalg.norm(self.Theta) or 1.0)


def intertwining_residual(H, Theta) -> float:
    """Frobenius norm of H^T Theta - Theta H."""
    A = _float(H)
    return float(np.linalg.norm(A.T @ Theta - Theta @ A))


def left_eigenvectors(H, tol: float = REALITY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Real eigenvalues (ascending) and unit left eigenvectors as columns.

    Computed as right eigenvectors of H^T, which keeps the eigen-residual
    backward stable even when the eigenbasis is ill-conditioned.
    """
    A = _float(H)
    rep = eigen(A, tol)
    if not rep.is_real:
        raise SpectralError("spectrum is complex; no positive metric exists")
    if rep.min_gap <= tol * (1.0 + float(np.max(np.abs(rep.eigenvalues)))):
        raise SpectralError(f"spectrum is degenerate (min gap {rep.min_gap:.3e})")
    w, L = scipy.linalg.eig(A.T)
    order = sort_spectrum(w)
    w, L = w[order].real, L[:, order]
    lead = L[np.argmax(np.abs(L), axis=0), range(L.shape[1])]
    L = (L * np.exp(-1j * np.angle(lead))).real
    return w, L / np.linalg.norm(L, axis=0)


def metric_from_left_eigenvectors(H, kappa=None) -> MetricOperator:
    """Theta = sum_n kappa_n L_n L_n^T over unit left eigenvectors L_n."""
    A = _float(H)
    n = A.shape[0]
    kappa = np.ones(n) if kappa is None else np.asarray(kappa, dtype=float)
    if kappa.shape != (n,):
        raise StructuralError(f"need {n} weights, got shape {kappa.shape}")
    if np.any(kappa <= 0):
        raise StructuralError("weights kappa must be positive")
    _, L = left_eigenvectors(A)
    Theta = (L * kappa) @ L.T
    Theta = 0.5 * (Theta + Theta.T)
    return MetricOperator(Theta, kappa, intertwining_residual(A, Theta), float(np.linalg.cond(L)))


def theta_min_eigenvalue(H, kappa=None) -> float:
    """Lowest eigenvalue of the canonical Theta, as sigma_min(L sqrt(kappa))^2.

    Working on the factor keeps values far below eps*|Theta| resolvable,
    which matters close to the EP.
    """
    A = _float(H)
    kappa = np.ones(A.shape[0]) if kappa is None else np.asarray(kappa, dtype=float)
    _, L = left_eigenvectors(A)
    return float(np.linalg.svd(L * np.sqrt(kappa), compute_uv=False)[-1] ** 2)


def is_positive_definite(Theta, tol: float = PD_TOL) -> tuple[bool, float]:
    T = np.asarray(Theta, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise StructuralError(f"Theta must be square, got {T.shape}")
    scale = float(np.linalg.norm(T, 2)) if T.size else 0.0
    if np.max(np.abs(T - T.T), initial=0.0) > 1e-12 * max(scale, 1.0):
        raise StructuralError("Theta is not symmetric")
    lowest = float(np.linalg.eigvalsh(T)[0])
    return lowest > tol * scale, lowest


def inner_product(psi1, psi2, Theta) -> float:
    """<psi1|Theta|psi2>."""
    a, b = np.asarray(psi1), np.asarray(psi2)
    T = np.asarray(Theta)
    if a.shape != b.shape or T.shape != (a.size, a.size):
        raise StructuralError(
            f"dimension mismatch: psi1{a.shape}, psi2{b.shape}, Theta{T.shape}")
    return float(np.real(a @ T @ b))


@dataclass(frozen=True)
class SweepRow:
    t: float
    native_coupling: float
    eigenvalues: np.ndarray
    min_gap: float
    theta_min_eig: float
    is_real: bool
    error: str | None = None


def corridor_sweep(family: ModelFamily, grid, kappa=None) -> list[SweepRow]:
    """Spectrum and metric indicators along ``grid`` (native couplings).

    Points past the EP are evaluated by analytic continuation; failures
    are recorded on the row instead of aborting.
    """
    values = [float(x) for x in grid]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise StructuralError("sweep grid must be strictly increasing")
    rows = []
    for x in values:
        t = float(family.to_t(x))
        H = family.hamiltonian(t, backend="float", continuation=True)
        rep = eigen(H)
        theta_min, err = math.nan, None
        try:
            metric_from_left_eigenvectors(H, kappa)
            theta_min = theta_min_eigenvalue(H, kappa)
        except EPClustError as exc:
            err = str(exc)
        rows.append(SweepRow(t, x, rep.eigenvalues, rep.min_gap, theta_min, rep.is_real, err))
    return rows


def sweep_columns(n: int) -> list[str]:
    return (["t", "native_coupling"] + [f"re_E_{i}" for i in range(1, n + 1)]
            + [f"im_E_{i}" for i in range(1, n + 1)] + ["min_gap", "theta_min_eig", "is_real"])


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def sweep_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = len(rows[0].eigenvalues) if rows else 0
    w.writerow(sweep_columns(n))
    for r in rows:
        E = np.asarray(r.eigenvalues, dtype=complex)
        w.writerow([_fmt(r.t), _fmt(r.native_coupling)] + [_fmt(e) for e in E.real]
                   + [_fmt(e) for e in E.imag]
                   + [_fmt(r.min_gap), _fmt(r.theta_min_eig), int(r.is_real)])
    return buf.getvalue()
