"""Randomized invariant checks, one case per call.

Each ``check_*`` takes a numpy Generator, draws one instance and asserts.
The module tests feed them hypothesis-chosen seeds; the acceptance suite
runs each one for a fixed number of seeds under a time budget.
"""
from __future__ import annotations

import contextlib
import io
from fractions import Fraction

import numpy as np
import scipy.linalg

import _oracles as oracle
from epclust import (ExactScalar, Toy7Family, build_from_decomposition, build_jordan, build_tao,
                     eigen, enumerate_decompositions, jordan_structure,
                     metric_basis, metric_from_left_eigenvectors, split_by_coupling_graph,
                     transition_matrix, verify_intertwiner)
from epclust.cli import main as cli_main
from epclust.cli import parse_decomposition_label
from epclust.hamiltonians import ModelFamily, build_toy7
from epclust.metric import inner_product, intertwining_residual, theta_min_eigenvalue
from epclust.symbols import count_even, count_odd, count_scenarios


def _rational(rng, lo=-9, hi=9, max_den=6):
    return Fraction(int(rng.integers(lo, hi + 1)), int(rng.integers(1, max_den + 1)))


def _scalar(rng):
    return ExactScalar(*(_rational(rng) for _ in range(4)))


def _decomposition(rng, n_max=8):
    N = int(rng.integers(2, n_max + 1))
    decs = enumerate_decompositions(N)
    return decs[int(rng.integers(len(decs)))]


def _partition(rng, n_max=8):
    left = int(rng.integers(1, n_max + 1))
    parts = []
    while left:
        p = int(rng.integers(1, left + 1))
        parts.append(p)
        left -= p
    return sorted(parts, reverse=True)


def _family(rng, n_max=8):
    if rng.random() < 0.25:
        return Toy7Family()
    return ModelFamily(_decomposition(rng, n_max), int(rng.integers(-3, 4)))


# --- exact arithmetic ------------------------------------------------------------

def check_exact_field(rng):
    a, b, c = _scalar(rng), _scalar(rng), _scalar(rng)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    if a:
        assert a * a.inverse() == 1
    assert abs(float(a * b) - float(a) * float(b)) <= 1e-9 * (1 + abs(float(a) * float(b)))


# --- symbols ---------------------------------------------------------------------

def check_decompositions(rng):
    N = int(rng.integers(2, 15))
    decs = enumerate_decompositions(N)
    target = sorted(oracle.diagonal_set(N))
    for d in decs:
        values = sorted(int(x) for b in d.components for x in b.diagonal())
        assert values == target
        assert d.K <= N / 2
        assert parse_decomposition_label(d.label, N) == d
    assert enumerate_decompositions(N) == decs


def check_half_counts(rng):
    J = int(rng.integers(1, 9))
    assert count_even(J) == count_scenarios(2 * J)
    assert count_odd(J) == count_scenarios(2 * J + 1)


# --- hamiltonians ----------------------------------------------------------------

def check_builder_structure(rng):
    dec = _decomposition(rng)
    eta = _rational(rng)
    t = Fraction(int(rng.integers(0, 11)), 10)
    H = build_from_decomposition(dec, eta, t)
    A = H.to_float()
    assert np.array_equal(A + A.T, 2 * np.diag(np.diag(A)))
    H0 = build_from_decomposition(dec, eta, 0)
    diag = [H0.entries[i, i] for i in range(H0.n)]
    want = [eta + d for d in oracle.diagonal_set(dec.total_dimension)]
    if H0.is_exact:
        assert diag == want
    else:
        assert np.allclose(np.array(diag, float), np.array(want, float), rtol=1e-15, atol=0)
    parts = split_by_coupling_graph(build_from_decomposition(dec, eta, 1))
    by_index = {tuple(p): b for p, b in zip(dec.positions(), dec.components)}
    assert {idx for idx, _ in parts} == set(by_index)
    for idx, sub in parts:
        b = by_index[idx]
        assert sub == build_tao(b.length, b.scale, eta, 1, backend=sub.backend)


def check_tao_spectrum(rng):
    n = int(rng.integers(2, 11))
    c = int(rng.choice([1, 2, 3]))
    eta = float(rng.integers(-3, 4))
    t = float(rng.choice([0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.99]))
    H = build_tao(n, c, eta, t, backend="float")
    got = eigen(H).eigenvalues
    want = np.sort(oracle.tao_spectrum(n, c, eta, t).real)
    # first-order bound: eigenvalue condition number times backward error
    w, vl, vr = scipy.linalg.eig(H.to_float(), left=True, right=True)
    cond = (1 / np.abs(np.sum(vl.conj() * vr, axis=0)))[np.argsort(w.real)]
    tol = 100 * cond * np.finfo(float).eps * np.linalg.norm(H.to_float(), 2)
    assert np.all(np.abs(got - want) <= tol)


# --- spectral --------------------------------------------------------------------

def check_jordan_roundtrip(rng):
    sizes = _partition(rng)
    eta = _rational(rng)
    exact = bool(rng.random() < 0.5)
    J = build_jordan(sizes, eta if exact else float(eta), exact=exact)
    js = jordan_structure(J, eta if exact else float(eta))
    assert js.block_sizes == tuple(sizes)


def check_ep_structure(rng):
    dec = _decomposition(rng)
    eta = int(rng.integers(-3, 4))
    backend = str(rng.choice(["auto", "float"]))
    H = build_from_decomposition(dec, eta, 1, backend=backend)
    js = jordan_structure(H, eta if H.is_exact else float(eta))
    assert js.K == dec.K
    assert js.block_sizes == tuple(sorted(dec.partition, reverse=True))
    tm = transition_matrix(H, js)
    if H.is_exact:
        assert tm.residual == 0
    else:
        assert tm.residual <= 1e-10
    assert tm.det_abs > 1e-12
    r, d = verify_intertwiner(H, tm.Q, tm.J)
    assert r == tm.residual and d == tm.det_abs


def check_min_gap_monotone(rng):
    fam = _family(rng)
    ts = np.sort(rng.uniform(0, 1, size=6))
    gaps = [eigen(fam.hamiltonian(float(t), backend="float")).min_gap for t in ts]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def check_conjugate_pairs(rng):
    g = float(rng.uniform(2.0001, 4.0))
    H = build_toy7(g, backend="float")
    rep = eigen(H)
    E = rep.eigenvalues
    assert not rep.is_real
    assert np.allclose(np.sort_complex(E), np.sort_complex(E.conj()), atol=1e-9)
    assert abs(E.sum() - np.trace(H.to_float())) <= 1e-9 * 49


# --- metric ----------------------------------------------------------------------

def check_metric(rng):
    fam = _family(rng)
    t = float(rng.uniform(0.05, 0.9))
    H = fam.hamiltonian(t, backend="float")
    A = H.to_float()
    n = H.n
    kappa = rng.uniform(0.5, 2.0, size=n) if rng.random() < 0.5 else None
    m = metric_from_left_eigenvectors(H, kappa)
    T = m.Theta
    assert np.array_equal(T, T.T)
    bound = 1e-12 * np.linalg.norm(A) * np.linalg.norm(T)
    assert intertwining_residual(H, T) <= bound
    basis = metric_basis(H)
    assert len(basis) == n == oracle.vectorized_metric_dimension(A)
    B = np.column_stack([b.ravel() for b in basis])
    coef, *_ = np.linalg.lstsq(B, T.ravel(), rcond=None)
    assert np.linalg.norm(B @ coef - T.ravel()) <= 1e-8 * np.linalg.norm(T)
    psi = eigen(H).eigenvectors
    for i in range(n):
        for j in range(i + 1, n):
            ip = inner_product(psi[:, i], psi[:, j], T)
            norm = np.sqrt(inner_product(psi[:, i], psi[:, i], T)
                           * inner_product(psi[:, j], psi[:, j], T))
            assert abs(ip) <= 1e-8 * norm


def check_metric_degenerates(rng):
    fam = _family(rng, n_max=6)
    lows = []
    for k in range(1, 5):
        H = fam.hamiltonian(1 - 10.0 ** -k, backend="float")
        lows.append(theta_min_eigenvalue(H))
    assert all(b < a for a, b in zip(lows, lows[1:])), lows


# --- cli -------------------------------------------------------------------------

def check_cli_stable(rng):
    dec = _decomposition(rng, n_max=7)
    t = Fraction(int(rng.integers(0, 10)), 10)
    argv = [str(rng.choice(["build", "spectrum", "metric"])), "--decomposition", dec.label,
            "--t", str(t)]
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = cli_main(argv)
        outs.append((code, buf.getvalue()))
    assert outs[0] == outs[1]
    assert outs[0][0] == 0


PROPERTIES = {
    "exact field arithmetic": check_exact_field,
    "decomposition invariants": check_decompositions,
    "half-representation counts": check_half_counts,
    "builder structure": check_builder_structure,
    "tao spectrum": check_tao_spectrum,
    "jordan round trip": check_jordan_roundtrip,
    "EP block structure and Q": check_ep_structure,
    "min gap monotone": check_min_gap_monotone,
    "conjugate pairs past the EP": check_conjugate_pairs,
    "metric invariants": check_metric,
    "metric degenerates toward EP": check_metric_degenerates,
    "cli byte stability": check_cli_stable,
}
