import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given

import _oracles as oracle
from _properties import check_metric, check_metric_degenerates
from conftest import SEEDS
from epclust.errors import SpectralError, StructuralError
from epclust.hamiltonians import Toy7Family, build_tao, build_toy7, tao_family
from epclust.metric import (corridor_sweep, inner_product, intertwining_residual,
                            is_positive_definite, metric_basis, metric_from_left_eigenvectors,
                            sweep_columns, sweep_to_csv, theta_min_eigenvalue)

TOY_PD = [0.5, 1.0, 1.5, 1.9]


@given(SEEDS)
def test_metric_invariants_random(seed):
    check_metric(np.random.default_rng(seed))


@given(SEEDS)
def test_metric_degenerates_random(seed):
    check_metric_degenerates(np.random.default_rng(seed))


def test_two_level_metric():
    m = metric_from_left_eigenvectors(build_tao(2, 1, 0, 0.5, backend="float"))
    assert np.allclose(m.Theta, [[1, -0.5], [-0.5, 1]], atol=1e-14)
    assert m.residual < 1e-14


@pytest.mark.parametrize("g", TOY_PD)
def test_toy_metric_positive(g):
    H = build_toy7(g, backend="float")
    m = metric_from_left_eigenvectors(H)
    ok, lowest = is_positive_definite(m.Theta)
    assert ok and lowest > 0
    A = H.to_float()
    assert m.residual <= 1e-12 * np.linalg.norm(A) * np.linalg.norm(m.Theta)
    assert m.relative_residual < 1e-13


def test_toy_metric_degenerates():
    lows = [theta_min_eigenvalue(build_toy7(g, backend="float")) for g in TOY_PD + [1.99]]
    assert all(b < a for a, b in zip(lows, lows[1:]))
    grid = [2 * (1 - 10.0 ** -k) for k in range(1, 5)]
    lows = [theta_min_eigenvalue(build_toy7(g, backend="float")) for g in grid]
    assert all(b < a for a, b in zip(lows, lows[1:]))
    assert lows[-1] > 0


def test_min_eigenvalue_agrees_with_dense():
    H = build_toy7(1.2, backend="float")
    dense = np.linalg.eigvalsh(metric_from_left_eigenvectors(H).Theta)[0]
    assert theta_min_eigenvalue(H) == pytest.approx(dense, rel=1e-10)


@pytest.mark.parametrize("g", [0.3, 1.0, 1.7])
def test_basis_dimension_toy(g):
    H = build_toy7(g, backend="float")
    assert len(metric_basis(H)) == 7 == oracle.vectorized_metric_dimension(H.to_float())
    for T in metric_basis(H):
        assert np.array_equal(T, T.T)
        assert intertwining_residual(H, T) < 1e-12


def test_weights():
    H = build_tao(3, 1, 0, 0.4, backend="float")
    kappa = [1.0, 2.0, 3.0]
    m = metric_from_left_eigenvectors(H, kappa)
    assert np.array_equal(m.weights, kappa)
    assert is_positive_definite(m.Theta)[0]
    with pytest.raises(StructuralError):
        metric_from_left_eigenvectors(H, [1.0, 2.0])
    with pytest.raises(StructuralError):
        metric_from_left_eigenvectors(H, [1.0, 0.0, 1.0])


def test_no_metric_at_or_past_the_ep():
    with pytest.raises(SpectralError, match="complex"):
        metric_from_left_eigenvectors(build_toy7(2.2, backend="float"))
    with pytest.raises(SpectralError):
        metric_from_left_eigenvectors(build_tao(2, 1, 0, 1, backend="float"))


def test_positive_definite_checks():
    assert is_positive_definite(np.eye(3)) == (True, 1.0)
    assert not is_positive_definite(np.diag([1.0, 0.0]))[0]
    with pytest.raises(StructuralError):
        is_positive_definite(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(StructuralError):
        is_positive_definite(np.ones((2, 3)))


def test_inner_product():
    T = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert inner_product([1, 0], [0, 1], T) == 1.0
    with pytest.raises(StructuralError):
        inner_product([1, 0], [1, 0, 0], T)


def test_sweep_at_zero_coupling():
    (row,) = corridor_sweep(Toy7Family(), [0.0])
    assert row.min_gap == pytest.approx(2)
    assert row.theta_min_eig == pytest.approx(1)
    assert row.is_real and row.error is None


def test_sweep_past_the_ep():
    rows = corridor_sweep(Toy7Family(), [1.0, 2.05])
    assert rows[0].is_real and not rows[1].is_real
    assert math.isnan(rows[1].theta_min_eig) and "complex" in rows[1].error


def test_sweep_monotone_toy():
    rows = corridor_sweep(Toy7Family(), [0.5, 1.0, 1.5, 1.9, 1.99])
    lows = [r.theta_min_eig for r in rows]
    assert all(b < a for a, b in zip(lows, lows[1:]))
    assert [r.t for r in rows] == [0.25, 0.5, 0.75, 0.95, 0.995]


def test_sweep_csv():
    text = sweep_to_csv(corridor_sweep(tao_family(2), [0.0, 0.5]))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == sweep_columns(2) == ["t", "native_coupling", "re_E_1", "re_E_2", "im_E_1",
                                           "im_E_2", "min_gap", "theta_min_eig", "is_real"]
    assert rows[1] == ["0", "0", "-1", "1", "0", "0", "2", "1", "1"]
    assert rows[2][2] == format(-np.sqrt(0.75), ".17g")
    assert text == sweep_to_csv(corridor_sweep(tao_family(2), [0.0, 0.5]))


def test_sweep_grid_must_increase():
    with pytest.raises(StructuralError):
        corridor_sweep(Toy7Family(), [1.0, 0.5])
