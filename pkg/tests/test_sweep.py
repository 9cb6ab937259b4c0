import math

import numpy as np
import pytest

from photon_recycler import (GridSpec, SimConfig, boundary_extract, exp_metrics,
                             loss_grid, solve_k, square_metrics)
from photon_recycler.analytic import TWO_LN2
from photon_recycler.sweep import LossGrid
import photon_recycler.sweep as sweep_mod

SQ_CONFIG = SimConfig(dt=5e-4, t_end=2.0)
EXP_CONFIG = SimConfig(dt=5e-4, t_end=40.0)


@pytest.fixture(scope="module")
def square_grid_small():
    return loss_grid("square", GridSpec(0.9, 2.2, 12), SQ_CONFIG)


def grid_step_ratio(axis):
    return axis[1] / axis[0]


def test_square_diagonal_threshold_near_2ln2(square_grid_small):
    g = square_grid_small
    diag = np.diag(g.loss)
    perfect = diag < 1e-6
    first = int(np.argmax(perfect))
    assert perfect[first] and not perfect[:first].any()
    ratio = grid_step_ratio(g.kappa1_axis)
    kappa_first = g.kappa1_axis[first]
    assert TWO_LN2 / ratio <= kappa_first <= TWO_LN2 * ratio


def test_square_boundary_tracks_recapture_bound(square_grid_small):
    g = square_grid_small
    boundary = boundary_extract(g, 1e-6)
    log_step = math.log(grid_step_ratio(g.kappa2_axis))
    for k1, k2b in zip(boundary.kappa1, boundary.kappa2_boundary):
        if math.isnan(k2b):
            continue
        ref = square_metrics(float(k1)).kappa2_min
        assert abs(math.log(k2b) - math.log(ref)) <= 1.5 * log_step


def test_square_loss_monotone_along_axes(square_grid_small):
    g = square_grid_small
    assert np.all(np.diff(g.loss, axis=0) <= 1e-6)
    assert np.all(np.diff(g.loss, axis=1) <= 1e-6)


def test_exp_diagonal_threshold_near_k():
    g = loss_grid("exp_decay", GridSpec(1.0, 1.8, 10), EXP_CONFIG)
    diag = np.diag(g.loss)
    perfect = diag < 1e-6
    first = int(np.argmax(perfect))
    assert perfect[first] and not perfect[:first].any()
    ratio = grid_step_ratio(g.kappa1_axis)
    k = solve_k()
    assert k / ratio <= g.kappa1_axis[first] <= k * ratio


def test_vanishing_second_cap_recovers_single_pass_loss():
    g = loss_grid("exp_decay", GridSpec(2.5, 3.5, 2), EXP_CONFIG,
                  grid2=GridSpec(1e-8, 1e-6, 2))
    for i, k1 in enumerate(g.kappa1_axis):
        ref = 1.0 - exp_metrics(float(k1)).eff_infinity
        for j in range(g.kappa2_axis.size):
            assert g.loss[i, j] == pytest.approx(ref, abs=1e-3)


def test_grid_deterministic_across_parallelism():
    spec = GridSpec(1.2, 2.0, 5)
    a = loss_grid("square", spec, SQ_CONFIG, threads=1)
    b = loss_grid("square", spec, SQ_CONFIG, threads=4)
    np.testing.assert_array_equal(a.loss, b.loss)


def test_thread_cap_from_environment(monkeypatch):
    monkeypatch.setenv(sweep_mod.THREADS_ENV, "1")
    assert sweep_mod._thread_count(8) == 1
    monkeypatch.delenv(sweep_mod.THREADS_ENV)
    assert sweep_mod._thread_count(2) == 2


def test_cell_failure_recorded_as_nan(monkeypatch):
    def boom(*args, **kwargs):
        raise RuntimeError("forced cell failure")

    monkeypatch.setattr(sweep_mod.control, "select_delay_square", boom)
    g = loss_grid("square", GridSpec(1.0, 1.5, 2), SQ_CONFIG, threads=1)
    assert np.isnan(g.loss).all()
    assert len(g.diagnostics) == 4
    assert "forced cell failure" in g.diagnostics[0]


def test_log10_loss_clamped_at_floor():
    grid = LossGrid(np.array([1.0]), np.array([1.0]),
                    np.array([[0.0]]), {}, [])
    assert grid.log10_loss[0, 0] == -12.0


def test_boundary_extract_synthetic_exact_crossing():
    k1 = np.array([1.0, 2.0])
    k2 = np.array([1.0, 2.0, 3.0])
    loss = np.array([[0.9, 0.5, 0.1], [0.9, 0.7, 0.6]])
    grid = LossGrid(k1, k2, loss, {}, [])
    curve = boundary_extract(grid, 0.5)
    # threshold hit exactly at the middle cell, then interpolated in column 1
    assert curve.kappa2_boundary[0] == pytest.approx(2.0 + 0.0 / 0.4, abs=1e-12)
    assert math.isnan(curve.kappa2_boundary[1])
    assert curve.unbounded == [1]


def test_boundary_extract_requires_valid_threshold():
    grid = LossGrid(np.array([1.0]), np.array([1.0]), np.array([[0.5]]), {}, [])
    with pytest.raises(ValueError):
        boundary_extract(grid, 0.0)


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(2.0, 1.0, 10).axis()
    with pytest.raises(ValueError):
        GridSpec(0.5, 1.0, 1).axis()
