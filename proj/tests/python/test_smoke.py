"""Smoke tests for the python module: a few frozen values per subsystem."""

import math

import pytest

import stripwave as sw


def test_parameters():
    assert sw.mu_from(0.1, math.exp(-10)) == pytest.approx(1.0, rel=1e-14)
    assert sw.eta_from(0.5, 0.5) == pytest.approx(math.exp(-4), rel=1e-14)
    tag, indicator = sw.classify_regime(0.1, math.exp(-100))
    assert tag == "neumann"
    assert indicator == pytest.approx(-10.0)
    assert sw.zeta_odd(1) == pytest.approx(1.2020569031595943, rel=1e-13)


def test_layers():
    assert sw.strip_layer(math.pi / 2, 0.0) == pytest.approx(math.log(2), rel=1e-14)
    assert sw.window_layer(0.0, 1.0) == pytest.approx(math.log(1 + math.sqrt(2)), rel=1e-14)
    assert sw.window_layer(0.5, 0.0) == 0.0
    assert sw.theta(0.0) == pytest.approx(-sw.zeta_odd(1) / 8, abs=1e-11)
    assert sw.theta(1.0) == pytest.approx(sw.theta_taylor(1.0, 30), abs=1e-10)
    assert sw.z_at_origin(1.0) == pytest.approx(sw.theta(1.0), abs=1e-10)
    assert sw.cutoff(0.5) == 1.0 and sw.cutoff(2.0) == 0.0


def test_homogenized():
    assert sw.lambda_n(0.0, 1) == 0.25
    assert sw.lambda_n(0.1, 1) == pytest.approx(0.309788, abs=1e-5)
    assert sw.lambda_n_taylor(0.1, 1) == pytest.approx(0.25 + 0.2 / math.pi, rel=1e-14)
    assert sw.green_kernel(0.0, 1.0, 0.0) == pytest.approx(math.pi - 1.0, rel=1e-14)
    grid = [math.pi * i / 100 for i in range(101)]
    u = sw.apply_inverse(grid, [1.0] * 101, 0.0)
    assert u[0] == pytest.approx(math.pi**2 / 2, rel=1e-8)


def test_band():
    assert sw.bottom_eigenvalue(0.3, 0.0) == 0.25
    assert sw.bottom_coefficient_closed(4, 0.2) == 0.0
    ex = sw.bottom_series(0.2, 8)
    assert abs(ex["a"][1]) <= 1e-10 and abs(ex["a"][4]) <= 1e-10
    assert ex["K"][3] == pytest.approx(sw.bottom_coefficient_closed(3, 0.2), rel=1e-8)
    assert sw.band_value(1, 0.5, 0.1, 0.0) == pytest.approx(25.25, rel=1e-13)


def test_corrector():
    assert sw.corrector_value(0.0, 0.0, 0.2, 1e-6) == -1.0
    rep = sw.corrector_verify(0.2, 1e-6)
    assert rep["dirichlet_residual"] <= 1e-12
    assert rep["neumann_residual"] <= 1e-10
    assert 0.45 <= rep["junction_exponent"] <= 0.55


def test_cell_solver():
    out = sw.cell_eigenvalues(0.1, full_dirichlet=True, levels=3)
    assert out["shifted"][0] == pytest.approx(1.0, abs=1e-3)
    out = sw.cell_eigenvalues(0.1, neumann_bottom=True, levels=3)
    assert out["shifted"][0] == pytest.approx(0.25, abs=1e-3)
    out = sw.cell_eigenvalues(0.2, ln_eta=math.log(1e-6), levels=2)
    lam1 = sw.lambda_n(out["mu_effective"], 1)
    assert out["bracket_ok"]
    assert out["shifted"][0] == pytest.approx(lam1, abs=5e-3)
