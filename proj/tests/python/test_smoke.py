"""Smoke tests for the compiled extension."""

import math

import numpy as np
import pytest

import simplexdir as sd

TWO_PI = 2.0 * math.pi


def test_arctan_star_round_trip():
    assert sd.arctan_star(1.0, 0.0) == pytest.approx(0.0)
    assert sd.arctan_star(0.0, -1.0) == pytest.approx(1.5 * math.pi)
    rng = np.random.default_rng(1)
    for _ in range(200):
        y = rng.uniform(0.0, TWO_PI)
        r = math.exp(rng.uniform(-2, 2))
        back = sd.arctan_star(r * math.cos(y), r * math.sin(y))
        d = abs(back - y) % TWO_PI
        assert min(d, TWO_PI - d) < 1e-12


def test_von_mises_sampling_and_summary():
    draws = sd.vm_sample(math.pi, 5.0, n=50000, seed=3)
    summ = sd.circular_summary(draws)
    assert abs(summ["mean"] - math.pi) < 0.03
    expected_var = 1.0 - sd.bessel_i_ratio(1, 5.0)
    assert abs(summ["variance"] - expected_var) < 0.02


def test_pn2_density_normalizes():
    grid = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
    dens = np.array([sd.pn2_density(y, np.array([1.5, 0.8]), 0.9) for y in grid])
    assert abs(dens.mean() * TWO_PI - 1.0) < 1e-8


def test_prior_moment_calculators():
    mean, var = sd.svm_prior_moments(0.0, 1.0, 1.0, 5.0)
    assert var == pytest.approx(1.0)
    mean, var = sd.svmp_prior_moments([1.0, 2.0], [4.0, 4.0], [0.5, 0.5])
    assert mean == pytest.approx(1.5)
    lower, upper, f_exp = sd.logistic_product_bounds(0.5, 2.0)
    assert lower <= upper
    assert upper == pytest.approx(f_exp)
    assert sd.logistic_expectation() == 0.5


def test_direction_extraction_round_trip():
    x1 = np.array([0.3, 0.4, 0.3])
    x2 = sd.apply_direction(x1, 1.2, 0.08)
    direction, magnitude = sd.extract_direction(x1, x2)
    assert direction == pytest.approx(1.2, abs=1e-9)
    assert magnitude == pytest.approx(0.08, abs=1e-9)
    o = sd.rotation_matrix(x1)
    assert np.max(np.abs(o.T @ o - np.eye(3))) < 1e-12


def test_gp_conditional_interpolates():
    sim = sd.simulate_scenario("svm", n=20, seed=5)
    locs = sim["locations"]
    vals = np.sin(np.arange(20.0))
    mean, cov = sd.gp_conditional(locs, locs[2:3], vals, omega=0.15, jitter=1e-12)
    assert mean[0] == pytest.approx(vals[2], abs=1e-4)
    assert cov[0, 0] < 1e-6


def test_fit_smoke():
    sim = sd.simulate_scenario("iv", n=60, seed=7)
    summary = sd.fit("iv", sim["locations"], sim["directions"], chains=2, iters=600, seed=9)
    names = {p["name"]: p for p in summary["params"]}
    assert "m" in names and "rho" in names
    assert abs(names["m"]["mean"] - math.pi) < 0.4
    assert summary["diagnostics"]["max_rhat"] < 1.2
