"""Norms and the weighted energy against closed forms on single cosines.

A unit cosine on the 2*pi box has L-infinity 1, L2 sqrt(V/2), L1 4*(2pi)^2,
which pins the quadrature weights and the spectral weightings at once.
"""

import numpy as np
import pytest

from viscowave.fields import SpectralTensorField, SpectralVectorField, to_spectral
from viscowave.grid import Grid
from viscowave.norms import (
    besov_norm,
    derivative_norm,
    energy_cross_bound,
    energy_functional,
    fit_decay,
    lp_norm_grid,
    negative_sobolev_norm,
    sobolev_norm,
)

V = (2 * np.pi) ** 3


def _cos2x(grid):
    x = grid.coords[..., 0]
    return to_spectral(grid, np.cos(2 * x))


def test_lp_norms_of_a_unit_cosine():
    g = Grid(16)
    f = _cos2x(g)
    assert lp_norm_grid(f, np.inf) == pytest.approx(1.0, rel=1e-12)
    assert lp_norm_grid(f, 2) == pytest.approx(np.sqrt(V / 2), rel=1e-12)
    # cos^4 is a trig polynomial below Nyquist, so the p=4 sum is exact
    assert lp_norm_grid(f, 4) == pytest.approx((3 * V / 8) ** 0.25, rel=1e-12)


def test_l1_norm_takes_the_modulus():
    # |cos| has kinks, so pin L1 on smooth signed data instead
    g = Grid(16)
    x = g.coords[..., 0]
    f = to_spectral(g, 1.5 + np.cos(2 * x))
    assert lp_norm_grid(f, 1) == pytest.approx(1.5 * V, rel=1e-12)
    neg = to_spectral(g, -(1.5 + np.cos(2 * x)))
    assert lp_norm_grid(neg, 1) == pytest.approx(1.5 * V, rel=1e-12)


def test_lp_norm_rejects_nonpositive_orders():
    g = Grid(8)
    with pytest.raises(ValueError):
        lp_norm_grid(_cos2x(g), 0)


def test_raw_arrays_need_an_explicit_grid():
    g = Grid(8)
    data = np.ones(g.shape)
    assert lp_norm_grid(data, 2, grid=g) == pytest.approx(np.sqrt(V), rel=1e-12)
    with pytest.raises(ValueError):
        lp_norm_grid(data, 2)


def test_derivative_norm_scales_with_the_mode():
    g = Grid(16)
    f = _cos2x(g)
    l2 = lp_norm_grid(f, 2)
    assert derivative_norm(f, 1) == pytest.approx(2 * l2, rel=1e-12)
    assert derivative_norm(f, 2) == pytest.approx(4 * l2, rel=1e-12)
    with pytest.raises(ValueError):
        derivative_norm(f, -1)


def test_sobolev_norm_on_a_single_mode():
    g = Grid(16)
    f = _cos2x(g)
    l2 = lp_norm_grid(f, 2)
    # (1 + 4 + 16)^(1/2) = sqrt(21) for H^2 on the |xi| = 2 shell
    assert sobolev_norm(f, 2) == pytest.approx(np.sqrt(21) * l2, rel=1e-12)


def test_negative_sobolev_norm_on_a_single_mode():
    g = Grid(16)
    f = _cos2x(g)
    l2 = lp_norm_grid(f, 2)
    assert negative_sobolev_norm(f, 1.0) == pytest.approx(l2 / 2, rel=1e-12)
    for s in (-0.1, 1.5):
        with pytest.raises(ValueError):
            negative_sobolev_norm(f, s)


def test_negative_sobolev_norm_drops_the_mean():
    g = Grid(8)
    f = to_spectral(g, np.full(g.shape, 3.0))
    assert negative_sobolev_norm(f, 1.0) == 0.0


def test_besov_norm_on_a_single_shell():
    g = Grid(16)
    x = g.coords[..., 0]
    f = to_spectral(g, np.cos(4 * x))
    l2 = lp_norm_grid(f, 2)
    # |xi| = 4 lives in dyadic shell l = 2, weight 2^(-s*l) = 1/4 at s = 1
    assert besov_norm(f, 1.0) == pytest.approx(l2 / 4, rel=1e-12)
    for s in (0.0, 1.6):
        with pytest.raises(ValueError):
            besov_norm(f, s)


def test_besov_norm_of_zero_is_zero():
    g = Grid(8)
    f = to_spectral(g, np.zeros(g.shape))
    assert besov_norm(f, 1.0) == 0.0


def test_besov_sup_picks_the_heavier_shell():
    g = Grid(32)
    x = g.coords[..., 0]
    f = to_spectral(g, np.cos(2 * x) + 16.0 * np.cos(8 * x))
    unit = np.sqrt(V / 2)
    # shell l=1 carries 2^{-1}*1*unit, shell l=3 carries 2^{-3}*16*unit
    assert besov_norm(f, 1.0) == pytest.approx(2.0 * unit, rel=1e-12)


def test_physical_and_spectral_l2_agree():
    g = Grid(8)
    rng = np.random.default_rng(20)
    f = to_spectral(g, rng.standard_normal(g.shape))
    spectral = np.sqrt(np.sum(np.abs(f.coeff) ** 2) * g.mode_weight)
    assert lp_norm_grid(f, 2) == pytest.approx(spectral, rel=1e-12)


def test_lp_interpolation_inequalities():
    g = Grid(8)
    rng = np.random.default_rng(21)
    f = to_spectral(g, rng.standard_normal(g.shape))
    l1 = lp_norm_grid(f, 1)
    l2 = lp_norm_grid(f, 2)
    linf = lp_norm_grid(f, np.inf)
    eps = 1e-12
    assert l2 <= np.sqrt(l1 * linf) + eps
    assert l1 <= np.sqrt(V) * l2 + eps


def _single_mode_pair(grid):
    x = grid.coords[..., 0]
    u_phys = np.zeros(grid.shape + (3,))
    u_phys[..., 1] = np.cos(2 * x)
    u = to_spectral(grid, u_phys)
    e = SpectralTensorField(grid, np.zeros(grid.shape + (3, 3), dtype=complex))
    return u, e


def test_energy_functional_reduces_to_weighted_sobolev_energy():
    g = Grid(16)
    u, e = _single_mode_pair(g)
    total = energy_functional(u, e, 0, 2, 0.0)
    assert total == pytest.approx(21 * (V / 2), rel=1e-12)
    assert energy_functional(u, e, 0, 2, 0.0, scale=2.0) == pytest.approx(
        total / 2.0, rel=1e-12
    )


def test_energy_cross_term_obeys_its_bound():
    g = Grid(8)
    rng = np.random.default_rng(22)
    u = SpectralVectorField(
        g, to_spectral(g, rng.standard_normal(g.shape + (3,))).coeff
    )
    e = SpectralTensorField(
        g, to_spectral(g, rng.standard_normal(g.shape + (3, 3))).coeff
    )
    delta = 0.1
    base = energy_functional(u, e, 0, 3, 0.0)
    tilted = energy_functional(u, e, 0, 3, delta)
    bound = energy_cross_bound(u, e, 0, 3)
    assert abs(tilted - base) <= delta * bound + 1e-12 * base


def test_energy_functional_preconditions():
    g = Grid(8)
    u, e = _single_mode_pair(g)
    with pytest.raises(ValueError):
        energy_functional(u, e, 2, 2, 0.0)
    with pytest.raises(ValueError):
        energy_functional(u, e, 0, 2, 0.0, scale=0.0)


def test_fit_recovers_an_exact_power_law():
    times = np.linspace(1.0, 50.0, 40)
    values = 2.3 * (1 + times) ** (-1.7)
    fit = fit_decay(times, values)
    assert fit.slope == pytest.approx(-1.7, rel=1e-12)
    assert fit.amplitude == pytest.approx(2.3, rel=1e-12)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)
    assert abs(fit.sensitivity) < 1e-9
    assert fit.npoints == 40


def test_fit_window_filters_points():
    times = np.linspace(1.0, 50.0, 40)
    values = 2.3 * (1 + times) ** (-1.7)
    fit = fit_decay(times, values, window=(10.0, 40.0))
    assert fit.npoints == np.count_nonzero((times >= 10.0) & (times <= 40.0))
    assert fit.window == (10.0, 40.0)


def test_fit_preconditions():
    with pytest.raises(ValueError):
        fit_decay([1, 2, 3], [1, 1, 1])
    times = np.linspace(1.0, 10.0, 10)
    with pytest.raises(ValueError):
        fit_decay(times, np.concatenate([np.ones(9), [-1.0]]))
    with pytest.raises(ValueError):
        fit_decay(times, np.ones(9))


def test_fit_is_order_independent():
    rng = np.random.default_rng(23)
    times = np.linspace(1.0, 50.0, 40)
    values = 0.9 * (1 + times) ** (-1.2)
    perm = rng.permutation(40)
    fit = fit_decay(times[perm], values[perm])
    assert fit.slope == pytest.approx(-1.2, rel=1e-12)
