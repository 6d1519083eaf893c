"""Projectors, derivatives, and the band split on small grids.

Random fields are always built by transforming real white noise so they
carry the Hermitian symmetry (and the Nyquist content) of genuine data.
"""

import numpy as np
import pytest

from viscowave.fields import (
    SpectralTensorField,
    SpectralVectorField,
    hermitian_error,
    to_spectral,
)
from viscowave.grid import Grid
from viscowave.norms import lp_norm_grid
from viscowave.operators import (
    CutoffProfile,
    curl,
    dealias,
    div_tensor,
    div_vector,
    divergence_error,
    grad,
    leray_project,
    q_project,
    split_low_high,
)


def _vector_noise(grid, seed):
    rng = np.random.default_rng(seed)
    return to_spectral(grid, rng.standard_normal(grid.shape + (3,)))


def _tensor_noise(grid, seed):
    rng = np.random.default_rng(seed)
    return to_spectral(grid, rng.standard_normal(grid.shape + (3, 3)))


def test_projector_removes_only_the_parallel_component():
    g = Grid(8)
    coeff = np.zeros(g.shape + (3,), dtype=complex)
    coeff[1, 0, 0] = (1.0, 2.0, 3.0)
    out = leray_project(SpectralVectorField(g, coeff))
    assert np.allclose(out.coeff[1, 0, 0], (0.0, 2.0, 3.0), atol=1e-15)


def test_projector_leaves_the_zero_mode_alone():
    g = Grid(8)
    coeff = np.zeros(g.shape + (3,), dtype=complex)
    coeff[0, 0, 0] = (4.0, 5.0, 6.0)
    out = leray_project(SpectralVectorField(g, coeff))
    assert np.array_equal(out.coeff, coeff)


def test_leray_idempotent():
    g = Grid(8)
    once = leray_project(_vector_noise(g, 1))
    twice = leray_project(once)
    scale = np.max(np.abs(once.coeff))
    assert np.max(np.abs(twice.coeff - once.coeff)) <= 1e-12 * scale


def test_projected_divergence_vanishes():
    g = Grid(8)
    raw = _vector_noise(g, 2)
    v = leray_project(raw)
    scale = np.max(np.abs(raw.coeff))
    assert np.max(np.abs(div_vector(v).coeff)) <= 1e-14 * scale
    assert divergence_error(v) < 1e-13


def test_projection_keeps_real_fields_real():
    # raw noise fills the Nyquist planes, the hardest case for symmetry
    g = Grid(8)
    v = _vector_noise(g, 3)
    assert hermitian_error(v) < 1e-12
    assert hermitian_error(leray_project(v)) < 1e-12


def test_projection_splits_the_energy():
    g = Grid(8)
    v = _vector_noise(g, 4)
    p = leray_project(v)
    q = SpectralVectorField(g, v.coeff - p.coeff)
    spectral = lambda f: float(np.sum(np.abs(f.coeff) ** 2))
    assert spectral(v) == pytest.approx(spectral(p) + spectral(q), rel=1e-12)
    assert lp_norm_grid(v, 2) ** 2 == pytest.approx(
        lp_norm_grid(p, 2) ** 2 + lp_norm_grid(q, 2) ** 2, rel=1e-12
    )


def test_q_projection_idempotent():
    g = Grid(8)
    once = q_project(_tensor_noise(g, 5))
    twice = q_project(once)
    scale = np.max(np.abs(once.coeff))
    assert np.max(np.abs(twice.coeff - once.coeff)) <= 1e-12 * scale


def test_q_projection_kills_rows_orthogonal_to_the_mode():
    g = Grid(8)
    coeff = np.zeros(g.shape + (3, 3), dtype=complex)
    # mode along y; rows proportional to a vector with no y component
    coeff[0, 3, 0] = np.outer((1.0, 2.0, 3.0), (2.0, 0.0, -1.0))
    out = q_project(SpectralTensorField(g, coeff))
    assert np.max(np.abs(out.coeff)) < 1e-14


def test_q_projection_preserves_realness():
    g = Grid(8)
    e = _tensor_noise(g, 6)
    assert hermitian_error(q_project(e)) < 1e-12


def test_gradient_and_divergence_compose_to_the_laplacian():
    g = Grid(8)
    v = dealias(_vector_noise(g, 7))
    lap = div_tensor(grad(v))
    expect = -g.xi2[..., None] * v.coeff
    assert np.max(np.abs(lap.coeff - expect)) < 1e-12 * np.max(np.abs(expect))


def test_curl_of_a_gradient_mode_vanishes():
    g = Grid(8)
    coeff = np.zeros(g.shape + (3,), dtype=complex)
    coeff[1, 2, 0] = 1j * g.xi[1, 2, 0]
    coeff[-1, -2, 0] = np.conj(coeff[1, 2, 0])
    out = curl(SpectralVectorField(g, coeff))
    assert np.max(np.abs(out.coeff)) < 1e-14


def test_dealias_zeroes_only_the_outer_third():
    g = Grid(12)
    f = _vector_noise(g, 8)
    out = dealias(f)
    assert np.array_equal(out.coeff[0, 1, 2], f.coeff[0, 1, 2])
    assert np.all(out.coeff[6] == 0)  # mode -6 on the first axis
    assert np.all(out.coeff[:, 5] == 0)  # mode 5 > 12/3
    assert np.array_equal(dealias(out).coeff, out.coeff)


def test_divergence_error_is_gauged_by_the_global_scale():
    g = Grid(8)
    coeff = np.zeros(g.shape + (3,), dtype=complex)
    coeff[0, 2, 0] = (0.0, 1.0, 0.0)  # fully parallel to its mode
    assert divergence_error(SpectralVectorField(g, coeff)) == pytest.approx(1.0)
    assert divergence_error(SpectralVectorField(g, np.zeros_like(coeff))) == 0.0


def test_cutoff_profile_partitions_unity():
    c = CutoffProfile(2.0)
    assert c.inner == pytest.approx(1.0)
    assert c.outer == pytest.approx(np.sqrt(2.0))
    rho = np.linspace(0.0, 3.0, 301)
    low = c.low(rho)
    assert np.allclose(low + c.high(rho), 1.0, atol=1e-15)
    assert np.all(low[rho <= c.inner] == 1.0)
    assert np.all(low[rho >= c.outer] == 0.0)
    inside = low[(rho > c.inner) & (rho < c.outer)]
    assert np.all(np.diff(inside) <= 1e-12)


def test_cutoff_needs_a_positive_threshold():
    with pytest.raises(ValueError):
        CutoffProfile(0.0)


def test_band_split_is_a_partition():
    g = Grid(8)
    f = _vector_noise(g, 9)
    lo, hi = split_low_high(f, CutoffProfile(4.0))
    assert np.max(np.abs(lo.coeff + hi.coeff - f.coeff)) <= 1e-15 * np.max(
        np.abs(f.coeff)
    )
    # |xi| = 1 sits below the inner radius 2, |xi| = 3 above the outer
    assert lo.coeff[1, 0, 0, 0] == f.coeff[1, 0, 0, 0]
    assert hi.coeff[1, 0, 0, 0] == 0.0
    assert hi.coeff[3, 0, 0, 1] == f.coeff[3, 0, 0, 1]
    assert lo.coeff[3, 0, 0, 1] == 0.0
