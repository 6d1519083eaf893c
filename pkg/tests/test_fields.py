import numpy as np
import pytest

from viscowave.fields import (
    SpectralTensorField,
    SpectralVectorField,
    hermitian_error,
    load_field,
    resample,
    save_field,
    to_physical,
    to_spectral,
)
from viscowave.grid import Grid


def test_round_trip_recovers_physical_values():
    rng = np.random.default_rng(11)
    g = Grid(12)
    phys = rng.standard_normal(g.shape + (3,))
    back = to_physical(to_spectral(g, phys))
    assert np.max(np.abs(back - phys)) < 1e-13


def test_forward_transform_is_unnormalized():
    g = Grid(8)
    f = to_spectral(g, np.full(g.shape, 2.5))
    assert f.coeff[0, 0, 0] == pytest.approx(2.5 * 8**3)
    assert np.max(np.abs(f.coeff.ravel()[1:])) < 1e-10


def test_single_cosine_lands_on_a_conjugate_pair():
    g = Grid(8)
    f = to_spectral(g, np.cos(2.0 * g.coords[..., 0]))
    expect = np.zeros(g.shape, dtype=complex)
    expect[2, 0, 0] = 0.5 * 8**3
    expect[-2, 0, 0] = 0.5 * 8**3
    assert np.max(np.abs(f.coeff - expect)) < 1e-9


def test_real_input_is_hermitian_symmetric():
    rng = np.random.default_rng(12)
    g = Grid(8)
    f = to_spectral(g, rng.standard_normal(g.shape))
    assert hermitian_error(f) < 1e-13
    broken = f.copy()
    broken.coeff[1, 2, 3] += 10.0j * np.max(np.abs(f.coeff))
    assert hermitian_error(broken) > 0.5


def test_component_shape_enforced():
    g = Grid(8)
    with pytest.raises(ValueError, match="shape"):
        SpectralVectorField(g, np.zeros(g.shape, dtype=complex))
    with pytest.raises(ValueError, match="shape"):
        SpectralTensorField(g, np.zeros(g.shape + (3,), dtype=complex))


def test_transform_rejects_wrong_grid():
    g = Grid(8)
    with pytest.raises(ValueError, match="grid"):
        to_spectral(g, np.zeros((4, 4, 4)))


def test_resample_preserves_band_limited_fields():
    from viscowave.operators import dealias

    rng = np.random.default_rng(13)
    g16 = Grid(16)
    # band-limit first: the unpaired Nyquist plane cannot survive a resample
    u = dealias(to_spectral(g16, rng.standard_normal(g16.shape + (3,))))
    up = resample(u, Grid(32))
    # same physical values at the shared grid points
    assert np.max(np.abs(to_physical(up)[::2, ::2, ::2] - to_physical(u))) < 1e-13
    back = resample(up, g16)
    assert np.max(np.abs(back.coeff - u.coeff)) < 1e-9 * np.max(np.abs(u.coeff))


def test_resample_requires_matching_box():
    u = to_spectral(Grid(8), np.zeros((8, 8, 8)))
    with pytest.raises(ValueError, match="length"):
        resample(u, Grid(16, length=3.0))


def test_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(14)
    g = Grid(8)
    e = to_spectral(g, rng.standard_normal(g.shape + (3, 3)))
    path = tmp_path / "snapshot.vwf"
    save_field(e, path)
    back = load_field(path)
    assert isinstance(back, SpectralTensorField)
    assert back.grid == g
    assert np.array_equal(back.coeff, e.coeff)


def test_load_rejects_foreign_files(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(ValueError, match="magic"):
        load_field(path)


def test_load_rejects_truncated_snapshots(tmp_path):
    g = Grid(4)
    u = to_spectral(g, np.zeros(g.shape + (3,)))
    path = tmp_path / "snapshot.vwf"
    save_field(u, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-16])
    with pytest.raises(ValueError, match="truncated"):
        load_field(path)
