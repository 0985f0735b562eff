import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlstrap.grid import (make_grid, Field, laplacian, inner, l2_norm_sq,
                          shift_x3, gaussian_field, random_smooth_field,
                          write_field, read_field, spectral_tail_fraction,
                          boundary_mass)


def test_wavenumbers_on_unit_box():
    g = make_grid(8, 8, 8, 2 * np.pi, 2 * np.pi, 2 * np.pi)
    expected = np.array([0, 1, 2, 3, -4, -3, -2, -1], dtype=float)
    for k in (g.k1, g.k2, g.k3):
        np.testing.assert_allclose(k, expected, atol=1e-14)


def test_cell_volume():
    g = make_grid(8, 8, 16, 10, 10, 20)
    assert g.cellvol == pytest.approx((10 / 8) ** 2 * (20 / 16), abs=0)
    # quadrature weights sum to the box volume
    assert g.cellvol * g.size == pytest.approx(g.volume, rel=1e-15)


def test_grid_rejects_bad_sizes():
    with pytest.raises(ValueError):
        make_grid(4, 8, 8, 1, 1, 1)
    with pytest.raises(ValueError):
        make_grid(8, 8, 8, 0.0, 1, 1)
    with pytest.raises(ValueError):
        make_grid(8, 8, 8, 1, -2.0, 1)


def test_field_shape_and_finiteness():
    g = make_grid(8, 8, 8, 4, 4, 4)
    with pytest.raises(ValueError):
        Field(g, np.zeros((8, 8, 4), dtype=complex))
    bad = np.zeros(g.shape, dtype=complex)
    bad[0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        Field(g, bad)


def test_field_construction_does_not_freeze_caller_array():
    g = make_grid(8, 8, 8, 4, 4, 4)
    vals = np.zeros(g.shape, dtype=complex)
    Field(g, vals)
    vals[0, 0, 0] = 1.0  # must still be writable


def test_laplacian_plane_wave():
    g = make_grid(16, 16, 16, 2 * np.pi, 2 * np.pi, 2 * np.pi)
    kvec = (2.0, -3.0, 5.0)
    phase = (kvec[0] * g.x1[:, None, None] + kvec[1] * g.x2[None, :, None]
             + kvec[2] * g.x3[None, None, :])
    f = Field(g, np.exp(1j * phase))
    lap = laplacian(f)
    expected = -sum(k * k for k in kvec) * f.values
    np.testing.assert_allclose(lap.values, expected, atol=1e-10)


def test_laplacian_constant_is_zero():
    g = make_grid(8, 8, 8, 4, 4, 4)
    f = Field(g, np.full(g.shape, 2.5 + 1j))
    assert np.max(np.abs(laplacian(f).values)) < 1e-13


def test_laplacian_gaussian_analytic():
    g = make_grid(64, 64, 64, 16, 16, 16)
    rsq = (g.x1[:, None, None] ** 2 + g.x2[None, :, None] ** 2
           + g.x3[None, None, :] ** 2)
    f = Field(g, np.exp(-rsq / 2))
    expected = (rsq - 3.0) * np.exp(-rsq / 2)
    assert np.max(np.abs(laplacian(f).values - expected)) <= 1e-8


def test_inner_constant_gives_volume():
    g = make_grid(8, 8, 8, 2, 3, 4)
    one = Field(g, np.ones(g.shape, dtype=complex))
    assert inner(one, one) == pytest.approx(g.volume, rel=1e-14)


def test_inner_orthogonal_fourier_modes():
    g = make_grid(16, 16, 16, 2 * np.pi, 2 * np.pi, 2 * np.pi)
    f = Field(g, np.exp(1j * 2 * g.x1[:, None, None] * np.ones(g.shape)))
    h = Field(g, np.exp(1j * 3 * g.x1[:, None, None] * np.ones(g.shape)))
    assert abs(inner(f, h)) <= 1e-12 * g.volume


def test_inner_grid_mismatch():
    g1 = make_grid(8, 8, 8, 4, 4, 4)
    g2 = make_grid(8, 8, 8, 5, 4, 4)
    with pytest.raises(ValueError):
        inner(Field(g1, np.ones(g1.shape)), Field(g2, np.ones(g2.shape)))


def test_gaussian_mass():
    g = make_grid(48, 48, 48, 16, 16, 16)
    for r in (0.3, 1.0):
        f = gaussian_field(g, mass_norm=r)
        assert l2_norm_sq(f) == pytest.approx(r * r, rel=1e-12)
    # the analytically normalized Gaussian integrates to 1 on a large box
    rsq = (g.x1[:, None, None] ** 2 + g.x2[None, :, None] ** 2
           + g.x3[None, None, :] ** 2)
    raw = Field(g, np.pi ** -0.75 * np.exp(-rsq / 2))
    assert l2_norm_sq(raw) == pytest.approx(1.0, abs=1e-8)


def test_parseval():
    g = make_grid(16, 16, 16, 5, 5, 5)
    rng = np.random.default_rng(0)
    f = random_smooth_field(g, rng)
    phys = l2_norm_sq(f)
    spec = np.sum(np.abs(np.fft.fftn(f.values)) ** 2) / g.size * g.cellvol
    assert abs(phys - spec) <= 1e-12 * phys


def test_laplacian_self_adjoint():
    g = make_grid(16, 16, 16, 5, 5, 5)
    rng = np.random.default_rng(1)
    f = random_smooth_field(g, rng)
    h = random_smooth_field(g, rng)
    lhs = inner(laplacian(f), h)
    rhs = inner(f, laplacian(h))
    scale = np.sqrt(l2_norm_sq(f) * l2_norm_sq(h))
    assert abs(lhs - rhs) <= 1e-10 * max(scale, 1.0)


def test_shift_identity_and_periodicity():
    g = make_grid(8, 8, 16, 4, 4, 8)
    rng = np.random.default_rng(2)
    f = random_smooth_field(g, rng)
    np.testing.assert_allclose(shift_x3(f, 0.0).values, f.values, atol=1e-14)
    np.testing.assert_allclose(shift_x3(f, g.L3).values, f.values, atol=1e-12)


def test_shift_single_mode_phase():
    g = make_grid(8, 8, 16, 4, 4, 8)
    m = 3
    mode = np.exp(1j * m * 2 * np.pi / g.L3 * g.x3)[None, None, :] \
        * np.ones(g.shape)
    f = Field(g, mode)
    shifted = shift_x3(f, g.L3 / 4)
    np.testing.assert_allclose(shifted.values,
                               np.exp(-1j * m * np.pi / 2) * f.values,
                               atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(a=st.floats(-5, 5), b=st.floats(-5, 5))
def test_shift_group_action(a, b):
    g = make_grid(8, 8, 16, 4, 4, 8)
    rng = np.random.default_rng(3)
    f = random_smooth_field(g, rng)
    lhs = shift_x3(shift_x3(f, a), b).values
    rhs = shift_x3(f, a + b).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12
    # isometry
    assert l2_norm_sq(shift_x3(f, a)) == pytest.approx(l2_norm_sq(f), rel=1e-12)


def test_field_file_roundtrip(tmp_path):
    g = make_grid(8, 16, 8, 4, 8, 4)
    rng = np.random.default_rng(4)
    f = random_smooth_field(g, rng)
    path = tmp_path / "f.nls3"
    write_field(path, f)
    back = read_field(path)
    assert back.grid == g
    np.testing.assert_array_equal(back.values, f.values)


def test_field_file_layout(tmp_path):
    g = make_grid(8, 8, 8, 4, 4, 4)
    vals = np.zeros(g.shape, dtype=complex)
    vals[0, 0, 1] = 1.0 + 2.0j   # x3 is the fastest axis
    path = tmp_path / "f.nls3"
    write_field(path, Field(g, vals))
    raw = path.read_bytes()
    assert raw[:4] == b"NLS3"
    header = 4 + 4 + 12 + 24
    data = np.frombuffer(raw[header:], dtype="<f8")
    assert data[2] == 1.0 and data[3] == 2.0


def test_field_file_bad_magic(tmp_path):
    path = tmp_path / "bad.nls3"
    path.write_bytes(b"XXXX" + b"\0" * 100)
    with pytest.raises(ValueError, match="magic"):
        read_field(path)


def test_field_file_truncated(tmp_path):
    g = make_grid(8, 8, 8, 4, 4, 4)
    path = tmp_path / "f.nls3"
    write_field(path, gaussian_field(g))
    data = path.read_bytes()
    path.write_bytes(data[:len(data) // 2])
    with pytest.raises(ValueError, match="truncated"):
        read_field(path)


def test_spectral_tail_and_boundary_diagnostics():
    g = make_grid(16, 16, 16, 8, 8, 8)
    smooth = gaussian_field(g)
    assert spectral_tail_fraction(g, smooth.values) < 1e-6
    rng = np.random.default_rng(5)
    noise = rng.standard_normal(g.shape)
    assert spectral_tail_fraction(g, noise.astype(complex)) > 1e-3
    assert boundary_mass(g, smooth.values) < 1e-8
