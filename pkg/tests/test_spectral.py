import numpy as np
import pytest

from dgbo.errors import ConfigurationError, NumericError
from dgbo.spectral import (
    TWO_PI,
    SpectralField,
    TorusGrid,
    apply_multiplier,
    derivative,
    fractional_derivative,
    from_spectral,
    integral_of_power,
    product_dealiased,
    reflect,
    resample,
    to_spectral,
    zero_field,
)


@pytest.fixture
def grid():
    return TorusGrid(64)


def test_grid_invariants(grid):
    assert grid.length == TWO_PI
    assert grid.dealias_cutoff == 64 // 3
    with pytest.raises(ConfigurationError):
        TorusGrid(4)
    with pytest.raises(ConfigurationError):
        TorusGrid(100)


def test_constant_transform(grid):
    u = to_spectral(grid, np.ones(grid.n_points))
    assert u.coeff(0) == pytest.approx(TWO_PI, abs=1e-13)
    others = np.abs(u.coeffs[1:])
    assert np.max(others) < 1e-13


def test_cosine_transform(grid):
    u = to_spectral(grid, np.cos(grid.nodes()))
    assert u.coeff(1) == pytest.approx(np.pi, abs=1e-12)
    assert u.coeff(-1) == pytest.approx(np.pi, abs=1e-12)
    mask = np.abs(grid.frequencies()) != 1
    assert np.max(np.abs(u.coeffs[mask])) < 1e-13


def test_roundtrip_band_limited(grid):
    x = grid.nodes()
    samples = np.cos(3 * x) + 0.2 * np.sin(5 * x)
    u = to_spectral(grid, samples)
    assert np.max(np.abs(from_spectral(u) - samples)) <= 1e-12


def test_length_mismatch(grid):
    with pytest.raises(ConfigurationError):
        to_spectral(grid, np.zeros(32))


def test_non_finite_rejected(grid):
    coeffs = np.zeros(grid.n_points, dtype=complex)
    coeffs[3] = np.nan
    with pytest.raises(NumericError):
        SpectralField(grid, coeffs)


def test_multiplier_examples(grid):
    x = grid.nodes()
    u4 = to_spectral(grid, np.cos(4 * x))
    doubled = fractional_derivative(u4, 0.5)
    assert np.max(np.abs(from_spectral(doubled) - 2 * np.cos(4 * x))) < 1e-12

    u1 = to_spectral(grid, np.cos(x))
    dx = derivative(u1)
    assert np.max(np.abs(from_spectral(dx) + np.sin(x))) < 1e-12

    ident = apply_multiplier(u1, lambda xi: np.exp(1j * (-xi * np.abs(xi)) * 0.0))
    assert np.allclose(ident.coeffs, u1.coeffs)


def test_multiplier_rejects_non_finite(grid):
    u = to_spectral(grid, np.cos(grid.nodes()))
    with pytest.raises(NumericError):
        apply_multiplier(u, lambda xi: np.where(xi == 0, np.inf, 1.0))


def test_multiplier_composition(grid):
    rng = np.random.default_rng(7)
    u = to_spectral(grid, rng.standard_normal(grid.n_points))
    s1 = lambda xi: 1.0 + 0.5j * xi
    s2 = lambda xi: np.abs(xi) ** 0.3
    both = apply_multiplier(apply_multiplier(u, s1), s2)
    once = apply_multiplier(u, lambda xi: s1(xi) * s2(xi))
    scale = np.max(np.abs(once.coeffs))
    assert np.max(np.abs(both.coeffs - once.coeffs)) <= 1e-15 * scale


def test_product_examples(grid):
    x = grid.nodes()
    c = to_spectral(grid, np.cos(x))
    p = product_dealiased(c, c)
    assert p.coeff(0) == pytest.approx(np.pi, abs=1e-12)
    assert p.coeff(2) == pytest.approx(np.pi / 2, abs=1e-12)
    assert p.coeff(-2) == pytest.approx(np.pi / 2, abs=1e-12)

    z = product_dealiased(c, zero_field(grid))
    assert np.max(np.abs(z.coeffs)) == 0.0


def test_product_dealias_kills_double_cutoff(grid):
    k = grid.dealias_cutoff
    mode = to_spectral(grid, np.cos(k * grid.nodes()))
    p = product_dealiased(mode, mode)
    xi = grid.frequencies()
    assert np.max(np.abs(p.coeffs[np.abs(xi) > k])) == 0.0
    # the zero mode survives and carries the mean of cos^2
    assert p.coeff(0) == pytest.approx(np.pi, abs=1e-12)


def test_product_grid_mismatch(grid):
    other = TorusGrid(128)
    u = to_spectral(grid, np.cos(grid.nodes()))
    v = to_spectral(other, np.cos(other.nodes()))
    with pytest.raises(ConfigurationError):
        product_dealiased(u, v)


def test_product_commutative_bilinear(grid):
    rng = np.random.default_rng(3)
    a = to_spectral(grid, rng.standard_normal(grid.n_points))
    b = to_spectral(grid, rng.standard_normal(grid.n_points))
    c = to_spectral(grid, rng.standard_normal(grid.n_points))
    ab = product_dealiased(a, b)
    ba = product_dealiased(b, a)
    assert np.max(np.abs(ab.coeffs - ba.coeffs)) < 1e-12
    lhs = product_dealiased(a, SpectralField(grid, 2.0 * b.coeffs + c.coeffs))
    rhs = 2.0 * ab.coeffs + product_dealiased(a, c).coeffs
    assert np.max(np.abs(lhs.coeffs - rhs)) < 1e-11


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_parseval(seed):
    grid = TorusGrid(128)
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal(grid.n_points)
    u = to_spectral(grid, samples)
    # remove the Nyquist content that to_spectral forces to zero
    samples = from_spectral(u)
    physical = np.sum(samples**2) * TWO_PI / grid.n_points
    spectral = np.sum(np.abs(u.coeffs) ** 2) / TWO_PI
    assert spectral == pytest.approx(physical, rel=1e-12)


def test_hermitian_preserved_by_real_symbols(grid):
    rng = np.random.default_rng(11)
    u = to_spectral(grid, rng.standard_normal(grid.n_points))
    assert u.hermitian_defect() < 1e-13
    v = apply_multiplier(u, lambda xi: 1j * xi.astype(float))
    assert v.hermitian_defect() < 1e-12
    w = product_dealiased(u, u)
    assert w.hermitian_defect() < 1e-12


def test_reflect_and_resample(grid):
    x = grid.nodes()
    u = to_spectral(grid, np.cos(x) + 0.3 * np.sin(2 * x))
    r = reflect(u)
    expect = np.cos(x) - 0.3 * np.sin(2 * x)
    assert np.max(np.abs(from_spectral(r) - expect)) < 1e-12

    fine = resample(u, TorusGrid(256))
    assert fine.coeff(1) == pytest.approx(u.coeff(1))
    assert fine.coeff(-2) == pytest.approx(u.coeff(-2))
    back = resample(fine, grid)
    assert np.max(np.abs(back.coeffs - u.coeffs)) < 1e-13


def test_integral_of_power(grid):
    u = to_spectral(grid, np.cos(grid.nodes()))
    assert integral_of_power(u, 2) == pytest.approx(np.pi, abs=1e-12)
    assert integral_of_power(u, 3) == pytest.approx(0.0, abs=1e-12)
    assert integral_of_power(u, 4) == pytest.approx(3 * np.pi / 4, abs=1e-12)


def test_coeffs_are_frozen(grid):
    u = to_spectral(grid, np.cos(grid.nodes()))
    with pytest.raises(ValueError):
        u.coeffs[0] = 1.0
