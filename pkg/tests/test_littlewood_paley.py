import numpy as np
import pytest

from dgbo.littlewood_paley import (
    CHI_FLAT,
    CHI_SUPP,
    DEFAULT_BUMP,
    chi,
    chi_gt,
    chi_k,
    chi_le,
    eta_l,
    eta_support,
    lp_project,
    lp_project_gt,
    lp_project_le,
    sobolev_norm,
)
from dgbo.spectral import SpectralField, TorusGrid, to_spectral


def bump_oracle(x):
    """Direct evaluation of the documented transition formula."""
    a = abs(x)
    if a <= CHI_FLAT:
        return 1.0
    if a >= CHI_SUPP:
        return 0.0
    t = (CHI_SUPP - a) / (CHI_SUPP - CHI_FLAT)
    f = np.exp(-1.0 / t)
    g = np.exp(-1.0 / (1.0 - t))
    return f / (f + g)


def test_sandwich():
    ys = np.linspace(0, 3, 601)
    xs = np.concatenate([-ys[::-1], ys])
    vals = chi(xs)
    assert np.all(vals >= -1e-15)
    assert np.all(vals <= 1.0 + 1e-15)
    assert np.all(vals[np.abs(xs) <= CHI_FLAT] == 1.0)
    assert np.all(vals[np.abs(xs) >= CHI_SUPP] == 0.0)
    assert np.max(np.abs(vals - vals[::-1])) == 0.0  # even


def test_chi_matches_oracle():
    for x in (0.0, 1.0, 1.3, 1.5, 1.55, -1.5, 2.0):
        assert chi(x) == pytest.approx(bump_oracle(x), abs=1e-15)


def test_chi_k_examples():
    assert chi_k(0, 1) == 1.0
    for k in range(0, 8):
        assert chi_k(k, 0) == 0.0
    # chi_2(3) = 1 - chi(3/2), with the implemented bump
    assert chi_k(2, 3) == pytest.approx(1.0 - bump_oracle(1.5), abs=1e-14)


def test_partition_of_unity():
    K = 7
    xs = np.arange(1, 2**K + 1, dtype=float)
    total = sum(chi_k(k, xs) for k in range(K + 1))
    assert np.max(np.abs(total - 1.0)) <= 1e-14
    assert np.max(np.abs(chi_le(K, xs) - 1.0)) <= 1e-14
    assert np.max(np.abs(chi_gt(K, xs))) <= 1e-14


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_support_window(k):
    lo, hi = 2.0**k * 5 / 8, 2.0**k * 8 / 5
    xs = np.linspace(0, 2.0 ** (k + 1) * 2, 4001)
    vals = chi_k(k, xs)
    outside = (xs <= lo) | (xs >= hi)
    assert np.max(np.abs(vals[outside])) == 0.0


def test_projector_examples():
    # exact coefficient fields so the forced zeros of chi_k stay exact
    grid = TorusGrid(64)
    coeffs = np.zeros(64, dtype=complex)
    coeffs[1] = coeffs[-1] = np.pi
    u = SpectralField(grid, coeffs)
    p0 = lp_project(u, 0)
    assert np.array_equal(p0.coeffs, u.coeffs)
    for k in (1, 2, 3):
        assert np.max(np.abs(lp_project(u, k).coeffs)) == 0.0
    const_coeffs = np.zeros(64, dtype=complex)
    const_coeffs[0] = 2.5 * 2 * np.pi
    const = SpectralField(grid, const_coeffs)
    for k in (0, 1, 2):
        assert np.max(np.abs(lp_project(const, k).coeffs)) == 0.0


def test_block_sum_reconstructs():
    grid = TorusGrid(64)
    rng = np.random.default_rng(5)
    u = to_spectral(grid, rng.standard_normal(64))
    mean_mode = np.zeros_like(u.coeffs)
    mean_mode[0] = u.coeffs[0]
    total = sum(lp_project(u, k).coeffs for k in range(6))
    assert np.max(np.abs(total + mean_mode - u.coeffs)) < 1e-13
    # P_{<=k} telescopes the same sum
    assert np.max(np.abs(lp_project_le(u, 5).coeffs + mean_mode - u.coeffs)) < 1e-13
    assert np.max(np.abs(
        lp_project_gt(u, 2).coeffs + lp_project_le(u, 2).coeffs
        + mean_mode - u.coeffs
    )) < 1e-13


def test_almost_orthogonality():
    # P_k P_j = 0 once the blocks are two apart (idempotence does not hold)
    grid = TorusGrid(128)
    rng = np.random.default_rng(9)
    u = to_spectral(grid, rng.standard_normal(128))
    for k in range(0, 6):
        for j in range(0, 6):
            composed = lp_project(lp_project(u, k), j)
            if abs(k - j) >= 2:
                assert np.max(np.abs(composed.coeffs)) == 0.0
    pk = lp_project(u, 3)
    assert np.max(np.abs(lp_project(pk, 3).coeffs - pk.coeffs)) > 1e-8


def test_sobolev_examples():
    grid = TorusGrid(64)
    x = grid.nodes()
    u = to_spectral(grid, np.cos(x))
    for s in (-0.5, 0.0, 1.0, 2.3):
        assert sobolev_norm(u, s) == pytest.approx(np.sqrt(np.pi), rel=1e-12)
    const = to_spectral(grid, np.full(64, -1.3))
    assert sobolev_norm(const, 0.7) == pytest.approx(2 * np.pi * 1.3, rel=1e-12)
    # two-block field: oracle is the direct two-term sum with the same bump
    u3 = to_spectral(grid, np.cos(3 * x))
    c = bump_oracle(1.5)
    expect = np.sqrt(np.pi * (4 * c**2 + 16 * (1 - c) ** 2))
    assert sobolev_norm(u3, 1.0) == pytest.approx(expect, rel=1e-12)


def test_norm_overlap_bound():
    # mean-zero field: at most two blocks overlap a frequency and the
    # squared cutoffs sum to a value in [1/2, 1]
    grid = TorusGrid(128)
    rng = np.random.default_rng(1)
    samples = rng.standard_normal(128)
    samples -= samples.mean()
    u = to_spectral(grid, samples)
    l2 = u.l2_norm()
    total = sobolev_norm(u, 0.0)
    assert l2 / np.sqrt(2.0) - 1e-12 <= total <= l2 + 1e-12


def test_single_block_equality():
    grid = TorusGrid(256)
    x = grid.nodes()
    # frequency 12 sits where only chi_3 + chi_4 can see it; cos(2x) only chi_1
    u = to_spectral(grid, np.cos(2 * x))
    assert sobolev_norm(u, 0.0) == pytest.approx(u.l2_norm(), rel=1e-12)


def test_eta_profile_shared():
    xs = np.linspace(-40, 40, 1601)
    assert np.max(np.abs(eta_l(0, xs) - chi(xs))) == 0.0
    assert np.max(np.abs(eta_l(3, xs) - chi_k(3, xs))) == 0.0
    lo, hi = eta_support(4)
    assert (lo, hi) == (16 * 5 / 8, 16 * 8 / 5)
    assert eta_support(0) == (0.0, CHI_SUPP)


def test_profile_identifier():
    assert DEFAULT_BUMP.identifier == "exp-ratio-bump"
