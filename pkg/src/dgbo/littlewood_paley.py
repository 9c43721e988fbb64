"""Dyadic frequency cutoffs, Littlewood-Paley projectors and block Sobolev norms.

The generating cutoff chi is any even smooth function squeezed between the
indicators of [-5/4, 5/4] and [-8/5, 8/5]; the concrete transition profile
used here is the standard exp(-1/t) ratio bump.  All quantities that depend
on the choice inside the transition band are exposed through the profile
object so reports can record which bump produced them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import TWO_PI, SpectralField, apply_multiplier

CHI_FLAT = 5.0 / 4.0  # chi == 1 on [-5/4, 5/4]
CHI_SUPP = 8.0 / 5.0  # chi == 0 outside (-8/5, 8/5)


def _ramp(t):
    """exp(-1/t) continued by zero for t <= 0."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


@dataclass(frozen=True)
class BumpProfile:
    """Smooth transition psi: [0,1] -> [0,1] and the cutoff chi built from it."""

    identifier: str = "exp-ratio-bump"

    def psi(self, t):
        scalar = np.isscalar(t) or np.ndim(t) == 0
        f = _ramp(t)
        out = f / (f + _ramp(1.0 - np.asarray(t, dtype=np.float64)))
        return float(out[0]) if scalar else out

    def chi(self, xi):
        """Even cutoff with 1_[-5/4,5/4] <= chi <= 1_[-8/5,8/5]."""
        scalar = np.isscalar(xi) or np.ndim(xi) == 0
        a = np.abs(np.asarray(xi, dtype=np.float64))
        t = np.clip((CHI_SUPP - a) / (CHI_SUPP - CHI_FLAT), 0.0, 1.0)
        out = self.psi(np.atleast_1d(t))
        return float(out[0]) if scalar else out.reshape(np.shape(xi))


DEFAULT_BUMP = BumpProfile()


def chi(xi, profile: BumpProfile = DEFAULT_BUMP):
    return profile.chi(xi)


def chi_k(k: int, xi, profile: BumpProfile = DEFAULT_BUMP):
    """Dyadic cutoff chi(2^-k xi) - chi(2^(1-k) xi), k >= 0."""
    if k < 0:
        raise ValueError("dyadic index k must be >= 0")
    return profile.chi(np.ldexp(np.asarray(xi, dtype=np.float64), -k)) - profile.chi(
        np.ldexp(np.asarray(xi, dtype=np.float64), 1 - k)
    )


def chi_le(k: int, xi, profile: BumpProfile = DEFAULT_BUMP):
    """Telescoped sum of chi_l for l = 0..k."""
    if k < 0:
        raise ValueError("dyadic index k must be >= 0")
    x = np.asarray(xi, dtype=np.float64)
    return profile.chi(np.ldexp(x, -k)) - profile.chi(2.0 * x)


def chi_gt(k: int, xi, profile: BumpProfile = DEFAULT_BUMP):
    """Telescoped tail sum of chi_l for l > k (equals 1 - chi(2^-k xi))."""
    if k < 0:
        raise ValueError("dyadic index k must be >= 0")
    return 1.0 - profile.chi(np.ldexp(np.asarray(xi, dtype=np.float64), -k))


# The modulation cutoffs eta_l satisfy the same sandwich and reuse the profile.


def eta_l(l: int, mu, profile: BumpProfile = DEFAULT_BUMP):
    """Modulation cutoff: eta_0 is the bump itself, eta_l a dyadic difference."""
    if l < 0:
        raise ValueError("modulation index l must be >= 0")
    if l == 0:
        return profile.chi(mu)
    return chi_k(l, mu, profile)


def eta_support(l: int) -> tuple[float, float]:
    """(lower, upper) bounds of |mu| on supp eta_l."""
    if l == 0:
        return 0.0, CHI_SUPP
    return 2.0**l * 5.0 / 8.0, 2.0**l * CHI_SUPP


def chi_support(k: int) -> tuple[float, float]:
    """(lower, upper) bounds of |xi| on supp chi_k."""
    if k == 0:
        return 0.0, CHI_SUPP
    return 2.0**k * 5.0 / 8.0, 2.0**k * CHI_SUPP


def lp_project(field: SpectralField, k: int, profile: BumpProfile = DEFAULT_BUMP) -> SpectralField:
    """Littlewood-Paley piece P_k u."""
    return apply_multiplier(field, lambda xi: chi_k(k, xi, profile))


def lp_project_le(field: SpectralField, k: int, profile: BumpProfile = DEFAULT_BUMP) -> SpectralField:
    return apply_multiplier(field, lambda xi: chi_le(k, xi, profile))


def lp_project_gt(field: SpectralField, k: int, profile: BumpProfile = DEFAULT_BUMP) -> SpectralField:
    return apply_multiplier(field, lambda xi: chi_gt(k, xi, profile))


def max_block_index(grid_or_ximax) -> int:
    """Largest k whose block meets the resolvable band."""
    ximax = getattr(grid_or_ximax, "n_points", None)
    ximax = ximax // 2 if ximax is not None else int(grid_or_ximax)
    k = 0
    while 2.0**k * 5.0 / 8.0 <= ximax:
        k += 1
    return k


def block_l2_norms(field: SpectralField, profile: BumpProfile = DEFAULT_BUMP) -> np.ndarray:
    """Array of ||P_k u||_{L^2} for k = 0..max_block_index."""
    xi = field.grid.frequencies()
    mag2 = np.abs(field.coeffs) ** 2
    kmax = max_block_index(field.grid)
    out = np.empty(kmax + 1)
    for k in range(kmax + 1):
        weights = chi_k(k, xi, profile) ** 2
        out[k] = np.sqrt(np.sum(weights * mag2) / TWO_PI)
    return out


def sobolev_norm(field: SpectralField, s: float, profile: BumpProfile = DEFAULT_BUMP) -> float:
    """Block Sobolev norm: sqrt(u_hat(0)^2 + sum_k 2^(2ks) ||P_k u||^2).

    Valid for any finite s, including the negative values used for difference
    estimates at s = -1/2.
    """
    if not np.isfinite(s):
        raise ValueError("Sobolev index s must be finite")
    blocks = block_l2_norms(field, profile)
    k = np.arange(blocks.shape[0])
    total = field.coeffs[0].real ** 2 + np.sum(4.0 ** (k * s) * blocks**2)
    return float(np.sqrt(total))
