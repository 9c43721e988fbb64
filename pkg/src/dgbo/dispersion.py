"""Dispersion relations and the admissibility checks for the generalized equation.

A dispersion relation here is an odd real function omega(xi); the linear flow
acts on coefficients as u_hat(t, xi) = exp(i*omega(xi)*t) * u_hat(0, xi).  For
the fractional family omega(xi) = -xi*|xi|^alpha this realizes the equation
with fractional dispersion of order alpha.  Custom relations are admitted when
|omega'| ~ |xi|^alpha, |omega''| ~ |xi|^(alpha-1) beyond a threshold kappa and
the three-wave resonance Omega = omega(xi1)+omega(xi2)+omega(xi3) is
comparable to |xi_1*|^alpha * |xi_3*| on zero-sum triples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .errors import AdmissibilityError, ConfigurationError, NumericError

_ODDNESS_TOL = 1e-12


def _as_vectorized(omega: Callable) -> Callable:
    def call(xi):
        xi = np.asarray(xi, dtype=np.float64)
        try:
            out = np.asarray(omega(xi), dtype=np.float64)
            if out.shape != xi.shape:
                raise TypeError
        except (TypeError, ValueError):
            out = np.array([omega(float(x)) for x in np.atleast_1d(xi)])
            out = out.reshape(xi.shape)
        return out

    return call


@dataclass(frozen=True)
class DispersionSpec:
    """An odd dispersion relation with its roughness exponent and threshold.

    ``alpha`` is the exponent in the derivative/resonance comparisons;
    ``kappa`` the frequency threshold above which they are required to hold.
    Oddness is verified on a sample of frequencies at construction.
    """

    name: str
    alpha: float
    kappa: float
    omega_fn: Callable = dc_field(repr=False)

    def __post_init__(self):
        if self.alpha <= 0:
            raise ConfigurationError("alpha must be positive")
        if self.kappa <= 0:
            raise ConfigurationError("kappa must be positive")
        object.__setattr__(self, "omega_fn", _as_vectorized(self.omega_fn))
        sample = np.concatenate([np.arange(1.0, 65.0), [0.5, 1.5, 100.0, 1000.0]])
        plus = self.omega_fn(sample)
        minus = self.omega_fn(-sample)
        if not (np.all(np.isfinite(plus)) and np.all(np.isfinite(minus))):
            raise NumericError(f"dispersion relation '{self.name}' is not finite")
        scale = np.maximum(np.abs(plus), 1.0)
        if np.max(np.abs(plus + minus) / scale) > _ODDNESS_TOL:
            raise AdmissibilityError(
                f"dispersion relation '{self.name}' is not odd"
            )

    def __call__(self, xi):
        return self.omega_fn(xi)


def omega(spec: DispersionSpec, xi):
    """Evaluate the dispersion relation (scalar in, scalar out)."""
    scalar = np.isscalar(xi) or np.ndim(xi) == 0
    out = spec.omega_fn(xi)
    return float(out) if scalar else out


def fractional_bo(alpha: float) -> DispersionSpec:
    """The fractional family omega(xi) = -xi*|xi|^alpha, alpha in (0, 1].

    alpha = 1 is the classical Benjamin-Ono dispersion; the weakly dispersive
    regime of interest is alpha in (0, 1).
    """
    if not 0.0 < alpha <= 1.0:
        raise ConfigurationError(f"fractional exponent must be in (0, 1], got {alpha}")
    return DispersionSpec(
        name=f"fractional-bo(alpha={alpha:g})",
        alpha=float(alpha),
        kappa=1.0,
        omega_fn=lambda xi: -xi * np.abs(xi) ** alpha,
    )


def whitham_capillary(tau: float = 1.0, kappa: float = 10.0) -> DispersionSpec:
    """Capillary Whitham multiplier, extended to an odd function via sgn(xi).

    omega(xi) = sgn(xi) * sqrt(tanh(|xi|) * |xi| * (1 + tau*xi^2)); for large
    |xi| this behaves like sqrt(tau)*sgn(xi)*|xi|^(3/2), so the effective
    roughness exponent is alpha = 1/2.
    """
    if tau <= 0:
        raise ConfigurationError("surface tension tau must be positive")

    def w(xi):
        a = np.abs(xi)
        return np.sign(xi) * np.sqrt(np.tanh(a) * a * (1.0 + tau * xi**2))

    return DispersionSpec(
        name=f"whitham-capillary(tau={tau:g})", alpha=0.5, kappa=float(kappa), omega_fn=w
    )


def custom(omega_fn: Callable, alpha: float, kappa: float, name: str = "custom") -> DispersionSpec:
    return DispersionSpec(name=name, alpha=float(alpha), kappa=float(kappa), omega_fn=omega_fn)


def _richardson_d1(spec: DispersionSpec, xi: np.ndarray, h: float = 1e-3) -> np.ndarray:
    d_h = (spec.omega_fn(xi + h) - spec.omega_fn(xi - h)) / (2 * h)
    d_h2 = (spec.omega_fn(xi + h / 2) - spec.omega_fn(xi - h / 2)) / h
    return (4.0 * d_h2 - d_h) / 3.0


def _richardson_d2(spec: DispersionSpec, xi: np.ndarray, h: float = 1e-3) -> np.ndarray:
    w = spec.omega_fn
    s_h = (w(xi + h) - 2.0 * w(xi) + w(xi - h)) / h**2
    s_h2 = (w(xi + h / 2) - 2.0 * w(xi) + w(xi - h / 2)) / (h / 2) ** 2
    return (4.0 * s_h2 - s_h) / 3.0


def resonance_ratio_window(spec: DispersionSpec, xi_max: int) -> tuple[float, float, int]:
    """Min/max of |Omega| / (|xi_1*|^alpha |xi_3*|) over integer zero-sum
    triples with nonzero entries, |xi_i| <= xi_max and |xi_1*| > kappa.

    Negating a whole triple leaves the ratio unchanged, so only xi1 > 0 is
    scanned.  Returns (min, max, number_of_triples).
    """
    xi1 = np.arange(1, xi_max + 1, dtype=np.float64)
    xi2 = np.concatenate(
        [np.arange(-xi_max, 0, dtype=np.float64), np.arange(1, xi_max + 1, dtype=np.float64)]
    )
    x1, x2 = np.meshgrid(xi1, xi2, indexing="ij")
    x3 = -x1 - x2
    valid = (x3 != 0) & (np.abs(x3) <= xi_max)
    mags = np.stack([np.abs(x1), np.abs(x2), np.abs(x3)])
    top = mags.max(axis=0)
    bot = mags.min(axis=0)
    valid &= top > spec.kappa
    om = spec.omega_fn
    with np.errstate(invalid="ignore"):
        ratio = np.abs(om(x1) + om(x2) + om(x3)) / (top**spec.alpha * bot)
    ratio = ratio[valid]
    if ratio.size == 0:
        raise ConfigurationError("empty resonance scan; increase xi_max")
    return float(ratio.min()), float(ratio.max()), int(ratio.size)


@dataclass
class ConditionReport:
    """Observed ratio windows for the derivative and resonance comparisons."""

    name: str
    alpha: float
    kappa: float
    xi_max: int
    oddness_defect: float
    d1_window: tuple[float, float]
    d2_window: tuple[float, float]
    resonance_window: tuple[float, float]
    d1_window_half: tuple[float, float]
    d2_window_half: tuple[float, float]
    resonance_window_half: tuple[float, float]
    stability: float
    n_triples: int
    passed: bool
    notes: list[str]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "alpha": self.alpha,
            "kappa": self.kappa,
            "xi_max": self.xi_max,
            "oddness_defect": self.oddness_defect,
            "d1_window": list(self.d1_window),
            "d2_window": list(self.d2_window),
            "resonance_window": list(self.resonance_window),
            "d1_window_half": list(self.d1_window_half),
            "d2_window_half": list(self.d2_window_half),
            "resonance_window_half": list(self.resonance_window_half),
            "stability": self.stability,
            "n_triples": self.n_triples,
            "passed": self.passed,
            "notes": self.notes,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _window_drift(full: tuple[float, float], half: tuple[float, float]) -> float:
    drifts = []
    for a, b in zip(full, half):
        ref = max(abs(a), abs(b), 1e-300)
        drifts.append(abs(a - b) / ref)
    return max(drifts)


def _derivative_windows(spec: DispersionSpec, xi_max: int):
    xi = np.arange(1, xi_max + 1, dtype=np.float64)
    xi = xi[xi > spec.kappa]
    if xi.size == 0:
        raise ConfigurationError("no frequencies above kappa; increase xi_max")
    r1 = np.abs(_richardson_d1(spec, xi)) / xi**spec.alpha
    r2 = np.abs(_richardson_d2(spec, xi)) / xi ** (spec.alpha - 1.0)
    return (float(r1.min()), float(r1.max())), (float(r2.min()), float(r2.max()))


def check_conditions(spec: DispersionSpec, xi_max: int) -> ConditionReport:
    """Scan the two derivative comparisons and the resonance comparison.

    The report passes when every ratio window has a positive lower bound and
    finite upper bound, and no window endpoint moves by more than 10% when the
    scan box doubles from xi_max/2 to xi_max.
    """
    if xi_max < 4 * spec.kappa:
        raise ConfigurationError("xi_max must be at least 4*kappa")

    sample = np.arange(1.0, min(xi_max, 4096) + 1.0)
    odd_defect = float(
        np.max(np.abs(spec.omega_fn(sample) + spec.omega_fn(-sample)))
    )

    d1_half, d2_half = _derivative_windows(spec, xi_max // 2)
    d1_full, d2_full = _derivative_windows(spec, xi_max)
    res_half = resonance_ratio_window(spec, xi_max // 2)
    res_full = resonance_ratio_window(spec, xi_max)

    windows = [d1_full, d2_full, res_full[:2]]
    halves = [d1_half, d2_half, res_half[:2]]
    stability = max(_window_drift(w, h) for w, h in zip(windows, halves))

    positive = all(w[0] > 0 for w in windows)
    finite = all(np.isfinite(w[1]) for w in windows)
    passed = positive and finite and stability <= 0.10 and odd_defect <= 1e-9

    notes = []
    if spec.name.startswith("whitham"):
        notes.append("odd extension of the capillary symbol taken via sgn(xi)")

    return ConditionReport(
        name=spec.name,
        alpha=spec.alpha,
        kappa=spec.kappa,
        xi_max=xi_max,
        oddness_defect=odd_defect,
        d1_window=d1_full,
        d2_window=d2_full,
        resonance_window=res_full[:2],
        d1_window_half=d1_half,
        d2_window_half=d2_half,
        resonance_window_half=res_half[:2],
        stability=stability,
        n_triples=res_full[2],
        passed=passed,
        notes=notes,
    )
