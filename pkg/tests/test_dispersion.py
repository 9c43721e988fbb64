import numpy as np
import pytest

from dgbo.dispersion import (
    check_conditions,
    custom,
    fractional_bo,
    omega,
    resonance_ratio_window,
    whitham_capillary,
)
from dgbo.errors import AdmissibilityError, ConfigurationError


def test_omega_examples():
    assert omega(fractional_bo(1.0), 2) == -4.0
    assert omega(fractional_bo(0.5), 4) == -8.0
    for a in (0.25, 0.5, 0.75, 1.0):
        assert omega(fractional_bo(a), 0) == 0.0


def test_oddness_numerical():
    spec = whitham_capillary(1.0, 10.0)
    xs = np.concatenate([np.arange(1.0, 200.0), [0.3, 7.5, 1000.0]])
    assert np.max(np.abs(spec.omega_fn(xs) + spec.omega_fn(-xs))) <= 1e-12


def test_fractional_scaling():
    for a in (0.25, 0.6):
        spec = fractional_bo(a)
        xi = np.array([1.0, 3.0, 17.0, 250.0])
        for lam in (2.0, 5.5):
            lhs = spec.omega_fn(lam * xi)
            rhs = lam ** (1.0 + a) * spec.omega_fn(xi)
            assert np.max(np.abs(lhs - rhs) / np.abs(rhs)) <= 1e-12


def test_even_function_rejected():
    with pytest.raises(AdmissibilityError):
        custom(lambda xi: xi * xi, alpha=0.5, kappa=1.0)


def test_alpha_range():
    with pytest.raises(ConfigurationError):
        fractional_bo(0.0)
    with pytest.raises(ConfigurationError):
        fractional_bo(1.5)
    fractional_bo(1.0)  # classical BO endpoint is allowed


def test_bo_alpha1_derivative_window():
    rep = check_conditions(fractional_bo(1.0), 64)
    lo, hi = rep.d1_window
    assert lo == pytest.approx(2.0, abs=1e-8)
    assert hi == pytest.approx(2.0, abs=1e-8)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_fractional_conditions_pass(alpha):
    rep = check_conditions(fractional_bo(alpha), 128)
    assert rep.passed
    assert rep.d1_window[0] > 0 and np.isfinite(rep.d1_window[1])
    assert rep.d2_window[0] > 0
    assert rep.resonance_window[0] > 0
    # exact derivative ratios for the power law
    assert rep.d1_window[0] == pytest.approx(1.0 + alpha, rel=1e-6)
    assert rep.d2_window[1] == pytest.approx(alpha * (1.0 + alpha), rel=1e-2)


def test_whitham_passes_with_expected_exponent():
    rep = check_conditions(whitham_capillary(tau=1.0, kappa=10.0), 128)
    assert rep.passed
    assert rep.alpha == 0.5
    # omega ~ sqrt(tau)*|xi|^(3/2) for large xi, so |omega'|/|xi|^(1/2) -> 3/2
    assert rep.d1_window[1] == pytest.approx(1.5, rel=0.01)
    assert any("sgn" in note for note in rep.notes)


def test_xi_max_precondition():
    with pytest.raises(ConfigurationError):
        check_conditions(whitham_capillary(1.0, 10.0), 16)


def test_resonance_window_counts_triples():
    lo, hi, n = resonance_ratio_window(fractional_bo(0.5), 16)
    assert 0 < lo <= hi < np.inf
    # xi1 in 1..16, xi2 nonzero in [-16,16], xi3 derived: bounded above by 16*32
    assert 0 < n < 16 * 32


def test_report_serializes():
    rep = check_conditions(fractional_bo(0.5), 64)
    import json

    data = json.loads(rep.to_json())
    assert data["passed"] is True
    assert len(data["resonance_window"]) == 2
