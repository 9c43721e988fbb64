import numpy as np
import pytest

from dgbo.dispersion import fractional_bo
from dgbo.errors import ConfigurationError, DomainError
from dgbo.resonance import (
    BoundCase,
    BoundCaseKind,
    FrequencyTriple,
    a_prime_term,
    a_term,
    inv_resonance_gap,
    m_symbol,
    m_term,
    nu,
    resonance,
    shell,
    sigma,
    sigma_term,
    symbol_eval,
    worst_constant,
    _resonance_frac,
)


def omega_frac(alpha, xi):
    return -xi * abs(xi) ** alpha


class TestResonanceFunction:
    def test_examples(self):
        bo = fractional_bo(1.0)
        assert resonance(bo, FrequencyTriple(1, 1, -2)) == pytest.approx(2.0)
        assert resonance(bo, FrequencyTriple(3, -1, -2)) == pytest.approx(-4.0)
        half = fractional_bo(0.5)
        expect = omega_frac(0.5, 4) + omega_frac(0.5, -1) + omega_frac(0.5, -3)
        assert resonance(half, FrequencyTriple(4, -1, -3)) == pytest.approx(expect)
        assert expect == pytest.approx(-8 + 1 + 3 * np.sqrt(3), abs=1e-12)

    def test_triple_validation(self):
        with pytest.raises(DomainError):
            FrequencyTriple(0, 1, -1)
        with pytest.raises(DomainError):
            FrequencyTriple(1, 2, 3)
        assert FrequencyTriple(4, -1, -3).ordered_magnitudes() == (4, 3, 1)

    def test_permutation_and_oddness(self):
        spec = fractional_bo(0.6)
        rng = np.random.default_rng(0)
        for _ in range(200):
            a = int(rng.integers(1, 300))
            b = int(rng.integers(-300, 300)) or 7
            c = -(a + b)
            if c == 0:
                continue
            base = resonance(spec, FrequencyTriple(a, b, c))
            assert resonance(spec, FrequencyTriple(b, c, a)) == pytest.approx(
                base, abs=1e-12 * max(1, abs(base))
            )
            assert resonance(spec, FrequencyTriple(-a, -b, -c)) == pytest.approx(
                -base, abs=1e-12 * max(1, abs(base))
            )


class TestInverseResonanceGap:
    def test_zero_increment(self):
        assert inv_resonance_gap(1.0, 5, 0, -2, -3) == 0.0

    def test_direct_arithmetic_oracle(self):
        # alpha = 1, (xi_a, xi_b, xi2, xi3) = (40, 2, -45, 3)
        om1 = sum(omega_frac(1.0, v) for v in (40, -43, 3))
        om2 = sum(omega_frac(1.0, v) for v in (42, -45, 3))
        expect = abs(1 / om1 - 1 / om2)
        assert inv_resonance_gap(1.0, 40, 2, -45, 3) == pytest.approx(expect, rel=1e-14)

    def test_degenerate_rejected(self):
        with pytest.raises(DomainError):
            inv_resonance_gap(0.5, 5, -2, 2, -5)  # xi_2b = 0
        with pytest.raises(DomainError):
            inv_resonance_gap(0.5, 5, 1, -6, 0)
        with pytest.raises(DomainError):
            inv_resonance_gap(0.5, 5, 1, -2, -3)  # sum != 0


def random_admissible_quad(rng, kcap=9):
    """(k, xa, xb, x2, x3) in the high-low regime of the m-split."""
    while True:
        k1 = int(rng.integers(4, kcap))
        ka = k1 + int(rng.integers(-2, 3))
        k2 = k1 + int(rng.integers(-2, 3))
        kb = int(rng.integers(0, max(1, k2 - 3)))
        k3 = int(rng.integers(0, max(1, k1 - 3)))
        xb = int(rng.choice(shell(kb)))
        x2 = int(rng.choice(shell(k2)))
        x3 = int(rng.choice(shell(k3)))
        xa = -(xb + x2 + x3)
        if xa != 0 and xa + xb != 0 and x2 + xb != 0 and xa + x2 != 0:
            return (k1, ka, kb, k2, k3), xa, xb, x2, x3


class TestSymbolIdentities:
    def test_sigma_point_value(self):
        assert sigma_term(1, (5, 5, 2), 32, -36, 4) == pytest.approx(-4j)

    def test_sigma_split(self):
        rng = np.random.default_rng(1)
        worst = 0.0
        for _ in range(2000):
            k1 = int(rng.integers(3, 9))
            k2 = k1 + int(rng.integers(-2, 3))
            k3 = int(rng.integers(0, max(1, k1 - 3)))
            x1 = int(rng.choice(shell(k1)))
            x3 = int(rng.choice(shell(k3)))
            x2 = -(x1 + x3)
            if x2 == 0:
                continue
            k = (k1, k2, k3)
            lhs = sigma(k, x1, x2, x3) + sigma(k, x2, x1, x3)
            rhs = sum(sigma_term(j, k, x1, x2, x3) for j in (1, 2, 3))
            worst = max(worst, abs(lhs - rhs))
        assert worst <= 1e-12

    def test_m_split_and_m6(self):
        rng = np.random.default_rng(2)
        worst = 0.0
        for _ in range(2000):
            k, xa, xb, x2, x3 = random_admissible_quad(rng)
            for alpha in (0.25, 0.75):
                lhs = m_symbol(alpha, k, xa, xb, x2, x3) + m_symbol(
                    alpha, k, x2, xb, xa, x3
                )
                rhs = sum(m_term(j, alpha, k, xa, xb, x2, x3) for j in range(1, 6))
                worst = max(worst, abs(lhs - rhs))
                m6 = m_term(6, alpha, k, xa, xb, x2, x3)
                worst = max(worst, abs(m6 + m_symbol(alpha, k, x2, xb, xa, x3)))
        assert worst <= 1e-12

    def test_a_and_a_prime_split(self):
        rng = np.random.default_rng(3)
        worst = 0.0
        alpha = 0.5
        for _ in range(2000):
            (k1, _, _, _, k3), xa, xb, x2, x3 = random_admissible_quad(rng)
            k = (k1, k3)
            om_ab = _resonance_frac(alpha, xa + xb, x2, x3)
            lhs = (xa + xb) * nu(k, xa + xb, x2, x3) / om_ab + (
                x2 + xb
            ) * nu(k, xa, x2 + xb, x3) / _resonance_frac(alpha, xa, x2 + xb, x3)
            rhs = sum(a_term(i, alpha, k, xa, xb, x2, x3) for i in (1, 2, 3))
            worst = max(worst, abs(lhs - rhs))
            lhs2 = (xa + xb) * nu(k, xa + xb, x2, x3) / om_ab + (
                xa + x2
            ) * nu(k, xb, x2 + xa, x3) / _resonance_frac(alpha, xb, x2 + xa, x3)
            rhs2 = sum(a_prime_term(i, alpha, k, xa, xb, x2, x3) for i in (1, 2, 3))
            worst = max(worst, abs(lhs2 - rhs2))
        assert worst <= 1e-12


class TestSymbolEval:
    def test_pinned_evaluation(self):
        case = BoundCase(BoundCaseKind.SIGMA_J, alpha=0.5, member=1,
                         k_ranges=((5, 5), (5, 5), (2, 2)))
        assert symbol_eval(case, (32, -36, 4)) == pytest.approx(-4j)

    def test_requires_pinned_ranges(self):
        case = BoundCase(BoundCaseKind.SIGMA_J, alpha=0.5, member=1,
                         k_ranges=((4, 5), (5, 5), (2, 2)))
        with pytest.raises(ConfigurationError):
            symbol_eval(case, (32, -36, 4))

    def test_constraint_violations(self):
        case = BoundCase(BoundCaseKind.SIGMA_J, alpha=0.5, member=1,
                         k_ranges=((5, 5), (5, 5), (2, 2)))
        with pytest.raises(DomainError):
            symbol_eval(case, (32, -36, 5))  # not zero-sum
        with pytest.raises(DomainError):
            symbol_eval(case, (32, -32, 0))  # zero entry
        quad = BoundCase(BoundCaseKind.M_FAMILY, alpha=0.5, member=5,
                         k_ranges=((5, 5), (5, 5), (0, 0), (5, 5), (1, 1)))
        # degenerate embedded triple: xa + xb = 0
        with pytest.raises(DomainError):
            symbol_eval(quad, (-1, 1, 33, -33))

    def test_bad_ranges_rejected(self):
        with pytest.raises(ConfigurationError):
            BoundCase(BoundCaseKind.SIGMA_J, alpha=0.5, member=1,
                      k_ranges=((5, 5), (5, 5)))
        with pytest.raises(ConfigurationError):
            # k3 range cannot satisfy k1 >> k3
            BoundCase(BoundCaseKind.SIGMA_J, alpha=0.5, member=1,
                      k_ranges=((3, 3), (3, 3), (2, 5)))
        with pytest.raises(ConfigurationError):
            BoundCase(BoundCaseKind.M_FAMILY, alpha=0.5, member=7,
                      k_ranges=((5, 5), (5, 5), (0, 0), (5, 5), (1, 1)))


class TestWorstConstant:
    def test_zero_family(self):
        # k1 two above k2 = ka: every attainable |xi_ab| and |xi_2b| sits
        # below supp chi_k1, so all cutoff products vanish on the range
        case = BoundCase(BoundCaseKind.M_FAMILY, alpha=0.5, member=1,
                         k_ranges=((8, 8), (6, 6), (0, 0), (6, 6), (0, 0)))
        rep = worst_constant(case)
        assert rep.max_ratio == 0.0

    def test_sigma1_stability(self):
        reps = {}
        for top in (7, 8):
            case = BoundCase(BoundCaseKind.SIGMA_J, alpha=0.5, member=1,
                             k_ranges=((3, top), (3, top), (0, top - 3)))
            reps[top] = worst_constant(case)
        m7, m8 = reps[7].max_ratio, reps[8].max_ratio
        assert 0 < m7 and 0 < m8
        assert abs(m8 - m7) / m7 <= 0.10
        assert reps[8].trend_slope <= 0.05

    def test_resonance_window(self):
        case = BoundCase(BoundCaseKind.RESONANCE_ASYMPTOTIC, alpha=0.5,
                         k_ranges=((0, 6), (0, 6), (0, 6)))
        rep = worst_constant(case)
        assert rep.min_ratio is not None and rep.min_ratio > 0
        assert np.isfinite(rep.max_ratio)
        assert rep.argmin is not None and rep.argmax is not None

    def test_inv_resonance_trend(self):
        case = BoundCase(BoundCaseKind.INV_RESONANCE_DIFF, alpha=0.5,
                         k_ranges=((3, 7), (0, 7), (3, 7), (0, 4)))
        rep = worst_constant(case, budget=500_000, seed=0)
        assert np.isfinite(rep.max_ratio)
        assert rep.subsampled

    @pytest.mark.parametrize("kind,member", [
        (BoundCaseKind.M_FAMILY, 1),
        (BoundCaseKind.M_FAMILY, 5),
        (BoundCaseKind.A_FAMILY, 2),
        (BoundCaseKind.A_PRIME_FAMILY, 3),
    ])
    def test_family_scale_stability(self, kind, member):
        # pinned diagonal family: the high slots move together while the low
        # slots stay fixed, the direction the bounds must control
        maxima = []
        for K in range(4, 11):
            if kind is BoundCaseKind.A_PRIME_FAMILY:
                # mirrored regime: xi_b ~ xi_2 >> xi_a
                ranges = ((K, K), (0, 1), (K, K), (K, K), (0, 1))
            else:
                ranges = ((K, K), (K, K), (0, 1), (K, K), (0, 1))
            case = BoundCase(kind, alpha=0.5, member=member, k_ranges=ranges)
            rep = worst_constant(case, budget=2_000_000, seed=0)
            maxima.append(rep.max_ratio)
        maxima = np.array(maxima)
        assert np.all(np.isfinite(maxima)) and maxima.max() > 0
        upper = maxima[maxima.shape[0] // 2:]
        ks = np.arange(4, 11)[maxima.shape[0] // 2:]
        slope = np.polyfit(ks[upper > 0], np.log2(upper[upper > 0]), 1)[0]
        assert slope <= 0.05

    def test_budget_enforced(self):
        case = BoundCase(BoundCaseKind.SIGMA_J, alpha=0.5, member=1,
                         k_ranges=((3, 8), (3, 8), (0, 5)))
        from dgbo.errors import ResourceError

        with pytest.raises(ResourceError):
            worst_constant(case, budget=1000, allow_subsample=False)

    def test_subsample_deterministic(self):
        case = BoundCase(BoundCaseKind.INV_RESONANCE_DIFF, alpha=0.5,
                         k_ranges=((3, 7), (0, 7), (3, 7), (0, 4)))
        r1 = worst_constant(case, budget=200_000, seed=42)
        r2 = worst_constant(case, budget=200_000, seed=42)
        assert r1.max_ratio == r2.max_ratio
        assert r1.argmax == r2.argmax

    def test_report_serializes(self):
        import json

        case = BoundCase(BoundCaseKind.NU_SYMBOL, alpha=0.5,
                         k_ranges=((5, 6), (0, 2)))
        rep = worst_constant(case)
        data = json.loads(rep.to_json())
        assert data["case_kind"] == "nu-symbol"
        assert data["n_tuples"] > 0
