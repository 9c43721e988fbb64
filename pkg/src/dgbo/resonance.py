"""Resonance function, inverse-resonance differences and the cutoff symbol
families used in the energy estimates, together with a brute-force verifier
for their stated majorants.

All symbols below are built from the dyadic cutoffs chi_k and the fractional
dispersion omega(xi) = -xi*|xi|^alpha.  The verifier never asserts a specific
implicit constant: it reports the observed ratio (symbol magnitude over
majorant) per dyadic scale and checks that the ratios show no growth trend as
the scales increase.

Dyadic comparisons follow the convention used throughout: k ~ k' means
|k - k'| < 3, k >> k' means k - k' >= 3, and k >~ k' means k >= k' - 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from enum import Enum
from functools import lru_cache

import numpy as np

from .dispersion import DispersionSpec
from .errors import ConfigurationError, DomainError, ResourceError
from .littlewood_paley import BumpProfile, DEFAULT_BUMP, chi_k

DEFAULT_BUDGET = 10_000_000


# ---------------------------------------------------------------------------
# resonance function


@dataclass(frozen=True)
class FrequencyTriple:
    """Nonzero integer frequencies with xi1 + xi2 + xi3 = 0."""

    xi1: int
    xi2: int
    xi3: int

    def __post_init__(self):
        if self.xi1 == 0 or self.xi2 == 0 or self.xi3 == 0:
            raise DomainError("frequency triple must have nonzero entries")
        if self.xi1 + self.xi2 + self.xi3 != 0:
            raise DomainError("frequency triple must sum to zero")

    def ordered_magnitudes(self) -> tuple[int, int, int]:
        """(|xi_1*|, |xi_2*|, |xi_3*|) with |xi_1*| >= |xi_2*| >= |xi_3*|."""
        mags = sorted((abs(self.xi1), abs(self.xi2), abs(self.xi3)), reverse=True)
        return tuple(mags)


def resonance(spec: DispersionSpec, triple: FrequencyTriple) -> float:
    """Omega(xi1, xi2, xi3) = omega(xi1) + omega(xi2) + omega(xi3)."""
    return float(
        spec.omega_fn(np.array([triple.xi1, triple.xi2, triple.xi3], dtype=float)).sum()
    )


def _omega_frac(alpha: float, xi):
    xi = np.asarray(xi, dtype=np.float64)
    return -xi * np.abs(xi) ** alpha


def _resonance_frac(alpha, x1, x2, x3):
    return _omega_frac(alpha, x1) + _omega_frac(alpha, x2) + _omega_frac(alpha, x3)


def inv_resonance_gap(alpha: float, xi_a: int, xi_b: int, xi2: int, xi3: int) -> float:
    """|1/Omega(xi_a, xi_2 + xi_b, xi_3) - 1/Omega(xi_a + xi_b, xi_2, xi_3)|.

    Requires xi_a + xi_b + xi2 + xi3 = 0 and both embedded triples to have
    nonzero entries (a zero entry makes Omega vanish).  For xi_b = 0 the two
    triples coincide and the difference is exactly zero.
    """
    if xi_a + xi_b + xi2 + xi3 != 0:
        raise DomainError("frequencies must sum to zero")
    xi_2b = xi2 + xi_b
    xi_ab = xi_a + xi_b
    for entry in (xi_a, xi_2b, xi3, xi_ab, xi2):
        if entry == 0:
            raise DomainError("degenerate triple: zero entry makes Omega vanish")
    om1 = _resonance_frac(alpha, xi_a, xi_2b, xi3)
    om2 = _resonance_frac(alpha, xi_ab, xi2, xi3)
    return float(abs(1.0 / om1 - 1.0 / om2))


# ---------------------------------------------------------------------------
# dyadic shells and comparisons


@lru_cache(maxsize=None)
def shell(k: int) -> np.ndarray:
    """Integer frequencies in the support of chi_k (both signs, no zero)."""
    if k < 0:
        raise ConfigurationError("dyadic index must be >= 0")
    if k == 0:
        pos = np.array([1], dtype=np.int64)
    else:
        lo = int(np.floor(5.0 * 2.0**k / 8.0)) + 1
        hi = int(np.ceil(8.0 * 2.0**k / 5.0)) - 1
        pos = np.arange(lo, hi + 1, dtype=np.int64)
    return np.concatenate([-pos[::-1], pos])


def dyadic_similar(k1: int, k2: int) -> bool:
    return abs(k1 - k2) < 3


def dyadic_much_greater(k1: int, k2: int) -> bool:
    return k1 - k2 >= 3


def dyadic_gtrsim(k1: int, k2: int) -> bool:
    return k1 >= k2 - 2


# ---------------------------------------------------------------------------
# symbol families (all vectorized over frequency arrays)


def _chi(k, xi, profile):
    return chi_k(k, np.asarray(xi, dtype=np.float64), profile)


def sigma(k, xi1, xi2, xi3, profile: BumpProfile = DEFAULT_BUMP):
    """Energy-identity symbol i*xi1 * chi_k1^2(xi1) chi_k2(xi2) chi_k3(xi3)."""
    k1, k2, k3 = k
    return (
        1j
        * np.asarray(xi1, dtype=np.float64)
        * _chi(k1, xi1, profile) ** 2
        * _chi(k2, xi2, profile)
        * _chi(k3, xi3, profile)
    )


def sigma_term(j, k, xi1, xi2, xi3, profile: BumpProfile = DEFAULT_BUMP):
    """Term j of the low-frequency shift sigma(1,2,3) + sigma(2,1,3) = s1+s2+s3."""
    k1, k2, k3 = k
    x1 = np.asarray(xi1, dtype=np.float64)
    x2 = np.asarray(xi2, dtype=np.float64)
    x3 = np.asarray(xi3, dtype=np.float64)
    c3 = _chi(k3, x3, profile)
    if j == 1:
        return -1j * x3 * _chi(k1, x1, profile) ** 2 * _chi(k2, x2, profile) * c3
    if j == 2:
        return (
            -1j
            * x2
            * (_chi(k1, x1, profile) ** 2 - _chi(k1, x2, profile) ** 2)
            * _chi(k2, x2, profile)
            * c3
        )
    if j == 3:
        return (
            -1j
            * x2
            * _chi(k1, x2, profile) ** 2
            * (_chi(k2, x2, profile) - _chi(k2, x1, profile))
            * c3
        )
    raise ConfigurationError("sigma split index must be 1, 2 or 3")


def nu(k, xi1, xi2, xi3, profile: BumpProfile = DEFAULT_BUMP):
    """Commutator symbol xi2 chi_k1(xi1) [chi_k1(xi2+xi3) - chi_k1(xi2)] chi_k3(xi3)."""
    k1, k3 = k
    x2 = np.asarray(xi2, dtype=np.float64)
    x23 = x2 + np.asarray(xi3, dtype=np.float64)
    return (
        x2
        * _chi(k1, xi1, profile)
        * (_chi(k1, x23, profile) - _chi(k1, x2, profile))
        * _chi(k3, xi3, profile)
    )


def m_symbol(alpha, k, xi_a, xi_b, xi2, xi3, profile: BumpProfile = DEFAULT_BUMP):
    """Resonance-weighted quadrilinear symbol for the high-low energy case.

    k = (k1, ka, kb, k2, k3).  Callers must keep xi_a + xi_b nonzero so the
    embedded resonance is defined.
    """
    k1, ka, kb, k2, k3 = k
    xa = np.asarray(xi_a, dtype=np.float64)
    xb = np.asarray(xi_b, dtype=np.float64)
    x2 = np.asarray(xi2, dtype=np.float64)
    x3 = np.asarray(xi3, dtype=np.float64)
    xab = xa + xb
    om = _resonance_frac(alpha, xab, x2, x3)
    return (
        (-1j * xab)
        * _chi(k1, xab, profile) ** 2
        * _chi(ka, xa, profile)
        * _chi(k2, x2, profile)
        / om
        * (-1j * x3)
        * _chi(k3, x3, profile)
        * _chi(kb, xb, profile)
    )


def m_term(j, alpha, k, xi_a, xi_b, xi2, xi3, profile: BumpProfile = DEFAULT_BUMP):
    """Summand j in m(a,b,2,3) + m(2,b,a,3) = m_1 + ... + m_5 (m_6 = -m(2,b,a,3))."""
    k1, ka, kb, k2, k3 = k
    xa = np.asarray(xi_a, dtype=np.float64)
    xb = np.asarray(xi_b, dtype=np.float64)
    x2 = np.asarray(xi2, dtype=np.float64)
    x3 = np.asarray(xi3, dtype=np.float64)
    xab = xa + xb
    x2b = x2 + xb
    tail = (-1j * x3) * _chi(k3, x3, profile) * _chi(kb, xb, profile)
    om1 = _resonance_frac(alpha, xab, x2, x3)
    if j == 1:
        return (
            1j
            * (x3 - xb)
            * _chi(k1, xab, profile) ** 2
            * _chi(ka, xa, profile)
            * _chi(k2, x2, profile)
            / om1
            * tail
        )
    if j == 2:
        return (
            1j
            * x2b
            * (_chi(k1, xab, profile) ** 2 - _chi(k1, x2b, profile) ** 2)
            * _chi(ka, xa, profile)
            * _chi(k2, x2, profile)
            / om1
            * tail
        )
    if j == 3:
        return (
            1j
            * x2b
            * _chi(k1, x2b, profile) ** 2
            * (_chi(ka, xa, profile) - _chi(ka, x2, profile))
            * _chi(k2, x2, profile)
            / om1
            * tail
        )
    if j == 4:
        return (
            1j
            * x2b
            * _chi(k1, x2b, profile) ** 2
            * _chi(ka, x2, profile)
            * (_chi(k2, x2, profile) - _chi(k2, xa, profile))
            / om1
            * tail
        )
    om2 = _resonance_frac(alpha, x2b, xa, x3)
    if j == 5:
        return (
            1j
            * x2b
            * _chi(k1, x2b, profile) ** 2
            * _chi(ka, x2, profile)
            * _chi(k2, xa, profile)
            * (1.0 / om1 - 1.0 / om2)
            * tail
        )
    if j == 6:
        return (
            1j
            * x2b
            * _chi(k1, x2b, profile) ** 2
            * _chi(ka, x2, profile)
            * _chi(k2, xa, profile)
            / om2
            * tail
        )
    raise ConfigurationError("m split index must be in 1..6")


def a_term(i, alpha, k, xi_a, xi_b, xi2, xi3, profile: BumpProfile = DEFAULT_BUMP):
    """Summand i of the symmetrized commutator symbol:

    xi_ab*(nu/Omega)(xi_ab, xi2, xi3) + xi_2b*(nu/Omega)(xi_a, xi_2b, xi3)
        = A_1 + A_2 + A_3,

    with nu carrying the dyadic parameters (k1, k3) from k = (k1, k3).
    """
    k1, k3 = k
    xa = np.asarray(xi_a, dtype=np.float64)
    xb = np.asarray(xi_b, dtype=np.float64)
    x2 = np.asarray(xi2, dtype=np.float64)
    x3 = np.asarray(xi3, dtype=np.float64)
    xab = xa + xb
    x2b = x2 + xb
    om1 = _resonance_frac(alpha, xab, x2, x3)
    if i == 1:
        return (xb - x3) * nu((k1, k3), xab, x2, x3, profile) / om1
    if i == 2:
        return (
            x2b
            * (nu((k1, k3), xa, x2b, x3, profile) - nu((k1, k3), xab, x2, x3, profile))
            / om1
        )
    if i == 3:
        om2 = _resonance_frac(alpha, xa, x2b, x3)
        return x2b * nu((k1, k3), xa, x2b, x3, profile) * (1.0 / om2 - 1.0 / om1)
    raise ConfigurationError("A split index must be 1, 2 or 3")


def a_prime_term(i, alpha, k, xi_a, xi_b, xi2, xi3, profile: BumpProfile = DEFAULT_BUMP):
    """Summand i of the mirror-symmetrized commutator symbol:

    xi_ab*(nu/Omega)(xi_ab, xi2, xi3) + xi_a2*(nu/Omega)(xi_b, xi_2a, xi3)
        = A'_1 + A'_2 + A'_3.
    """
    k1, k3 = k
    xa = np.asarray(xi_a, dtype=np.float64)
    xb = np.asarray(xi_b, dtype=np.float64)
    x2 = np.asarray(xi2, dtype=np.float64)
    x3 = np.asarray(xi3, dtype=np.float64)
    xab = xa + xb
    xa2 = xa + x2
    x2a = x2 + xa
    om1 = _resonance_frac(alpha, xab, x2, x3)
    if i == 1:
        return (xa - x3) * nu((k1, k3), xab, x2, x3, profile) / om1
    if i == 2:
        return (
            xa2
            * (nu((k1, k3), xb, x2a, x3, profile) - nu((k1, k3), xab, x2, x3, profile))
            / om1
        )
    if i == 3:
        om2 = _resonance_frac(alpha, xb, x2a, x3)
        return xa2 * nu((k1, k3), xb, x2a, x3, profile) * (1.0 / om2 - 1.0 / om1)
    raise ConfigurationError("A' split index must be 1, 2 or 3")


# ---------------------------------------------------------------------------
# bound cases and the brute-force verifier


class BoundCaseKind(Enum):
    RESONANCE_ASYMPTOTIC = "resonance-asymptotic"
    INV_RESONANCE_DIFF = "inverse-resonance-difference"
    SIGMA_J = "sigma-split"
    M_FAMILY = "m-split"
    A_FAMILY = "a-split"
    A_PRIME_FAMILY = "a-prime-split"
    NU_SYMBOL = "nu-symbol"


_SLOT_NAMES = {
    BoundCaseKind.RESONANCE_ASYMPTOTIC: ("k1", "k2", "k3"),
    BoundCaseKind.INV_RESONANCE_DIFF: ("ka", "kb", "k2", "k3"),
    BoundCaseKind.SIGMA_J: ("k1", "k2", "k3"),
    BoundCaseKind.M_FAMILY: ("k1", "ka", "kb", "k2", "k3"),
    BoundCaseKind.A_FAMILY: ("k1", "ka", "kb", "k2", "k3"),
    BoundCaseKind.A_PRIME_FAMILY: ("k1", "ka", "kb", "k2", "k3"),
    BoundCaseKind.NU_SYMBOL: ("k1", "k3"),
}

_MEMBER_RANGE = {
    BoundCaseKind.RESONANCE_ASYMPTOTIC: (0, 0),
    BoundCaseKind.INV_RESONANCE_DIFF: (0, 0),
    BoundCaseKind.SIGMA_J: (1, 3),
    BoundCaseKind.M_FAMILY: (1, 5),
    BoundCaseKind.A_FAMILY: (1, 3),
    BoundCaseKind.A_PRIME_FAMILY: (1, 3),
    BoundCaseKind.NU_SYMBOL: (0, 0),
}


def _admissible(kind: BoundCaseKind, ks: dict[str, int]) -> bool:
    if kind in (BoundCaseKind.RESONANCE_ASYMPTOTIC,):
        return True
    if kind is BoundCaseKind.INV_RESONANCE_DIFF:
        return (
            dyadic_similar(ks["k2"], ks["ka"])
            and dyadic_much_greater(ks["k2"], ks["k3"])
            and dyadic_much_greater(ks["ka"], ks["k3"])
            and dyadic_gtrsim(ks["k2"], ks["kb"])
        )
    if kind is BoundCaseKind.SIGMA_J:
        return (
            dyadic_similar(ks["k1"], ks["k2"])
            and dyadic_much_greater(ks["k1"], ks["k3"])
            and dyadic_much_greater(ks["k2"], ks["k3"])
        )
    if kind is BoundCaseKind.NU_SYMBOL:
        return dyadic_much_greater(ks["k1"], ks["k3"])
    if kind is BoundCaseKind.M_FAMILY:
        return (
            dyadic_similar(ks["k1"], ks["k2"])
            and dyadic_similar(ks["k2"], ks["ka"])
            and dyadic_much_greater(ks["k2"], ks["kb"])
            and dyadic_much_greater(ks["k1"], ks["k3"])
        )
    if kind is BoundCaseKind.A_FAMILY:
        return (
            dyadic_similar(ks["k1"], ks["k2"])
            and dyadic_similar(ks["k2"], ks["ka"])
            and dyadic_gtrsim(ks["k2"], ks["kb"])
            and dyadic_much_greater(ks["k1"], ks["k3"])
        )
    if kind is BoundCaseKind.A_PRIME_FAMILY:
        return (
            dyadic_similar(ks["k1"], ks["k2"])
            and dyadic_similar(ks["k2"], ks["kb"])
            and dyadic_much_greater(ks["k2"], ks["ka"])
            and dyadic_much_greater(ks["k1"], ks["k3"])
        )
    raise ConfigurationError(f"unknown bound case kind {kind}")


@dataclass(frozen=True)
class BoundCase:
    """A verifiable inequality: a symbol family member, per-slot dyadic ranges
    and the fractional exponent.

    ``k_ranges`` maps slot names (see slot_names) to inclusive (low, high)
    dyadic ranges; a degenerate range pins the slot, which is required by
    :func:`symbol_eval`.
    """

    kind: BoundCaseKind
    alpha: float
    k_ranges: tuple[tuple[int, int], ...]
    member: int = 0
    profile: BumpProfile = dc_field(default=DEFAULT_BUMP, repr=False)

    def __post_init__(self):
        names = _SLOT_NAMES[self.kind]
        if len(self.k_ranges) != len(names):
            raise ConfigurationError(
                f"{self.kind.value} needs ranges for slots {names}"
            )
        lo, hi = _MEMBER_RANGE[self.kind]
        if not lo <= self.member <= hi:
            raise ConfigurationError(
                f"member index {self.member} invalid for {self.kind.value}"
            )
        for lo_k, hi_k in self.k_ranges:
            if lo_k < 0 or hi_k < lo_k:
                raise ConfigurationError(f"bad dyadic range ({lo_k}, {hi_k})")
        if not any(True for _ in self.assignments()):
            raise ConfigurationError(
                "dyadic ranges admit no assignment satisfying the case's "
                "ordering constraints"
            )

    @property
    def slot_names(self) -> tuple[str, ...]:
        return _SLOT_NAMES[self.kind]

    def assignments(self):
        """All dyadic assignments within the ranges satisfying the constraints."""
        names = self.slot_names
        grids = [range(lo, hi + 1) for lo, hi in self.k_ranges]

        def rec(i, current):
            if i == len(names):
                if _admissible(self.kind, current):
                    yield dict(current)
                return
            for k in grids[i]:
                current[names[i]] = k
                yield from rec(i + 1, current)
            current.pop(names[i], None)

        yield from rec(0, {})

    def pinned(self) -> dict[str, int]:
        if any(lo != hi for lo, hi in self.k_ranges):
            raise ConfigurationError(
                "symbol evaluation requires pinned (degenerate) dyadic ranges"
            )
        return dict(zip(self.slot_names, (lo for lo, _ in self.k_ranges)))


def _eval_case(case: BoundCase, ks: dict[str, int], xis: tuple):
    """(lhs magnitude, rhs majorant) arrays for one dyadic assignment.

    Frequencies arrive as equal-length integer arrays in the slot order of
    the case's frequency tuple; entries violating zero-sum or degeneracy must
    be filtered by the caller.
    """
    kind, alpha, member, prof = case.kind, case.alpha, case.member, case.profile
    if kind is BoundCaseKind.RESONANCE_ASYMPTOTIC:
        x1, x2, x3 = xis
        mags = np.stack([np.abs(x1), np.abs(x2), np.abs(x3)])
        lhs = np.abs(_resonance_frac(alpha, x1, x2, x3))
        rhs = mags.max(axis=0) ** alpha * mags.min(axis=0)
        return lhs, rhs
    if kind is BoundCaseKind.INV_RESONANCE_DIFF:
        xa, xb, x2, x3 = xis
        x2b = x2 + xb
        xab = xa + xb
        om1 = _resonance_frac(alpha, xa, x2b, x3)
        om2 = _resonance_frac(alpha, xab, x2, x3)
        lhs = np.abs(1.0 / om1 - 1.0 / om2)
        k1 = max(ks["ka"], ks["k2"])
        rhs = 2.0 ** (-k1 * (1.0 + alpha) - ks["k3"] + ks["kb"])
        return lhs, np.full_like(lhs, rhs)
    if kind is BoundCaseKind.SIGMA_J:
        x1, x2, x3 = xis
        k = (ks["k1"], ks["k2"], ks["k3"])
        lhs = np.abs(sigma_term(member, k, x1, x2, x3, prof))
        return lhs, np.full_like(lhs, 2.0 ** ks["k3"])
    if kind is BoundCaseKind.NU_SYMBOL:
        x1, x2, x3 = xis
        lhs = np.abs(nu((ks["k1"], ks["k3"]), x1, x2, x3, prof))
        return lhs, np.full_like(lhs, 2.0 ** ks["k3"])
    if kind is BoundCaseKind.M_FAMILY:
        xa, xb, x2, x3 = xis
        k = (ks["k1"], ks["ka"], ks["kb"], ks["k2"], ks["k3"])
        lhs = np.abs(m_term(member, alpha, k, xa, xb, x2, x3, prof))
        rhs = 2.0 ** (max(ks["k3"], ks["kb"]) - ks["k2"] * alpha)
        return lhs, np.full_like(lhs, rhs)
    if kind is BoundCaseKind.A_FAMILY:
        xa, xb, x2, x3 = xis
        lhs = np.abs(a_term(member, alpha, (ks["k1"], ks["k3"]), xa, xb, x2, x3, prof))
        rhs = 2.0 ** (max(ks["k3"], ks["kb"]) - ks["k2"] * alpha)
        return lhs, np.full_like(lhs, rhs)
    if kind is BoundCaseKind.A_PRIME_FAMILY:
        xa, xb, x2, x3 = xis
        lhs = np.abs(
            a_prime_term(member, alpha, (ks["k1"], ks["k3"]), xa, xb, x2, x3, prof)
        )
        rhs = 2.0 ** (max(ks["k3"], ks["ka"]) - ks["k2"] * alpha)
        return lhs, np.full_like(lhs, rhs)
    raise ConfigurationError(f"unknown bound case kind {kind}")


def symbol_eval(case: BoundCase, frequencies) -> complex:
    """Evaluate the case's symbol at one frequency tuple (pinned ranges only).

    Frequency order: triples are (xi1, xi2, xi3); quadruples (xi_a, xi_b,
    xi2, xi3).  Raises DomainError when the zero-sum constraint fails or an
    embedded resonance argument vanishes.
    """
    ks = case.pinned()
    xis = tuple(int(x) for x in frequencies)
    expected = 3 if case.kind in (
        BoundCaseKind.RESONANCE_ASYMPTOTIC,
        BoundCaseKind.SIGMA_J,
        BoundCaseKind.NU_SYMBOL,
    ) else 4
    if len(xis) != expected:
        raise DomainError(f"{case.kind.value} expects {expected} frequencies")
    if sum(xis) != 0:
        raise DomainError("frequencies must sum to zero")
    if any(x == 0 for x in xis):
        raise DomainError("frequencies must be nonzero")
    prof = case.profile
    if case.kind is BoundCaseKind.RESONANCE_ASYMPTOTIC:
        return complex(_resonance_frac(case.alpha, *map(float, xis)))
    if case.kind is BoundCaseKind.SIGMA_J:
        k = (ks["k1"], ks["k2"], ks["k3"])
        return complex(sigma_term(case.member, k, *xis, prof))
    if case.kind is BoundCaseKind.NU_SYMBOL:
        return complex(nu((ks["k1"], ks["k3"]), *xis, prof))
    xa, xb, x2, x3 = xis
    if case.kind is BoundCaseKind.INV_RESONANCE_DIFF:
        return complex(inv_resonance_gap(case.alpha, xa, xb, x2, x3))
    if case.kind is BoundCaseKind.M_FAMILY:
        if xa + xb == 0 or (case.member >= 5 and x2 + xb == 0):
            raise DomainError("degenerate embedded triple in m symbol")
        k = (ks["k1"], ks["ka"], ks["kb"], ks["k2"], ks["k3"])
        return complex(m_term(case.member, case.alpha, k, xa, xb, x2, x3, prof))
    if case.kind is BoundCaseKind.A_FAMILY:
        if xa + xb == 0 or (case.member == 3 and x2 + xb == 0):
            raise DomainError("degenerate embedded triple in A symbol")
        return complex(
            a_term(case.member, case.alpha, (ks["k1"], ks["k3"]), xa, xb, x2, x3, prof)
        )
    if case.kind is BoundCaseKind.A_PRIME_FAMILY:
        if xa + xb == 0 or (case.member == 3 and x2 + xa == 0):
            raise DomainError("degenerate embedded triple in A' symbol")
        return complex(
            a_prime_term(
                case.member, case.alpha, (ks["k1"], ks["k3"]), xa, xb, x2, x3, prof
            )
        )
    raise ConfigurationError(f"unknown bound case kind {case.kind}")


def _shell_bounds(k: int) -> tuple[float, float]:
    if k == 0:
        return 0.0, 8.0 / 5.0
    return 5.0 * 2.0**k / 8.0, 8.0 * 2.0**k / 5.0


@lru_cache(maxsize=None)
def _wide_shell(k: int) -> np.ndarray:
    """Integers within a factor-2 widening of shell(k); covers the cross
    terms of the split symbols, whose cutoff factors can sit on neighbouring
    slots of the zero-sum tuple."""
    lo = int(np.floor(5.0 * 2.0**k / 16.0))
    hi = int(np.ceil(16.0 * 2.0**k / 5.0)) - 1
    pos = np.arange(max(lo, 1), hi + 1, dtype=np.int64)
    return np.concatenate([-pos[::-1], pos])


def _axes(case: BoundCase, ks: dict[str, int]) -> tuple[np.ndarray, ...]:
    """Free enumeration axes for one dyadic assignment.

    The remaining slot is derived from the zero-sum constraint inside
    :func:`_decode`; symbols carry their own cutoffs, so a derived slot needs
    no shell restriction except where the case's hypotheses demand one
    (inverse-resonance difference) or the scan is a box scan (resonance).
    """
    kind = case.kind
    if kind is BoundCaseKind.SIGMA_J:
        return (_wide_shell(ks["k1"]), shell(ks["k3"]))
    if kind is BoundCaseKind.NU_SYMBOL:
        return (shell(ks["k1"]), shell(ks["k3"]))
    if kind is BoundCaseKind.RESONANCE_ASYMPTOTIC:
        return (shell(ks["k1"]), shell(ks["k2"]))
    return (shell(ks["kb"]), shell(ks["k2"]), shell(ks["k3"]))


def _decode(case: BoundCase, ks: dict[str, int], axes, idx: np.ndarray):
    """Map flat candidate indices to frequency arrays, dropping invalid ones."""
    kind = case.kind
    if len(axes) == 2:
        n1 = axes[1].shape[0]
        x1 = axes[0][idx // n1]
        xo = axes[1][idx % n1]
        if kind is BoundCaseKind.RESONANCE_ASYMPTOTIC:
            x2 = xo
            x3 = -(x1 + x2)
            smin, smax = _shell_bounds(ks["k3"])
            mask = (np.abs(x3) > smin) & (np.abs(x3) < smax)
            return (x1[mask], x2[mask], x3[mask])
        x3 = xo
        x2 = -(x1 + x3)
        mask = x2 != 0
        return (x1[mask], x2[mask], x3[mask])
    nb, n2, n3 = (a.shape[0] for a in axes)
    xb = axes[0][idx // (n2 * n3)]
    x2 = axes[1][(idx // n3) % n2]
    x3 = axes[2][idx % n3]
    xa = -(xb + x2 + x3)
    # the quadrilinear sums localize every slot, so the derived frequency is
    # confined to its shell as well (the sup runs over supp chi_{k_a})
    amin, amax = _shell_bounds(ks["ka"])
    mask = (np.abs(xa) > amin) & (np.abs(xa) < amax)
    mask &= (xa != 0) & ((xa + xb) != 0)
    if kind is BoundCaseKind.INV_RESONANCE_DIFF:
        mask &= (x2 + xb) != 0
    if kind is BoundCaseKind.M_FAMILY and case.member >= 5:
        mask &= (x2 + xb) != 0
    if kind is BoundCaseKind.A_FAMILY and case.member == 3:
        mask &= (x2 + xb) != 0
    if kind is BoundCaseKind.A_PRIME_FAMILY and case.member == 3:
        mask &= (x2 + xa) != 0
    return (xa[mask], xb[mask], x2[mask], x3[mask])


@dataclass
class ConstantReport:
    """Observed worst constants for one bound case."""

    case_kind: str
    member: int
    alpha: float
    k_ranges: list[list[int]]
    max_ratio: float
    argmax: dict
    min_ratio: float | None
    argmin: dict | None
    per_scale_max: list[tuple[int, float, int]]
    stability_delta: float | None
    trend_slope: float | None
    n_tuples: int
    n_assignments: int
    subsampled: bool
    seed: int
    budget: int

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["per_scale_max"] = [list(t) for t in self.per_scale_max]
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _trend_slope(scales: np.ndarray, maxima: np.ndarray) -> float | None:
    """Least-squares slope of log2(max ratio) vs scale, fitted on the upper
    half of the scanned scales.  The smallest scales are dominated by integer
    coarseness (the worst frequency constellations do not fit in a shell of a
    handful of integers), so they carry a rising transient that says nothing
    about the asymptotic trend the bounds control."""
    mask = maxima > 0
    if mask.sum() < 2:
        return None
    x = scales[mask].astype(float)
    y = np.log2(maxima[mask])
    n = x.shape[0]
    keep = max(n // 2, min(n, 3))
    return float(np.polyfit(x[-keep:], y[-keep:], 1)[0])


def worst_constant(
    case: BoundCase,
    budget: int = DEFAULT_BUDGET,
    allow_subsample: bool = True,
    seed: int = 0,
) -> ConstantReport:
    """Scan the case's admissible tuples and report observed LHS/RHS ratios.

    Enumeration is lexicographic and deterministic; when the total tuple
    count exceeds ``budget``, per-assignment populations are subsampled
    uniformly (with replacement) by a generator seeded with ``seed``, which
    is recorded in the report.  The scale of an assignment is its largest
    dyadic index; the stability delta compares the two largest scanned
    scales.
    """
    assignments = list(case.assignments())
    all_axes = [_axes(case, ks) for ks in assignments]
    sizes = np.array(
        [int(np.prod([a.shape[0] for a in axes])) for axes in all_axes],
        dtype=np.int64,
    )
    total = int(sizes.sum())
    subsampled = total > budget
    if subsampled and not allow_subsample:
        raise ResourceError(
            f"scan would evaluate {total} tuples, over the budget of {budget}"
        )
    rng = np.random.default_rng(seed)

    quota = sizes.copy()
    if subsampled:
        # exact small assignments keep their tuples; the rest share the leftover
        order = np.argsort(sizes)
        remaining = budget
        remaining_count = len(sizes)
        quota = np.zeros_like(sizes)
        for idx in order:
            share = remaining // max(remaining_count, 1)
            quota[idx] = min(sizes[idx], share)
            remaining -= quota[idx]
            remaining_count -= 1

    max_ratio = 0.0
    argmax: dict = {}
    min_ratio = np.inf
    argmin: dict = {}
    track_min = case.kind is BoundCaseKind.RESONANCE_ASYMPTOTIC
    scale_max: dict[int, float] = {}
    scale_n: dict[int, int] = {}
    n_evaluated = 0
    chunk = 1 << 19

    for ks, axes, size, take in zip(assignments, all_axes, sizes, quota):
        if size == 0 or take == 0:
            continue
        if take < size:
            selected = np.sort(rng.integers(0, size, size=int(take)))
            blocks = (selected[i:i + chunk] for i in range(0, int(take), chunk))
        else:
            blocks = (
                np.arange(i, min(i + chunk, int(size)), dtype=np.int64)
                for i in range(0, int(size), chunk)
            )
        scale = max(ks.values())
        for idx in blocks:
            xis = _decode(case, ks, axes, idx)
            if xis[0].size == 0:
                continue
            lhs, rhs = _eval_case(case, ks, xis)
            ratio = lhs / rhs
            n = ratio.size
            n_evaluated += n
            i_max = int(np.argmax(ratio))
            if ratio[i_max] > max_ratio:
                max_ratio = float(ratio[i_max])
                argmax = {"ks": dict(ks), "xis": [int(x[i_max]) for x in xis]}
            if ratio[i_max] > scale_max.get(scale, 0.0):
                scale_max[scale] = float(ratio[i_max])
            scale_n[scale] = scale_n.get(scale, 0) + n
            if track_min:
                i_min = int(np.argmin(ratio))
                if ratio[i_min] < min_ratio:
                    min_ratio = float(ratio[i_min])
                    argmin = {"ks": dict(ks), "xis": [int(x[i_min]) for x in xis]}

    scales = np.array(sorted(scale_max.keys()))
    maxima = np.array([scale_max[s] for s in scales])
    per_scale = [(int(s), float(m), int(scale_n[s])) for s, m in zip(scales, maxima)]
    stability = None
    if len(scales) >= 2 and maxima[-2] > 0:
        stability = float((maxima[-1] - maxima[-2]) / maxima[-2])

    return ConstantReport(
        case_kind=case.kind.value,
        member=case.member,
        alpha=case.alpha,
        k_ranges=[list(r) for r in case.k_ranges],
        max_ratio=max_ratio,
        argmax=argmax,
        min_ratio=(min_ratio if track_min and np.isfinite(min_ratio) else None),
        argmin=(argmin if track_min and argmin else None),
        per_scale_max=per_scale,
        stability_delta=stability,
        trend_slope=_trend_slope(scales, maxima),
        n_tuples=n_evaluated,
        n_assignments=len(assignments),
        subsampled=subsampled,
        seed=seed,
        budget=budget,
    )
