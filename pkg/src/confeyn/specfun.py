"""Special functions: exact Gamma/digamma values and the Macdonald function.

Exact values at integer and half-integer arguments use the functional equation
``Gamma(z+1) = z*Gamma(z)`` together with ``Gamma(1/2) = sqrt(pi)``, and the
digamma identities

    psi(n)       = H_{n-1} - gamma
    psi(n + 1/2) = -gamma - 2*log(2) + sum_{k=1}^{n} 2/(2k-1).

The modified Bessel function of the second kind ``K_nu(z)`` is evaluated from
its small-argument convergent expansion and its large-argument asymptotic
series

    K_nu(z) ~ sqrt(pi/(2z)) * exp(-z) * sum_l (nu,l) / (2z)**l,
    (nu,l) = Gamma(nu+l+1/2) / (l! * Gamma(nu-l+1/2)),

switching branches at a configurable crossover.  Half-integer orders use the
terminating (exact) form of the asymptotic series.  Summation runs in
extended precision (mpmath) because the small-argument series cancels
catastrophically for moderate ``z``; results are correctly rounded doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath

from .exact import ExactScalar, SymbolicCoeff

HalfInteger = Union[int, Fraction]


def as_half_integer(z, name: str = "argument") -> Fraction:
    """Coerce to a Fraction with denominator 1 or 2."""
    if isinstance(z, float):
        z = Fraction(z).limit_denominator(2)
    z = Fraction(z)
    if z.denominator not in (1, 2):
        raise ValueError(f"{name} must be an integer or half-integer, got {z}")
    return z


def gamma_exact(z) -> ExactScalar:
    """Gamma(z) for positive integer or half-integer z, as an exact scalar.

    Integer z gives (z-1)!; half-integer z gives a rational multiple of
    sqrt(pi) via the functional equation from Gamma(1/2).
    """
    z = as_half_integer(z, "gamma argument")
    if z <= 0:
        raise ValueError(f"gamma_exact requires z > 0, got {z}")
    if z.denominator == 1:
        return ExactScalar.from_rational(math.factorial(int(z) - 1))
    # z = n + 1/2: Gamma(z) = (z-1)(z-2)...(1/2) * sqrt(pi)
    coeff = Fraction(1)
    w = z - 1
    while w > 0:
        coeff *= w
        w -= 1
    return ExactScalar.pi_power(1, coeff)


def digamma_exact(z) -> SymbolicCoeff:
    """psi(z) for positive integer or half-integer z, in Q + Q*gamma + Q*log(2)."""
    z = as_half_integer(z, "digamma argument")
    if z <= 0:
        raise ValueError(f"digamma_exact requires z > 0, got {z}")
    if z.denominator == 1:
        n = int(z)
        harmonic = sum((Fraction(1, k) for k in range(1, n)), Fraction(0))
        return SymbolicCoeff.from_rational(harmonic) - SymbolicCoeff.gamma_symbol()
    n = int(z - Fraction(1, 2))
    odd_sum = sum((Fraction(2, 2 * k - 1) for k in range(1, n + 1)), Fraction(0))
    return (SymbolicCoeff.from_rational(odd_sum)
            - SymbolicCoeff.gamma_symbol()
            - 2 * SymbolicCoeff.log2_symbol())


def asym_coeff(nu, ell: int) -> ExactScalar:
    """Asymptotic-series coefficient (nu,ell) = Gamma(nu+ell+1/2)/(ell! Gamma(nu-ell+1/2)).

    Computed as the Pochhammer product (nu-ell+1/2)_{2 ell} / ell!, which is
    exact for integer and half-integer nu, and vanishes automatically when the
    denominator Gamma sits at a pole (non-positive integer argument) -- that is
    what terminates the series at half-integer order.
    """
    nu = as_half_integer(nu, "order")
    if ell < 0:
        raise ValueError("ell must be >= 0")
    lower = nu - ell + Fraction(1, 2)
    coeff = Fraction(1)
    for i in range(2 * ell):
        coeff *= lower + i
    return ExactScalar.from_rational(coeff / math.factorial(ell))


@dataclass(frozen=True)
class BesselEvalConfig:
    """Evaluation strategy knobs for :func:`bessel_k`.

    ``crossover_z=None`` selects the default ``max(10, 2*nu**2)``.
    ``quadrature`` is (node count, integration half-width) for the integral
    oracle used by the propagator module.
    """
    series_terms: int = 80
    asymptotic_terms: int = 24
    crossover_z: float | None = None
    quadrature: tuple[int, float] = (800, 12.0)

    def __post_init__(self):
        if self.series_terms < 1:
            raise ValueError("series_terms must be >= 1")
        if self.crossover_z is not None and self.crossover_z <= 0:
            raise ValueError("crossover_z must be positive")

    def crossover(self, nu: float) -> float:
        if self.crossover_z is not None:
            return self.crossover_z
        return max(10.0, 2.0 * nu * nu)


DEFAULT_BESSEL_CONFIG = BesselEvalConfig()


def _k_half_integer(n: int, z, terms_cap: int | None = None) -> mpmath.mpf:
    """Exact terminating form of K_{n+1/2}(z)."""
    z = mpmath.mpf(z)
    total = mpmath.mpf(0)
    upper = n if terms_cap is None else min(n, terms_cap - 1)
    for ell in range(upper + 1):
        c = asym_coeff(Fraction(2 * n + 1, 2), ell).as_rational()
        total += mpmath.mpf(c.numerator) / c.denominator / (2 * z) ** ell
    return mpmath.sqrt(mpmath.pi / (2 * z)) * mpmath.exp(-z) * total


def _k_asymptotic(nu: float, z, terms: int) -> mpmath.mpf:
    """Partial sum of the large-argument asymptotic series."""
    z = mpmath.mpf(z)
    term = mpmath.mpf(1)
    total = mpmath.mpf(1)
    prev = mpmath.inf
    for ell in range(terms - 1):
        # (nu,l+1)/(nu,l) = (nu+l+1/2)(nu-l-1/2)/(l+1)
        term *= mpmath.mpf(nu + ell + 0.5) * (nu - ell - 0.5) / (ell + 1)
        contrib = term / (2 * z) ** (ell + 1)
        if abs(contrib) > prev:
            break  # divergent tail reached; stop at the smallest term
        prev = abs(contrib)
        total += contrib
    return mpmath.sqrt(mpmath.pi / (2 * z)) * mpmath.exp(-z) * total


def _k_series_integer(n: int, z, terms: int) -> mpmath.mpf:
    """Convergent small-argument expansion at integer order n >= 0."""
    z = mpmath.mpf(z)
    half = z / 2
    total = mpmath.mpf(0)
    # finite sum of negative powers
    for ell in range(n):
        total += (mpmath.mpf((-1) ** ell * math.factorial(n - ell - 1))
                  / math.factorial(ell)) * half ** (2 * ell - n) / 2
    # log series
    logh = mpmath.log(half)
    sign = (-1) ** (n + 1)
    psi_a = -mpmath.euler  # psi(1)
    psi_b = -mpmath.euler + sum(mpmath.mpf(1) / k for k in range(1, n + 1))  # psi(n+1)
    power = half ** n
    fact_l = mpmath.mpf(1)
    fact_nl = mpmath.mpf(math.factorial(n))
    for ell in range(terms):
        coeff = power / (fact_l * fact_nl)
        total += sign * coeff * (logh - (psi_a + psi_b) / 2)
        # advance ell -> ell+1
        psi_a += mpmath.mpf(1) / (ell + 1)
        psi_b += mpmath.mpf(1) / (n + ell + 1)
        fact_l *= (ell + 1)
        fact_nl *= (n + ell + 1)
        power *= half * half
    return total


def _k_series_real(nu: float, z, terms: int) -> mpmath.mpf:
    """K_nu via pi/2 (I_{-nu} - I_nu)/sin(pi nu) for non-integer real order."""
    z = mpmath.mpf(z)
    half = z / 2

    def i_series(order: float) -> mpmath.mpf:
        total = mpmath.mpf(0)
        for k in range(terms):
            total += half ** (2 * k + order) / (mpmath.factorial(k)
                                                * mpmath.gamma(k + order + 1))
        return total

    return (mpmath.pi / 2) * (i_series(-nu) - i_series(nu)) / mpmath.sin(mpmath.pi * nu)


def bessel_k(nu: float, z: float, cfg: BesselEvalConfig | None = None) -> float:
    """Modified Bessel function (Macdonald function) K_nu(z) for z > 0, nu >= 0."""
    if cfg is None:
        cfg = DEFAULT_BESSEL_CONFIG
    if z <= 0:
        raise ValueError(f"bessel_k requires z > 0 (singular at the origin), got {z}")
    if nu < 0:
        raise ValueError("bessel_k requires nu >= 0 (K_{-nu} = K_nu)")

    two_nu = 2 * nu
    is_half = abs(two_nu - round(two_nu)) < 1e-12 and round(two_nu) % 2 == 1
    is_int = abs(nu - round(nu)) < 1e-12

    # working precision covers the cancellation (~z/ln10 digits) in the series
    dps = 25 + int(1.0 * z) + 10
    with mpmath.workdps(dps):
        if is_half:
            val = _k_half_integer((round(two_nu) - 1) // 2, z)
        elif z > cfg.crossover(nu):
            val = _k_asymptotic(nu, z, cfg.asymptotic_terms)
        elif is_int:
            val = _k_series_integer(round(nu), z, cfg.series_terms)
        else:
            val = _k_series_real(nu, z, cfg.series_terms)
        return float(val)


def bessel_k_branch(nu: float, z: float, branch: str,
                    cfg: BesselEvalConfig | None = None) -> float:
    """Force one evaluation branch ('series' or 'asymptotic'); used for the
    crossover continuity checks."""
    if cfg is None:
        cfg = DEFAULT_BESSEL_CONFIG
    if z <= 0:
        raise ValueError("z must be positive")
    two_nu = 2 * nu
    is_half = abs(two_nu - round(two_nu)) < 1e-12 and round(two_nu) % 2 == 1
    dps = 25 + int(1.0 * z) + 10
    with mpmath.workdps(dps):
        if branch == "asymptotic":
            if is_half:
                return float(_k_half_integer((round(two_nu) - 1) // 2, z,
                                             terms_cap=cfg.asymptotic_terms))
            return float(_k_asymptotic(nu, z, cfg.asymptotic_terms))
        if branch == "series":
            if is_half:
                return float(_k_half_integer((round(two_nu) - 1) // 2, z))
            if abs(nu - round(nu)) < 1e-12:
                return float(_k_series_integer(round(nu), z, cfg.series_terms))
            return float(_k_series_real(nu, z, cfg.series_terms))
    raise ValueError(f"unknown branch {branch!r}")
