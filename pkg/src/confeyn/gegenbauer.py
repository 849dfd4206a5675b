"""Exact Gegenbauer / Chebyshev polynomial engine.

The ultraspherical polynomials ``C_n^{(lam)}`` are generated by

    (1 - 2tx + t^2)^(-lam) = sum_n C_n^{(lam)}(x) t^n,   |t| < 1,

with the explicit monomial form

    C_n^{(lam)}(x) = sum_{k=0}^{[n/2]} (-1)^k Gamma(lam+n-k) / (k! (n-2k)! Gamma(lam)) (2x)^{n-2k}.

This module provides exact basis conversions built from the monomial
expansion

    x^m = 2^{-m} Gamma(lam) m! sum_k (lam+m-2k) / (k! Gamma(lam+m+1-k)) C_{m-2k}^{(lam)}(x),

the Chebyshev-to-Gegenbauer conversion, the re-projection of a weight-ell
Gegenbauer family onto a weight-lam one, the linearization of products of two
Gegenbauer polynomials, and the zonal spherical-harmonic constants.  All
conversion coefficients are exact (rational, or rational times a power of
sqrt(pi) at intermediate stages that always cancels in the final combination).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exact import ExactScalar
from .specfun import as_half_integer, gamma_exact

_fact = math.factorial


def _check_weight(lam, minimum: Fraction, name: str = "lambda") -> Fraction:
    lam = as_half_integer(lam, name)
    if lam < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {lam}")
    return lam


def rising(x: Fraction, k: int) -> Fraction:
    """Pochhammer symbol x (x+1) ... (x+k-1)."""
    out = Fraction(1)
    for i in range(k):
        out *= x + i
    return out


@dataclass(frozen=True)
class PolySpec:
    """One polynomial: weight lam > 0 (half-integer) and degree n, or the
    Chebyshev lam -> 0 limit when ``chebyshev`` is set."""
    lam: Fraction | int = Fraction(1, 2)
    n: int = 0
    chebyshev: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("degree must be >= 0")
        if not self.chebyshev:
            lam = as_half_integer(self.lam, "lambda")
            if lam <= 0:
                raise ValueError("lambda must be positive (or set the Chebyshev flag)")
            object.__setattr__(self, "lam", lam)


@dataclass
class GegenCombo:
    """Finite combination sum_k coeffs[k] * C_k^{(lam)}(x)."""
    lam: Fraction
    coeffs: dict[int, ExactScalar] = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {k: c for k, c in self.coeffs.items() if not c.is_zero()}

    def expand(self) -> dict[int, ExactScalar]:
        """Monomial coefficients of the combination (exact)."""
        out: dict[int, ExactScalar] = {}
        for deg, c in self.coeffs.items():
            for power, a in gegenbauer_coeffs(PolySpec(self.lam, deg)).items():
                prev = out.get(power, ExactScalar.zero())
                acc = prev + c * a
                if acc.is_zero():
                    out.pop(power, None)
                else:
                    out[power] = acc
        return out

    def eval_float(self, x: float) -> float:
        return sum(float(c) * gegenbauer_value(self.lam, deg, x)
                   for deg, c in self.coeffs.items())

    def to_json(self) -> dict[str, list]:
        return {str(k): self.coeffs[k].to_json() for k in sorted(self.coeffs)}


@lru_cache(maxsize=None)
def _gegen_monomials(lam: Fraction, n: int) -> tuple[tuple[int, Fraction], ...]:
    # Gamma(lam+n-k)/Gamma(lam) = rising(lam, n-k) keeps everything rational
    out = []
    for k in range(n // 2 + 1):
        coeff = (Fraction((-1) ** k) * rising(lam, n - k)
                 / (Fraction(_fact(k)) * _fact(n - 2 * k))) * 2 ** (n - 2 * k)
        out.append((n - 2 * k, coeff))
    return tuple(out)


@lru_cache(maxsize=None)
def _chebyshev_monomials(n: int) -> tuple[tuple[int, Fraction], ...]:
    # T_0 = 1, T_1 = x, T_{n+1} = 2x T_n - T_{n-1}
    prev = {0: Fraction(1)}
    if n == 0:
        return tuple(prev.items())
    cur = {1: Fraction(1)}
    for _ in range(n - 1):
        nxt: dict[int, Fraction] = {}
        for p, c in cur.items():
            nxt[p + 1] = nxt.get(p + 1, Fraction(0)) + 2 * c
        for p, c in prev.items():
            nxt[p] = nxt.get(p, Fraction(0)) - c
        prev, cur = cur, {p: c for p, c in nxt.items() if c}
    return tuple(sorted(cur.items()))


def gegenbauer_coeffs(spec: PolySpec) -> dict[int, ExactScalar]:
    """Exact monomial coefficients of C_n^{(lam)}(x) (or T_n for the Chebyshev limit)."""
    if spec.chebyshev:
        mono = _chebyshev_monomials(spec.n)
    else:
        mono = _gegen_monomials(Fraction(spec.lam), spec.n)
    return {p: ExactScalar.from_rational(c) for p, c in mono}


def gegenbauer_value(lam, n: int, x: float) -> float:
    mono = _gegen_monomials(Fraction(lam), n)
    return sum(float(c) * x ** p for p, c in mono)


def generating_series_coeff(lam, n: int, x: float) -> float:
    """n-th Taylor coefficient in t of (1-2tx+t^2)^(-lam), by the binomial
    series in y = t(2x-t); an oracle independent of the explicit formula."""
    lam = Fraction(lam) if not isinstance(lam, float) else lam
    total = 0.0
    # y^j contributes to t^{j+i} via (2x-t)^j = sum_i C(j,i) (2x)^{j-i} (-t)^i
    for j in range(n + 1):
        i = n - j
        if i > j:
            continue
        binom_rising = 1.0
        for a in range(j):
            binom_rising *= (float(lam) + a) / (a + 1)
        comb = _fact(j) // (_fact(i) * _fact(j - i))
        total += binom_rising * comb * (2.0 * x) ** (j - i) * (-1.0) ** i
    return total


@lru_cache(maxsize=None)
def _monomial_combo(m: int, lam: Fraction) -> tuple[tuple[int, Fraction], ...]:
    out = []
    for k in range(m // 2 + 1):
        # 2^{-m} m! (lam+m-2k) / (k! rising(lam, m+1-k))
        coeff = (Fraction(_fact(m), 2 ** m) * (lam + m - 2 * k)
                 / (_fact(k) * rising(lam, m + 1 - k)))
        out.append((m - 2 * k, coeff))
    return tuple(out)


def monomial_to_gegenbauer(m: int, lam) -> GegenCombo:
    """Expansion of x^m in the C^{(lam)} basis, lam >= 1/2."""
    lam = _check_weight(lam, Fraction(1, 2))
    if m < 0:
        raise ValueError("monomial degree must be >= 0")
    combo = _monomial_combo(m, lam)
    return GegenCombo(lam, {d: ExactScalar.from_rational(c) for d, c in combo})


def chebyshev_to_gegenbauer(n: int, lam) -> GegenCombo:
    """Coefficients c^lam_{n,m} with T_n = sum_m c^lam_{n,m} C_m^{(lam)}."""
    lam = _check_weight(lam, Fraction(1, 2))
    out: dict[int, Fraction] = {}
    for power, c in _chebyshev_monomials(n):
        for d, w in _monomial_combo(power, lam):
            out[d] = out.get(d, Fraction(0)) + c * w
    return GegenCombo(lam, {d: ExactScalar.from_rational(c)
                            for d, c in out.items() if c})


@lru_cache(maxsize=None)
def _reproject(ell: Fraction, n: int, lam: Fraction) -> tuple[tuple[int, Fraction], ...]:
    out: dict[int, Fraction] = {}
    for k in range(n // 2 + 1):
        outer = Fraction((-1) ** k) * rising(ell, n - k) / _fact(k)
        for j in range((n - 2 * k) // 2 + 1):
            inner = (lam + n - 2 * (k + j)) / (_fact(j) * rising(lam, n - 2 * k + 1 - j))
            d = n - 2 * (k + j)
            out[d] = out.get(d, Fraction(0)) + outer * inner
    return tuple(sorted((d, c) for d, c in out.items() if c))


def reproject_gegenbauer(ell, n: int, lam) -> GegenCombo:
    """Expansion of C_n^{(ell)} in the C^{(lam)} basis (both weights >= 1/2)."""
    ell = _check_weight(ell, Fraction(1, 2), "source weight")
    lam = _check_weight(lam, Fraction(1, 2), "target weight")
    combo = _reproject(ell, n, lam)
    return GegenCombo(lam, {d: ExactScalar.from_rational(c) for d, c in combo})


@lru_cache(maxsize=None)
def _product_combo(n: int, m: int, lam: Fraction) -> tuple[tuple[int, ExactScalar], ...]:
    gam_lam = gamma_exact(lam)
    out: dict[int, ExactScalar] = {}
    for r in range((n + m) // 2 + 1):
        inner = ExactScalar.zero()
        for k in range(r + 1):
            j = r - k
            if n - 2 * k < 0 or m - 2 * j < 0:
                continue
            inner = inner + (gamma_exact(lam + n - k) * gamma_exact(lam + m - j)
                             / Fraction(_fact(k) * _fact(j) * _fact(n - 2 * k) * _fact(m - 2 * j)))
        if inner.is_zero():
            continue
        # alpha carries 1/Gamma(lam) and beta another 1/Gamma(lam) (from
        # 1/Gamma(lam + ...) = 1/(rising * Gamma(lam))); both folded here so
        # every intermediate stays a single exact scalar.
        alpha = (inner / (gam_lam * gam_lam)) * Fraction((-1) ** r * _fact(n + m - 2 * r))
        for k in range((n + m - 2 * r) // 2 + 1):
            beta = ((lam + n + m - 2 * (r + k))
                    / (rising(lam, n + m - 2 * r + 1 - k) * _fact(k)))
            d = n + m - 2 * (r + k)
            acc = out.get(d, ExactScalar.zero()) + alpha * beta
            if acc.is_zero():
                out.pop(d, None)
            else:
                out[d] = acc
    return tuple(sorted(out.items()))


def product_linearize(n: int, m: int, lam) -> GegenCombo:
    """Linearization C_n^{(lam)} C_m^{(lam)} = sum_d coeff_d C_d^{(lam)}."""
    lam = _check_weight(lam, Fraction(1, 2))
    if n < 0 or m < 0:
        raise ValueError("degrees must be >= 0")
    return GegenCombo(lam, dict(_product_combo(n, m, lam)))


def sphere_volume(D: int) -> ExactScalar:
    """Surface volume of S^{D-1}: 2 pi^{D/2} / Gamma(D/2)."""
    if D < 1:
        raise ValueError("D must be >= 1")
    return ExactScalar.pi_power(D, 2) / gamma_exact(Fraction(D, 2))


def zonal_coefficient(D: int, n: int) -> ExactScalar:
    """c_{D,n} = Vol(S^{D-1}) (D-2) / (2n + D - 2), the zonal-harmonic constant."""
    if D < 3:
        raise ValueError("zonal coefficient needs dimension D >= 3")
    if n < 0:
        raise ValueError("degree must be >= 0")
    return sphere_volume(D) * Fraction(D - 2, 2 * n + D - 2)


def chebyshev_limit_check(n: int, x: float, eps_lambda: float) -> tuple[float, float]:
    """(T_n(x), (n/2) C_n^{(eps)}(x)/eps) for the lam -> 0 Chebyshev limit."""
    if n < 1:
        raise ValueError("the limit formula needs n >= 1")
    if eps_lambda <= 0:
        raise ValueError("eps_lambda must be positive")
    t_n = sum(float(c) * x ** p for p, c in _chebyshev_monomials(n))
    approx = (n / 2.0) * generating_series_coeff(eps_lambda, n, x) / eps_lambda
    return t_n, approx
