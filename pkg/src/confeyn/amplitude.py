"""Per-edge expansions of massive amplitudes with symbolic coefficients.

Every edge factor of the massive Euclidean amplitude (dimension D = 2 lam + 2)
is decomposed as a sum of terms indexed by l_e:

* integer lam, l_e in {-lam, ..., -1}: pure powers

      (2 pi)^-(lam+1) (-m^2)^(lam+l) 2^(-lam-2l-1) (-l-1)! / (lam+l)! * r^(2l)

  (the Laurent part of the small-argument expansion of the Macdonald kernel);

* integer lam, l_e = l >= 0: power-times-log terms

      (-1)^(lam+1) (2 pi)^-(lam+1) m^(2(lam+l)) / (2^(lam+2l) l! (lam+l)!)
          * r^(2l) ( log(m r / 2) - (psi(l+1) + psi(lam+l+1)) / 2 );

* half-integer lam: the Macdonald function at half-integer order terminates,
  and expanding the exponential gives one pure power r^(2 l_e) per
  half-integer l_e >= -lam, with rational-times-integer-pi-power coefficients.

Each term is further expanded in Gegenbauer polynomials of the fixed weight
lam: writing rho = max(|x_s|, |x_t|), r = min(...), u = r/rho and
c = omega_s . omega_t, the squared separation is rho^2 (1 - 2 u c + u^2), so
negative powers expand through the generating function at shifted weight and
re-project onto weight lam, while the log splits as
log rho + (1/2) log(1 - 2 u c + u^2), the series part running through
Chebyshev polynomials converted to weight lam and linearized products.

Coefficient tensors are exact (SymbolicCoeff entries); numeric evaluation
binds gamma, log 2, pi, and the mass at the very end.

The complex-case kernel in dimension D coincides with the real kernel at
weight D - 1 (its prefactor is (2 pi)^-D and the Macdonald order is D - 1),
so every expansion here covers the complex case by passing lam = D - 1; see
:func:`complex_case_weight`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .exact import ExactScalar, SymbolicCoeff
from .feyngraph import FeynmanGraph
from .gegenbauer import (chebyshev_to_gegenbauer, gegenbauer_value,
                         monomial_to_gegenbauer, product_linearize,
                         reproject_gegenbauer)
from .specfun import as_half_integer, asym_coeff, digamma_exact


class DivergentRatioError(ValueError):
    """Gegenbauer evaluation requested at r/rho >= 1, outside convergence."""


def two_pi_power(exp) -> ExactScalar:
    """(2 pi)**exp for integer or half-integer exp, as an exact scalar."""
    exp = Fraction(exp)
    if (2 * exp).denominator != 1:
        raise ValueError("exponent must be a half-integer")
    if exp.denominator == 1:
        two = ExactScalar.from_rational(Fraction(2) ** exp)
    else:
        whole = exp - Fraction(1, 2)
        two = ExactScalar.term(Fraction(2) ** whole, sqrt2=1)
    return two * ExactScalar.pi_power(int(2 * exp))


@dataclass(frozen=True)
class EdgeGeometry:
    """Radial/angular data of one edge: rho = max endpoint norm, r = min,
    cos = the angle between the endpoint directions."""
    rho: float
    r: float
    cos: float

    def __post_init__(self):
        if not (0 <= self.r <= self.rho):
            raise ValueError("need 0 <= r <= rho")
        if not (-1.0 - 1e-12 <= self.cos <= 1.0 + 1e-12):
            raise ValueError("cos out of range")

    @classmethod
    def from_points(cls, xs: Sequence[float], xt: Sequence[float]) -> "EdgeGeometry":
        ns = math.sqrt(sum(c * c for c in xs))
        nt = math.sqrt(sum(c * c for c in xt))
        rho, r = max(ns, nt), min(ns, nt)
        if r == 0.0:
            return cls(rho, 0.0, 0.0)
        dot = sum(a * b for a, b in zip(xs, xt))
        return cls(rho, r, max(-1.0, min(1.0, dot / (ns * nt))))

    @property
    def u(self) -> float:
        return self.r / self.rho

    def separation(self) -> float:
        return math.sqrt(self.rho ** 2 + self.r ** 2 - 2 * self.rho * self.r * self.cos)


@dataclass(frozen=True)
class TaylorTermSpec:
    """Index l_e of one expansion term; negative l_e sit on the pure-power
    branch, l_e >= 0 on the power-times-log branch (integer lam only).  For
    half-integer lam the index runs over half-integers >= -lam and the branch
    is always 'power'."""
    ell: Fraction
    branch: str

    def __post_init__(self):
        object.__setattr__(self, "ell", as_half_integer(self.ell, "ell"))
        if self.branch not in ("power", "log"):
            raise ValueError("branch must be 'power' or 'log'")
        if self.branch == "log" and self.ell < 0:
            raise ValueError("log branch needs ell >= 0")

    @classmethod
    def make(cls, ell, lam) -> "TaylorTermSpec":
        ell = as_half_integer(ell, "ell")
        lam = as_half_integer(lam, "lambda")
        if lam.denominator == 2:
            return cls(ell, "power")
        return cls(ell, "power" if ell < 0 else "log")


@dataclass(frozen=True)
class TaylorTerm:
    """One term coeff_const * r^e + coeff_log * r^e * log(r)."""
    r_exponent: Fraction
    coeff_const: SymbolicCoeff
    coeff_log: SymbolicCoeff

    def eval(self, r: float, m: float) -> float:
        value = self.coeff_const.bind(m)
        if not self.coeff_log.is_zero():
            value += self.coeff_log.bind(m) * math.log(r)
        return value * r ** float(self.r_exponent)


def _check_lambda(lam) -> Fraction:
    lam = as_half_integer(lam, "lambda")
    if lam < Fraction(1, 2):
        raise ValueError("need lam >= 1/2 (dimension D >= 3)")
    return lam


def complex_case_weight(D: int) -> Fraction:
    """Weight for the complex-case expansions: the massive complex kernel in
    dimension D is the real kernel at lam = D - 1 (indices then run over
    {-(D-1), ..., inf})."""
    if D < 2:
        raise ValueError("complex case needs D >= 2")
    return Fraction(D - 1)


def taylor_term_coefficient(term: TaylorTermSpec, lam) -> TaylorTerm:
    """Exact coefficient of the l_e term of the massive edge factor."""
    lam = _check_lambda(lam)
    ell = term.ell
    if ell < -lam:
        raise ValueError(f"ell must be >= -lam = {-lam}")
    if lam.denominator == 1:
        lam_i = int(lam)
        if lam_i < 1:
            raise ValueError("integer branch needs lam >= 1")
        if term.branch == "power":
            if ell >= 0:
                raise ValueError("integer lam power branch needs ell in {-lam..-1}")
            # Laurent sum of the small-z Macdonald expansion, re-indexed
            l = int(lam + ell)  # 0 .. lam-1
            coeff = (Fraction((-1) ** l) * Fraction(2) ** (lam_i - 2 * l - 1)
                     * math.factorial(lam_i - l - 1) / math.factorial(l))
            scalar = two_pi_power(-(lam + 1)) * coeff
            return TaylorTerm(2 * ell, SymbolicCoeff.monomial(scalar, m_exp=2 * l),
                              SymbolicCoeff.zero())
        l = int(ell)
        scalar = (two_pi_power(-(lam + 1))
                  * Fraction((-1) ** (lam_i + 1), 2 ** (lam_i + 2 * l))
                  / Fraction(math.factorial(l) * math.factorial(lam_i + l)))
        b = SymbolicCoeff.monomial(scalar, m_exp=2 * (lam + ell))
        bracket = (SymbolicCoeff.logm_symbol() - SymbolicCoeff.log2_symbol()
                   - Fraction(1, 2) * (digamma_exact(l + 1) + digamma_exact(lam + l + 1)))
        return TaylorTerm(2 * ell, b * bracket, b)
    # half-integer lam: terminating Macdonald form, exponential expanded
    if term.branch != "power":
        raise ValueError("half-integer lam has no log branch")
    p = 2 * ell
    if p.denominator != 1:
        raise ValueError("2*ell must be an integer")
    p = int(p)
    jmax = int(lam - Fraction(1, 2))
    total = ExactScalar.zero()
    for j in range(jmax + 1):
        k = p + int(lam + Fraction(1, 2)) + j
        if k < 0:
            continue
        a_j = (asym_coeff(lam, j)
               * two_pi_power(-(lam + 1))
               * ExactScalar.term(Fraction(1, 2), sqrt2=1, pi_half=1)  # sqrt(pi/2)
               * Fraction(1, 2 ** j))
        total = total + a_j * Fraction((-1) ** k, math.factorial(k))
    return TaylorTerm(2 * ell, SymbolicCoeff.monomial(total, m_exp=2 * lam + 2 * ell),
                      SymbolicCoeff.zero())


@dataclass(frozen=True)
class AsymptoticTerm:
    """One term of the large-distance expansion: coeff * r^e * exp(-m r)."""
    r_exponent: Fraction
    coeff: SymbolicCoeff

    def eval(self, r: float, m: float) -> float:
        return self.coeff.bind(m) * r ** float(self.r_exponent) * math.exp(-m * r)


def asymptotic_term_coefficient(ell: int, lam) -> AsymptoticTerm:
    """Coefficient sqrt(pi/2) (2 pi)^-(lam+1) (lam,ell) 2^-ell m^(lam-ell-1/2)
    paired with the radial exponent -(ell + lam + 1/2)."""
    lam = _check_lambda(lam)
    if ell < 0:
        raise ValueError("ell must be >= 0")
    scalar = (asym_coeff(lam, ell)
              * ExactScalar.term(Fraction(1, 2), sqrt2=1, pi_half=1)
              * two_pi_power(-(lam + 1)) * Fraction(1, 2 ** ell))
    coeff = SymbolicCoeff.monomial(scalar, m_exp=lam - ell - Fraction(1, 2))
    return AsymptoticTerm(-(ell + lam + Fraction(1, 2)), coeff)


# ---------------------------------------------------------------------------
# Gegenbauer tensors
# ---------------------------------------------------------------------------

Tensor = dict[tuple[int, int], SymbolicCoeff]


@dataclass
class GegenExpansion:
    """Truncated double series of one edge term in the weight-lam basis:

        prefactor * rho^rho_exponent *
          sum_{n,d} [ plain[n,d] + log_rho[n,d] * log(rho) ] u^n C_d^(lam)(cos)

    The tensors expand the *bare* radial/log factor; the term coefficient is
    kept in ``prefactor`` (this is what makes the worked massless values come
    out with unit entries)."""
    lam: Fraction
    rho_exponent: Fraction
    prefactor: SymbolicCoeff
    plain: Tensor = field(default_factory=dict)
    log_rho: Tensor = field(default_factory=dict)
    radial_order: int = 0

    def evaluate(self, geom: EdgeGeometry, m: float | None = None,
                 include_prefactor: bool = True) -> float:
        if geom.r > 0 and geom.u >= 1.0:
            raise DivergentRatioError("expansion needs r/rho < 1")
        u = geom.u if geom.rho else 0.0
        total = 0.0
        for (n, d), c in self.plain.items():
            total += c.bind(m) * u ** n * gegenbauer_value(self.lam, d, geom.cos)
        if self.log_rho:
            logrho = math.log(geom.rho)
            for (n, d), c in self.log_rho.items():
                total += (c.bind(m) * logrho * u ** n
                          * gegenbauer_value(self.lam, d, geom.cos))
        if include_prefactor:
            total *= self.prefactor.bind(m)
        return total * geom.rho ** float(self.rho_exponent)

    def full_entries(self) -> Iterable[SymbolicCoeff]:
        """Complete coefficients (prefactor folded in) of every tensor entry,
        for the coefficient-field structure checks."""
        for c in self.plain.values():
            yield self.prefactor * c
        for c in self.log_rho.values():
            yield self.prefactor * c

    def to_json(self) -> dict:
        def tensor_json(t: Tensor) -> list:
            return [{"radial": n, "degree": d, "coeff": t[(n, d)].to_json()}
                    for (n, d) in sorted(t)]
        return {
            "lambda": str(self.lam),
            "rho_exponent": str(self.rho_exponent),
            "radial_order": self.radial_order,
            "prefactor": self.prefactor.to_json(),
            "plain": tensor_json(self.plain),
            "log_rho": tensor_json(self.log_rho),
        }


def _tensor_add(t: Tensor, key: tuple[int, int], c: SymbolicCoeff):
    prev = t.get(key)
    acc = c if prev is None else prev + c
    if acc.is_zero():
        t.pop(key, None)
    else:
        t[key] = acc


@lru_cache(maxsize=None)
def _poly_power_tensor(exponent: int, lam: Fraction, radial_order: int
                       ) -> tuple[tuple[int, int, Fraction], ...]:
    """(1 - 2 u c + u^2)^exponent as entries (u-power, C^(lam)-degree, coeff)."""
    out: dict[tuple[int, int], Fraction] = {}
    for n in range(exponent + 1):
        b1 = math.comb(exponent, n)
        mono = monomial_to_gegenbauer(n, lam)
        for q in range(exponent - n + 1):
            radial = n + 2 * q
            if radial > radial_order:
                continue
            base = Fraction(b1 * math.comb(exponent - n, q) * (-2) ** n)
            for d, c in mono.coeffs.items():
                key = (radial, d)
                out[key] = out.get(key, Fraction(0)) + base * c.as_rational()
    return tuple((n, d, c) for (n, d), c in sorted(out.items()) if c)


@lru_cache(maxsize=None)
def _series_tensor(weight: Fraction, lam: Fraction, radial_order: int
                   ) -> tuple[tuple[int, int, Fraction], ...]:
    """sum_n u^n C_n^(weight) re-projected onto weight lam."""
    out = []
    for n in range(radial_order + 1):
        for d, c in reproject_gegenbauer(weight, n, lam).coeffs.items():
            out.append((n, d, c.as_rational()))
    return tuple(out)


def edge_gegenbauer_expansion(term: TaylorTermSpec, lam,
                              orders: "TruncationOrders | None" = None) -> GegenExpansion:
    """Gegenbauer-basis expansion of one edge term at fixed weight lam."""
    lam = _check_lambda(lam)
    orders = orders or TruncationOrders()
    radial = orders.radial
    coeff = taylor_term_coefficient(term, lam)
    expansion = GegenExpansion(lam, coeff.r_exponent,
                               prefactor=SymbolicCoeff.zero(), radial_order=radial)

    if lam.denominator == 1 and term.branch == "log":
        expansion.prefactor = coeff.coeff_log
        ell = int(term.ell)
        poly = _poly_power_tensor(ell, lam, radial)
        k0 = (SymbolicCoeff.logm_symbol() - SymbolicCoeff.log2_symbol()
              - Fraction(1, 2) * (digamma_exact(ell + 1) + digamma_exact(lam + ell + 1)))
        for n, d, q in poly:
            qc = SymbolicCoeff.from_rational(q)
            _tensor_add(expansion.log_rho, (n, d), qc)
            _tensor_add(expansion.plain, (n, d), qc * k0)
        # (1/2) log(1 - 2 u c + u^2) = - sum_p T_p(c) u^p / p, via weight-lam
        # Chebyshev coefficients and product linearization
        for n, d, q in poly:
            for p in range(1, radial - n + 1):
                cheb = chebyshev_to_gegenbauer(p, lam)
                for s, sc in cheb.coeffs.items():
                    lin = product_linearize(d, s, lam)
                    factor = -q * sc.as_rational() / p
                    for dd, w in lin.coeffs.items():
                        _tensor_add(expansion.plain, (n + p, dd),
                                    SymbolicCoeff.from_rational(factor * w.as_rational()))
        return _apply_degree_cap(expansion, orders)

    # pure power r^(2 ell): bare tensor of (1 - 2 u c + u^2)^(ell)
    expansion.prefactor = coeff.coeff_const
    p2 = 2 * term.ell
    assert p2.denominator == 1
    p2 = int(p2)
    if p2 == 0:
        expansion.plain[(0, 0)] = SymbolicCoeff.one()
    elif p2 < 0:
        weight = Fraction(-p2, 2)
        for n, d, c in _series_tensor(weight, lam, radial):
            _tensor_add(expansion.plain, (n, d), SymbolicCoeff.from_rational(c))
    elif p2 % 2 == 0:
        for n, d, c in _poly_power_tensor(p2 // 2, lam, radial):
            _tensor_add(expansion.plain, (n, d), SymbolicCoeff.from_rational(c))
    else:
        # odd positive power: polynomial of exponent (p+1)/2 times the
        # weight-1/2 generating series
        poly = _poly_power_tensor((p2 + 1) // 2, lam, radial)
        series = _series_tensor(Fraction(1, 2), lam, radial)
        for n1, d1, c1 in poly:
            for n2, d2, c2 in series:
                if n1 + n2 > radial:
                    continue
                for dd, w in product_linearize(d1, d2, lam).coeffs.items():
                    _tensor_add(expansion.plain, (n1 + n2, dd),
                                SymbolicCoeff.from_rational(c1 * c2 * w.as_rational()))
    return _apply_degree_cap(expansion, orders)


def _apply_degree_cap(expansion: GegenExpansion, orders: "TruncationOrders"
                      ) -> GegenExpansion:
    cap = orders.gegen if orders.gegen is not None else orders.radial
    expansion.plain = {k: v for k, v in expansion.plain.items() if k[1] <= cap}
    expansion.log_rho = {k: v for k, v in expansion.log_rho.items() if k[1] <= cap}
    return expansion


# ---------------------------------------------------------------------------
# Whole-amplitude truncated evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncationOrders:
    """Explicit truncation knobs (no adaptivity): radial order of the
    Gegenbauer tensors, optional Gegenbauer degree cap (defaults to radial),
    the highest Taylor index ell, and the asymptotic term count."""
    radial: int = 24
    gegen: int | None = None
    ell_max: int = 20
    asym_terms: int = 6


def _taylor_indices(lam: Fraction, orders: TruncationOrders) -> list[Fraction]:
    if lam.denominator == 1:
        return [Fraction(e) for e in range(-int(lam), orders.ell_max + 1)]
    # half-integer lam: 2*ell runs over the integers from -2 lam upward
    return [Fraction(t, 2) for t in range(-int(2 * lam), 2 * orders.ell_max + 1)]


def edge_taylor_value(lam, r: float, m: float, orders: TruncationOrders) -> float:
    """Truncated small-separation value of one edge factor."""
    lam = _check_lambda(lam)
    total = 0.0
    for ell in _taylor_indices(lam, orders):
        term = taylor_term_coefficient(TaylorTermSpec.make(ell, lam), lam)
        total += term.eval(r, m)
    return total


def edge_asymptotic_value(lam, r: float, m: float, orders: TruncationOrders) -> float:
    """Truncated large-separation value of one edge factor."""
    lam = _check_lambda(lam)
    return sum(asymptotic_term_coefficient(ell, lam).eval(r, m)
               for ell in range(orders.asym_terms))


@lru_cache(maxsize=None)
def _cached_expansion(ell: Fraction, lam: Fraction, radial: int, gegen: int | None
                      ) -> GegenExpansion:
    orders = TruncationOrders(radial=radial, gegen=gegen)
    return edge_gegenbauer_expansion(TaylorTermSpec.make(ell, lam), lam, orders)


def edge_gegenbauer_value(lam, geom: EdgeGeometry, m: float,
                          orders: TruncationOrders) -> float:
    lam = _check_lambda(lam)
    total = 0.0
    for ell in _taylor_indices(lam, orders):
        exp = _cached_expansion(ell, lam, orders.radial, orders.gegen)
        total += exp.evaluate(geom, m)
    return total


def amplitude_truncated_eval(graph: FeynmanGraph,
                             positions: dict[int, Sequence[float]],
                             masses: dict[int, float] | float,
                             lam,
                             method: str = "direct",
                             orders: TruncationOrders | None = None) -> float:
    """Scalar factor of the amplitude: the product over all edges of the
    (truncated) edge values; the volume form is a degree tag the caller keeps.

    ``method`` is one of direct | taylor | asymptotic | gegenbauer.
    """
    from .propagators import Kinematics, gm_real

    lam = _check_lambda(lam)
    orders = orders or TruncationOrders()
    D = int(2 * lam + 2)
    total = 1.0
    for idx, e in enumerate(graph.edges):
        xs = tuple(float(c) for c in positions[e.src])
        xt = tuple(float(c) for c in positions[e.tgt])
        m = masses if isinstance(masses, (int, float)) else masses[idx]
        diff = tuple(a - b for a, b in zip(xs, xt))
        r = math.sqrt(sum(c * c for c in diff))
        if r == 0.0:
            raise ValueError(f"edge {idx} has coincident endpoints")
        if method == "direct":
            total *= gm_real(Kinematics(D, diff, m))
        elif method == "taylor":
            total *= edge_taylor_value(lam, r, m, orders)
        elif method == "asymptotic":
            total *= edge_asymptotic_value(lam, r, m, orders)
        elif method == "gegenbauer":
            geom = EdgeGeometry.from_points(xs, xt)
            if geom.r > 0 and geom.u >= 1.0:
                raise DivergentRatioError(
                    f"edge {idx}: r/rho = {geom.u} is not < 1")
            total *= edge_gegenbauer_value(lam, geom, m, orders)
        else:
            raise ValueError(f"unknown method {method!r}")
    return total
