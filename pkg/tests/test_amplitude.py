"""Amplitude expansions: exact coefficients, numeric truncations, resummation.

The resummation oracle expands (1 - 2 u c + u^2)^a directly through the
generalized binomial series in Y = u^2 - 2 u c (and log(1+Y) for the log
factor), entirely independent of the Gegenbauer re-projection / Chebyshev /
linearization route used by the implementation, and compares exactly.
"""

import math
from fractions import Fraction

import pytest

from confeyn.amplitude import (DivergentRatioError, EdgeGeometry,
                               GegenExpansion, TaylorTermSpec, TruncationOrders,
                               amplitude_truncated_eval, asymptotic_term_coefficient,
                               edge_asymptotic_value, edge_gegenbauer_expansion,
                               edge_gegenbauer_value, edge_taylor_value,
                               taylor_term_coefficient, two_pi_power)
from confeyn.exact import ExactScalar, SymbolicCoeff
from confeyn.feyngraph import FeynmanGraph
from confeyn.gegenbauer import PolySpec, gegenbauer_coeffs
from confeyn.propagators import Kinematics, gm_real

F = Fraction


# -- independent bivariate series oracles -------------------------------------


def binomial_series(exponent: Fraction, radial_order: int) -> dict[tuple[int, int], Fraction]:
    """(1 + Y)^exponent with Y = u^2 - 2 u c, as {(u_pow, c_pow): coeff}."""
    out: dict[tuple[int, int], Fraction] = {}
    binom = Fraction(1)
    for k in range(radial_order + 1):
        if binom:
            for i in range(k + 1):
                upow = 2 * i + (k - i)
                if upow > radial_order:
                    continue
                key = (upow, k - i)
                c = binom * math.comb(k, i) * Fraction(-2) ** (k - i)
                out[key] = out.get(key, Fraction(0)) + c
        binom = binom * (exponent - k) / (k + 1)
    return {k: v for k, v in out.items() if v}


def half_log_series(radial_order: int) -> dict[tuple[int, int], Fraction]:
    """(1/2) log(1 + Y) with Y = u^2 - 2 u c."""
    out: dict[tuple[int, int], Fraction] = {}
    for k in range(1, radial_order + 1):
        base = Fraction((-1) ** (k + 1), 2 * k)
        for i in range(k + 1):
            upow = 2 * i + (k - i)
            if upow > radial_order:
                continue
            key = (upow, k - i)
            c = base * math.comb(k, i) * Fraction(-2) ** (k - i)
            out[key] = out.get(key, Fraction(0)) + c
    return {k: v for k, v in out.items() if v}


def series_product(a, b, radial_order):
    out: dict[tuple[int, int], Fraction] = {}
    for (u1, c1), v1 in a.items():
        for (u2, c2), v2 in b.items():
            if u1 + u2 > radial_order:
                continue
            key = (u1 + u2, c1 + c2)
            out[key] = out.get(key, Fraction(0)) + v1 * v2
    return {k: v for k, v in out.items() if v}


def tensor_to_cos_powers(tensor, lam) -> dict[tuple[int, int], SymbolicCoeff]:
    """Expand Gegenbauer degrees into powers of cos, exactly."""
    out: dict[tuple[int, int], SymbolicCoeff] = {}
    for (n, d), coeff in tensor.items():
        for p, a in gegenbauer_coeffs(PolySpec(lam, d)).items():
            key = (n, p)
            prev = out.get(key, SymbolicCoeff.zero())
            acc = prev + coeff * a
            if acc.is_zero():
                out.pop(key, None)
            else:
                out[key] = acc
    return out


def as_symbolic(series) -> dict[tuple[int, int], SymbolicCoeff]:
    return {k: SymbolicCoeff.from_rational(v) for k, v in series.items()}


# -- coefficient examples -------------------------------------------------------


class TestTaylorCoefficients:
    def test_power_branch_leading(self):
        # lam=1, ell=-1 (Laurent index 0): coefficient (2 pi)^-2 of r^-2
        t = taylor_term_coefficient(TaylorTermSpec.make(-1, 1), 1)
        assert t.r_exponent == -2
        assert t.coeff_const == SymbolicCoeff.from_exact(two_pi_power(-2))
        assert t.coeff_log.is_zero()

    def test_log_branch_leading(self):
        # lam=1, ell=0: the log coefficient is +(2 pi)^-2 m^2/2 (the overall
        # (-1/(2 pi))^(lam+1) is positive at lam = 1)
        t = taylor_term_coefficient(TaylorTermSpec.make(0, 1), 1)
        assert t.r_exponent == 0
        want_log = SymbolicCoeff.monomial(two_pi_power(-2) * F(1, 2), m_exp=2)
        assert t.coeff_log == want_log
        # constant part: B * (log m - log 2 - (psi(1)+psi(2))/2), psi sum = 1 - 2 gamma
        want_const = want_log * (SymbolicCoeff.logm_symbol()
                                 - SymbolicCoeff.log2_symbol()
                                 - SymbolicCoeff.from_rational(F(1, 2))
                                 + SymbolicCoeff.gamma_symbol())
        assert t.coeff_const == want_const

    def test_massless_reduction(self):
        # at m = 0 only the ell = -lam term survives numerically
        lam, r = 2, 0.7
        lead = taylor_term_coefficient(TaylorTermSpec.make(-2, lam), lam)
        assert lead.eval(r, 0.0) == pytest.approx(
            float(two_pi_power(-3)) * 2 ** 1 * 1 * r ** -4, rel=1e-14)
        higher = taylor_term_coefficient(TaylorTermSpec.make(-1, lam), lam)
        assert higher.eval(r, 0.0) == 0.0

    def test_taylor_sum_converges_to_kernel(self):
        for lam in (1, 2, 3):
            D = 2 * lam + 2
            m, r = 0.1, 1.0
            direct = gm_real(Kinematics.radial(D, r, m))
            got = edge_taylor_value(lam, r, m, TruncationOrders(ell_max=20))
            assert abs(got - direct) / direct < 1e-10

    def test_half_integer_taylor(self):
        for lam, D in [(F(1, 2), 3), (F(3, 2), 5)]:
            m, r = 0.25, 0.8
            direct = gm_real(Kinematics.radial(D, r, m))
            got = edge_taylor_value(lam, r, m, TruncationOrders(ell_max=24))
            assert abs(got - direct) / direct < 1e-12

    def test_complex_case_via_weight_shift(self):
        # complex kernel in dimension D == real kernel at weight D - 1
        from confeyn.amplitude import complex_case_weight
        from confeyn.propagators import gm_complex
        D, m, r = 3, 0.2, 0.6
        lam = complex_case_weight(D)
        assert lam == F(2)
        direct = gm_complex(Kinematics.radial(D, r, m))
        got = edge_taylor_value(lam, r, m, TruncationOrders(ell_max=20))
        assert abs(got - direct) / direct < 1e-12

    def test_half_integer_has_no_log_branch(self):
        with pytest.raises(ValueError):
            taylor_term_coefficient(TaylorTermSpec(F(1), "log"), F(1, 2))

    def test_laurent_branch_needs_integer_order(self):
        with pytest.raises(ValueError):
            taylor_term_coefficient(TaylorTermSpec(F(1, 2), "power"), 1)


class TestAsymptoticCoefficients:
    def test_leading_coefficient_uses_unit(self):
        t = asymptotic_term_coefficient(0, 1)
        want = SymbolicCoeff.monomial(
            ExactScalar.term(F(1, 2), sqrt2=1, pi_half=1) * two_pi_power(-2),
            m_exp=F(1, 2))
        assert t.coeff == want
        assert t.r_exponent == -F(3, 2)

    def test_second_coefficient_proportional_to_three_quarters(self):
        t0 = asymptotic_term_coefficient(0, 1)
        t1 = asymptotic_term_coefficient(1, 1)
        # ratio of scalars: (1,1)/2 = 3/8, mass exponent drops by one
        r = t1.coeff.bind(m=1.0) / t0.coeff.bind(m=1.0)
        assert r == pytest.approx(3 / 8, rel=1e-14)

    def test_truncated_sum_matches_kernel_far_away(self):
        m, r = 1.0, 20.0
        direct = gm_real(Kinematics.radial(4, r, m))
        got = edge_asymptotic_value(1, r, m, TruncationOrders(asym_terms=6))
        assert abs(got - direct) / direct < 1e-8


# -- Gegenbauer expansions -------------------------------------------------------


class TestGegenExpansion:
    def test_massless_branch_unit_entries(self):
        exp = edge_gegenbauer_expansion(TaylorTermSpec.make(-1, 1), 1,
                                        TruncationOrders(radial=8))
        for n in range(9):
            assert exp.plain[(n, n)] == SymbolicCoeff.one()
        assert not exp.log_rho

    def test_worked_value(self):
        # cos = 0, r/rho = 1/2, bare 1/sep^2 = 0.8/rho^2
        exp = edge_gegenbauer_expansion(TaylorTermSpec.make(-1, 1), 1,
                                        TruncationOrders(radial=60))
        geom = EdgeGeometry(rho=1.0, r=0.5, cos=0.0)
        val = exp.evaluate(geom, m=1.0, include_prefactor=False)
        assert abs(val - 0.8) < 1e-10
        geom2 = EdgeGeometry(rho=3.0, r=1.5, cos=0.0)
        val2 = exp.evaluate(geom2, m=1.0, include_prefactor=False)
        assert abs(val2 - 0.8 / 9) < 1e-10

    def test_log_branch_pure_logrho_term(self):
        exp = edge_gegenbauer_expansion(TaylorTermSpec.make(0, 1), 1,
                                        TruncationOrders(radial=6))
        assert exp.log_rho == {(0, 0): SymbolicCoeff.one()}

    def test_degree_bounded_by_radial_power(self):
        for ell, lam in [(-1, 1), (0, 1), (1, 2), (F(-1, 2), F(1, 2)),
                         (F(1, 2), F(1, 2)), (1, F(3, 2))]:
            exp = edge_gegenbauer_expansion(TaylorTermSpec.make(ell, lam), lam,
                                            TruncationOrders(radial=10))
            for (n, d) in list(exp.plain) + list(exp.log_rho):
                assert d <= n

    @pytest.mark.parametrize("ell,lam", [
        (-1, 1), (-2, 2), (-1, 2),
        (F(-1, 2), F(1, 2)), (F(-3, 2), F(3, 2)), (F(-1, 2), F(3, 2)),
        (F(1, 2), F(1, 2)), (1, F(1, 2)), (F(3, 2), F(3, 2)), (2, F(1, 2)),
    ])
    def test_resummation_power_branch(self, ell, lam):
        # tensor expanded to cos powers == direct binomial series, exactly
        radial = 9
        exp = edge_gegenbauer_expansion(TaylorTermSpec.make(ell, lam), lam,
                                        TruncationOrders(radial=radial))
        got = tensor_to_cos_powers(exp.plain, lam)
        want = as_symbolic(binomial_series(F(ell), radial))
        assert got == want

    @pytest.mark.parametrize("ell,lam", [(0, 1), (1, 1), (2, 2), (1, 3)])
    def test_resummation_log_branch(self, ell, lam):
        from confeyn.specfun import digamma_exact
        radial = 8
        exp = edge_gegenbauer_expansion(TaylorTermSpec.make(ell, lam), lam,
                                        TruncationOrders(radial=radial))
        poly = binomial_series(F(ell), radial)
        # log(rho) tensor carries the bare polynomial
        assert tensor_to_cos_powers(exp.log_rho, lam) == as_symbolic(poly)
        # plain tensor: poly * (log m - log 2 - psi-sum/2) + poly * (1/2) log(1+Y)
        k0 = (SymbolicCoeff.logm_symbol() - SymbolicCoeff.log2_symbol()
              - F(1, 2) * (digamma_exact(ell + 1) + digamma_exact(lam + ell + 1)))
        want: dict[tuple[int, int], SymbolicCoeff] = {}
        for key, v in poly.items():
            want[key] = SymbolicCoeff.from_rational(v) * k0
        for key, v in series_product(poly, half_log_series(radial), radial).items():
            prev = want.get(key, SymbolicCoeff.zero())
            acc = prev + SymbolicCoeff.from_rational(v)
            if acc.is_zero():
                want.pop(key, None)
            else:
                want[key] = acc
        assert tensor_to_cos_powers(exp.plain, lam) == want

    def test_coefficient_field_structure(self):
        # integer lam: every fully-assembled entry has integer pi powers and
        # no sqrt(2); half-integer lam: entries stay in Q[sqrt(pi)^{+-1}]
        for ell, lam in [(-1, 1), (0, 1), (1, 2), (-2, 3)]:
            exp = edge_gegenbauer_expansion(TaylorTermSpec.make(ell, lam), lam,
                                            TruncationOrders(radial=6))
            for coeff in exp.full_entries():
                assert all(p % 2 == 0 for p in coeff.pi_half_exponents())
                for _, scalar in coeff.coefficients():
                    assert all(s == 0 for s, _, _ in scalar.terms())
        for ell, lam in [(F(-1, 2), F(1, 2)), (F(1, 2), F(1, 2)), (1, F(3, 2))]:
            exp = edge_gegenbauer_expansion(TaylorTermSpec.make(ell, lam), lam,
                                            TruncationOrders(radial=6))
            for coeff in exp.full_entries():
                assert isinstance(coeff, SymbolicCoeff)  # lies in the sqrt(pi) ring
                for _, scalar in coeff.coefficients():
                    assert all(s == 0 for s, _, _ in scalar.terms())

    def test_geometric_truncation_decay(self):
        # at u <= 1/2 the partial sums converge geometrically with per-order
        # rate <= 0.6 (individual deltas oscillate through the Gegenbauer
        # zeros, so the rate is measured as the long-run geometric mean)
        exp = edge_gegenbauer_expansion(TaylorTermSpec.make(-1, 1), 1,
                                        TruncationOrders(radial=40))
        for cos in (0.9, 0.3, -0.5):
            geom = EdgeGeometry(rho=1.0, r=0.5, cos=cos)
            exact = 1.0 / geom.separation() ** 2
            errors = []
            for cap in range(4, 31):
                capped = GegenExpansion(
                    exp.lam, exp.rho_exponent, exp.prefactor,
                    {k: v for k, v in exp.plain.items() if k[0] <= cap},
                    {}, cap)
                errors.append(abs(capped.evaluate(geom, 1.0, include_prefactor=False)
                                  - exact))
            steps = len(errors) - 1
            rate = (errors[-1] / errors[0]) ** (1.0 / steps)
            assert rate <= 0.6
            # and the decreasing envelope never grows
            env = [max(errors[i:]) for i in range(len(errors))]
            assert all(a >= b for a, b in zip(env, env[1:]))

    def test_full_edge_value_matches_kernel(self):
        geom = EdgeGeometry(rho=1.0, r=0.5, cos=0.3)
        xs = (1.0, 0.0, 0.0, 0.0)
        xt = (0.5 * 0.3, 0.5 * math.sqrt(1 - 0.09), 0.0, 0.0)
        m = 0.05
        direct = gm_real(Kinematics(4, tuple(a - b for a, b in zip(xs, xt)), m))
        got = edge_gegenbauer_value(1, geom, m, TruncationOrders(radial=40, ell_max=12))
        assert abs(got - direct) / direct < 1e-10

    def test_serialization_shape(self):
        exp = edge_gegenbauer_expansion(TaylorTermSpec.make(0, 1), 1,
                                        TruncationOrders(radial=3))
        doc = exp.to_json()
        assert set(doc) == {"lambda", "rho_exponent", "radial_order",
                            "prefactor", "plain", "log_rho"}
        assert all(set(e) == {"radial", "degree", "coeff"} for e in doc["plain"])


class TestAmplitudeEval:
    def geometry(self, D):
        pos = {0: (1.0,) + (0.0,) * (D - 1), 1: (0.0, 0.1) + (0.0,) * (D - 2)}
        return pos

    def test_single_edge_taylor_matches_direct(self):
        g = FeynmanGraph.build(2, [(0, 1)])
        for lam in (1, 2, 3):
            D = 2 * lam + 2
            pos = self.geometry(D)
            direct = amplitude_truncated_eval(g, pos, 0.1, lam, "direct")
            taylor = amplitude_truncated_eval(g, pos, 0.1, lam, "taylor",
                                              TruncationOrders(ell_max=20))
            assert abs(taylor - direct) / abs(direct) < 1e-10

    def test_single_edge_asymptotic(self):
        g = FeynmanGraph.build(2, [(0, 1)])
        pos = {0: (20.5, 0.0, 0.0, 0.0), 1: (0.5, 0.0, 0.0, 0.0)}
        direct = amplitude_truncated_eval(g, pos, 1.0, 1, "direct")
        asym = amplitude_truncated_eval(g, pos, 1.0, 1, "asymptotic",
                                        TruncationOrders(asym_terms=6))
        assert abs(asym - direct) / abs(direct) < 1e-8

    def test_product_over_edges(self):
        path = FeynmanGraph.build(3, [(0, 1), (1, 2)])
        pos = {0: (1.0, 0.0, 0.0, 0.0), 1: (0.0, 0.4, 0.0, 0.0),
               2: (0.0, 0.0, 0.2, 0.0)}
        total = amplitude_truncated_eval(path, pos, 0.3, 1, "direct")
        e1 = FeynmanGraph.build(2, [(0, 1)])
        v1 = amplitude_truncated_eval(e1, {0: pos[0], 1: pos[1]}, 0.3, 1, "direct")
        v2 = amplitude_truncated_eval(e1, {0: pos[1], 1: pos[2]}, 0.3, 1, "direct")
        assert total == pytest.approx(v1 * v2, rel=1e-14)

    def test_gegenbauer_method_matches_direct(self):
        g = FeynmanGraph.build(2, [(0, 1)])
        pos = {0: (1.0, 0.0, 0.0, 0.0), 1: (0.15, 0.25, 0.0, 0.0)}
        direct = amplitude_truncated_eval(g, pos, 0.05, 1, "direct")
        gegen = amplitude_truncated_eval(g, pos, 0.05, 1, "gegenbauer",
                                         TruncationOrders(radial=40, ell_max=12))
        assert abs(gegen - direct) / abs(direct) < 1e-9

    def test_divergent_ratio_rejected(self):
        g = FeynmanGraph.build(2, [(0, 1)])
        pos = {0: (1.0, 0.0, 0.0, 0.0), 1: (0.0, 1.0, 0.0, 0.0)}
        with pytest.raises(DivergentRatioError):
            amplitude_truncated_eval(g, pos, 0.1, 1, "gegenbauer")

    def test_coincident_points_rejected(self):
        g = FeynmanGraph.build(2, [(0, 1)])
        pos = {0: (1.0, 0.0, 0.0, 0.0), 1: (1.0, 0.0, 0.0, 0.0)}
        with pytest.raises(ValueError):
            amplitude_truncated_eval(g, pos, 0.1, 1, "direct")


class TestEdgeGeometry:
    def test_from_points(self):
        geom = EdgeGeometry.from_points((2.0, 0.0), (0.0, 1.0))
        assert geom.rho == 2.0 and geom.r == 1.0 and geom.cos == 0.0
        assert geom.separation() == pytest.approx(math.sqrt(5))

    def test_validation(self):
        with pytest.raises(ValueError):
            EdgeGeometry(rho=1.0, r=2.0, cos=0.0)
        with pytest.raises(ValueError):
            EdgeGeometry(rho=1.0, r=0.5, cos=1.5)
