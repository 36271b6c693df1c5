from fractions import Fraction

import mpmath
import pytest

from hamsing import CoeffPoly, autonomous_22, branching_23, branching_33, make_spec, painleve_22
from hamsing.algebra import CQ, AlgebraicScalar
from hamsing.errors import ConditionsViolated, TruncationTooShort
from hamsing.model import generic_symbols
from hamsing.series import (
    SeriesEngine,
    a_sym,
    all_leading_roots,
    check_conditions,
    alpha_jet_polys,
    derive_formal_series,
    determinant_polynomial,
    leading_coefficients,
    numeric_series,
    nth_derivative,
    per_branch_expressions,
    predicted_residual_exponent,
    recursion_matrix,
    residual_exponent,
    residual_scale,
    resonance_conditions,
    resonance_offsets,
    same_condition_set,
    series_residual,
    split_conditions,
    suggested_dps,
)

F = Fraction
QUARTER = F(1, 4)


def const(x, lc):
    return AlgebraicScalar([CQ.coerce(x)], lc.R, lc.kappa)


class TestLeadingCoefficients:
    def test_painleve_scaling(self):
        lc = leading_coefficients(painleve_22())
        assert lc.c1**3 == const(-1, lc)
        assert lc.c2 == lc.c1**2
        assert len(lc) == 3

    def test_normalized_22(self):
        lc = leading_coefficients(autonomous_22())
        assert lc.c1**3 == const(F(-1, 27), lc)
        assert lc.c2 == lc.c1**2 * CQ(3)

    def test_quarter_scaled_33(self):
        lc = leading_coefficients(make_spec(3, 3, QUARTER, QUARTER))
        assert lc.c1**8 == const(F(-1, 16), lc)
        assert lc.c2 == lc.c1**3 * CQ(2)
        assert len(lc) == 4

    def test_numeric_roots_satisfy_relation(self):
        roots = all_leading_roots(2, 3, 1, 1)
        assert len(roots) == 5
        kappa = complex(leading_coefficients(make_spec(2, 3)).kappa)
        assert all(abs(r**5 - kappa) < 1e-14 for r in roots)


class TestRecursion:
    def test_leading_order_is_singular(self):
        _, det = recursion_matrix(painleve_22(), -3)
        assert det == 0

    @pytest.mark.parametrize("M,N", [(M, N) for N in range(1, 5) for M in range(1, N + 1) if M * N > 1])
    def test_determinant_is_rational(self, M, N):
        spec = make_spec(M, N, F(2, 3), F(-1, 2))
        R = M * N - 1
        poly = determinant_polynomial(M, N)
        for n in range(-R, (M + 1) * (N + 1) + 3):
            _, det = recursion_matrix(spec, n)
            assert det * R * R == sum(c * n**k for k, c in enumerate(poly))

    def test_resonance_offsets_are_determinant_roots(self):
        for M, N in [(2, 2), (2, 3), (3, 3), (3, 5)]:
            poly = determinant_polynomial(M, N)
            for n in resonance_offsets(M, N):
                assert sum(c * n**k for k, c in enumerate(poly)) == 0


class TestConditions:
    def test_22(self):
        found = [c.expression for c in resonance_conditions(2, 2)]
        expected = [nth_derivative(a_sym(1, 1), 2), nth_derivative(a_sym(1, 0), 1), nth_derivative(a_sym(0, 1), 1)]
        assert same_condition_set(found, expected)

    def test_23(self):
        found = [c.expression for c in resonance_conditions(2, 3)]
        assert same_condition_set(found, [nth_derivative(a_sym(1, 2) * 3 - a_sym(2, 1) * a_sym(2, 1), 2)])

    def test_33_quarter_scaling(self):
        found = [c.expression for c in resonance_conditions(3, 3, QUARTER, QUARTER)]
        expected = [
            nth_derivative(a_sym(2, 0) * 2 - a_sym(1, 2) * a_sym(1, 2), 1),
            nth_derivative(a_sym(1, 1), 1),
            nth_derivative(a_sym(0, 2) * 2 - a_sym(2, 1) * a_sym(2, 1), 1),
        ]
        assert same_condition_set(found, expected)

    def test_33_unit_scaling_differs(self):
        # the squared coefficients pick up the scale of the leading terms
        found = [c.expression for c in resonance_conditions(3, 3)]
        quarter = [c.expression for c in resonance_conditions(3, 3, QUARTER, QUARTER)]
        assert not same_condition_set(found, quarter)
        assert len(found) == 3

    def test_34_has_none(self):
        assert resonance_conditions(3, 4) == []

    def test_12_reduces_to_first_painleve_test(self):
        # with alpha_11 = 0 the system is y2'' = -6 y2^2 - 2 alpha_01 - alpha_10', whose
        # single condition is that the forcing is linear in z
        assert len(resonance_conditions(1, 2)) == 1
        engine = SeriesEngine(1, 2, 1, 1, keys=[(1, 0), (0, 1)])
        (reduced,) = split_conditions(engine.compatibility(), engine)
        expected = nth_derivative(a_sym(0, 1) * 2 + nth_derivative(a_sym(1, 0), 1), 2)
        assert same_condition_set([reduced.expression], [expected])

    def test_condition_json(self):
        (cond,) = resonance_conditions(2, 3)
        js = cond.to_json()
        assert js["order"] == cond.order and "a[2,1,0]" in js["expression"]

    def test_one_free_parameter_per_resonance(self):
        for spec in (painleve_22(), branching_23()):
            series, conds = derive_formal_series(spec, K=12)
            assert len(series.free_parameters) == 1
            assert conds

    def test_spec_checks(self):
        check_conditions(painleve_22(beta=F(1, 2), gamma=F(-1, 3)))
        check_conditions(branching_33())
        check_conditions(branching_23())
        with pytest.raises(ConditionsViolated):
            check_conditions(painleve_22(alpha=CoeffPoly([0, 0, 1])))
        with pytest.raises(ConditionsViolated):
            check_conditions(make_spec(2, 3, 1, 1, {(1, 2): [0, 0, 1]}))

    @pytest.mark.parametrize("alpha,vanishes", [(CoeffPoly([0, 1]), True), (CoeffPoly([0, 0, 1]), False)])
    def test_branch_covariance(self, alpha, vanishes):
        spec = painleve_22(alpha=alpha, beta=F(1, 2))
        engine = SeriesEngine.for_spec(spec)
        values = {sid: p.evaluate(0.4) for sid, p in alpha_jet_polys(spec, 6).items()}
        per_class = per_branch_expressions(engine.compatibility(), engine, values)
        assert len(per_class) == 3
        mags = [abs(v) for vals in per_class.values() for v in vals]
        assert all(m < 1e-12 for m in mags) if vanishes else all(m > 1e-6 for m in mags)

    def test_generic_keys(self):
        assert generic_symbols(2, 2) == [(0, 1), (1, 0), (1, 1)]


class TestFormalSeries:
    def test_autonomous_series_terminates(self):
        series, conds = derive_formal_series(autonomous_22(), K=10)
        assert conds == []
        nonzero = [n for n, a in enumerate(series.coeffs1) if a]
        free = {n for _, k in series.free_parameters for n in [k + 3]}
        assert set(nonzero) <= {0} | free

    def test_truncation_too_short(self):
        with pytest.raises(TruncationTooShort):
            derive_formal_series(painleve_22(), K=-5)

    def test_exponents_collapse_by_d(self):
        ser = numeric_series(branching_33(), 0.5, K=10)
        assert all(abs(a) == 0 for n, a in enumerate(ser.coeffs1) if n % 4)

    def test_autonomous_numeric(self):
        c1 = -1 / 3
        ser = numeric_series(autonomous_22(), 0.0, K=10, root=c1)
        assert abs(ser.coeffs1[0] - c1) < 1e-15
        assert all(abs(a) == 0 for a in ser.coeffs1[1:])
        assert abs(ser.coeffs2[0] - 3 * c1 * c1) < 1e-15
        r = series_residual(autonomous_22(), ser, 0.1 + 0.05j)
        assert abs(r[0]) < 1e-12 and abs(r[1]) < 1e-12

    def test_free_parameter_only_affects_later_orders(self):
        spec = painleve_22(beta=1, gamma=1)
        a = numeric_series(spec, 1.0, K=10)
        b = numeric_series(spec, 1.0, K=10, free_params=[2.0])
        assert a.coeffs1[:9] == b.coeffs1[:9]
        assert a.coeffs1[9] != b.coeffs1[9]

    def test_violating_spec_rejected(self):
        with pytest.raises(ConditionsViolated):
            numeric_series(painleve_22(alpha=CoeffPoly([0, 0, 1])), 1.0)


class TestResidual:
    def test_painleve_residual_small(self):
        spec = painleve_22(beta=1, gamma=1)
        dps = suggested_dps(spec, 10, 1e-2)
        ser = numeric_series(spec, 1.0, K=10, dps=dps)
        r = series_residual(spec, ser, 1e-2, dps=dps)
        assert max(abs(r[0]), abs(r[1])) / residual_scale(spec, 1e-2) < 1e-12

    @pytest.mark.parametrize("make", [lambda: painleve_22(beta=1, gamma=1), branching_23, branching_33])
    def test_residual_exponent(self, make):
        spec = make()
        dps = suggested_dps(spec, 10, 1e-2)
        ser = numeric_series(spec, 0.7, K=10, dps=dps)
        assert abs(residual_exponent(spec, ser, 1e-2, dps) - predicted_residual_exponent(spec, 10)) < 0.1

    def test_perturbation_lowers_order(self):
        spec = painleve_22(beta=1, gamma=1)
        dps = suggested_dps(spec, 10, 1e-2)
        ser = numeric_series(spec, 1.0, K=10, dps=dps)
        with mpmath.workdps(dps):
            ser.coeffs1[6] += mpmath.mpf("1e-3")
        # y1 index 3 (offset 6) now contributes at t^(6 - 3 - 1 - 2*0) relative to the scale
        measured = residual_exponent(spec, ser, 1e-2, dps)
        assert measured < predicted_residual_exponent(spec, 10) - 3
