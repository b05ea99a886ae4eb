import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg

from polylin import (
    DEFAULT_TOLERANCES,
    EigenTriple,
    MatrixPolynomial,
    Pencil,
    ScalingSpec,
    backward_error_left,
    backward_error_pencil,
    backward_error_right,
    build,
    cond_number,
    cond_number_pencil,
    diagnose,
    growth_factors,
    lift,
    oracle_problem,
    random_polynomial,
)
from polylin.exceptions import (
    BoundNotApplicableException,
    DegenerateNormsException,
    ExcludedEigenvalueException,
    IndexRangeException,
    InvalidArgumentException,
    InvalidGradeException,
    NonSimpleEigenvalueException,
    ZeroPolynomialException,
)
from polylin.linearize import structural_matrices
from polylin.metrics import (
    backward_ratio,
    bound_C1_back,
    bound_C1_cond,
    bound_Dt_back,
    bound_Dt_cond,
    bound_T_back,
    bound_T_cond,
    d1,
    growth_factors_from_norms,
    within_bounds,
)
from polylin.recover import delta_vector

ORACLE_ROOTS = [0.5, 2.0, -1.5, 3j, 0.25 + 0.5j, -4.0]
UNSCALED_NORMS = [55.5, 45.2, 24.1, 41.7]
SCALED_NORMS = [0.99, 0.97, 1.0, 0.94]

seeds = st.integers(min_value=0, max_value=2**32 - 1)
nonzero_points = st.builds(
    complex,
    st.floats(min_value=-3, max_value=3, allow_nan=False),
    st.floats(min_value=-3, max_value=3, allow_nan=False),
).filter(lambda z: abs(z) > 0.05)


@pytest.fixture
def oracle():
    return oracle_problem(2, 3, ORACLE_ROOTS, seed=5)


@pytest.fixture
def unit_cubic():
    """A scalar cubic whose coefficient norms are all 1."""
    return MatrixPolynomial([1.0, 1.0, 1.0, 1.0])


def random_vector(n, seed):
    rng = np.random.Generator(np.random.Philox(seed))
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


class TestCondNumber:
    def test_cubic(self, cubic):
        assert cond_number(cubic, EigenTriple(1.0, np.ones(1), np.ones(1))) == pytest.approx(2 / 3, rel=1e-15)

    def test_linear(self):
        P = MatrixPolynomial([-1.0, 1.0])
        assert cond_number(P, EigenTriple(1.0, np.ones(1), np.ones(1))) == pytest.approx(2.0)

    def test_custom_weights(self, cubic):
        kappa = cond_number(cubic, EigenTriple(1.0, np.ones(1), np.ones(1)), weights=[2.0, 0.0, 0.0, 1.0])
        assert kappa == pytest.approx(1.0)

    def test_weights_length(self, cubic):
        with pytest.raises(InvalidArgumentException):
            cond_number(cubic, EigenTriple(1.0, np.ones(1), np.ones(1)), weights=[1.0, 1.0])

    @pytest.mark.parametrize("delta", [0.0, math.inf])
    def test_excluded_eigenvalues(self, cubic, delta):
        with pytest.raises(ExcludedEigenvalueException):
            cond_number(cubic, EigenTriple(delta, np.ones(1), np.ones(1)))

    def test_double_root(self):
        P = MatrixPolynomial([1.0, -2.0, 1.0])
        with pytest.raises(NonSimpleEigenvalueException):
            cond_number(P, EigenTriple(1.0, np.ones(1), np.ones(1)))

    def test_pencil_on_T_of_cubic(self, cubic):
        z = np.ones(3)
        assert cond_number_pencil(build(cubic, "T"), 1.0, z, z) == pytest.approx(2.0)

    def test_identity_pencil(self):
        z = np.array([0.6, 0.8j])
        assert cond_number_pencil(Pencil(np.eye(2), np.eye(2)), 1.0, z, z) == pytest.approx(2.0)

    def test_pencil_agrees_with_polynomial_form(self, oracle):
        P, triples = oracle
        L = build(P, "C1")
        for t in triples:
            z, w = lift(P, t, "C1")
            expected = cond_number(L.as_polynomial, EigenTriple(t.delta, z, w))
            assert cond_number_pencil(L, t.delta, z, w) == pytest.approx(expected, rel=1e-14)

    def test_scaling_invariance(self, oracle):
        P, triples = oracle
        spec = ScalingSpec(0.3, 2.5)
        S = P.scale(spec)
        for t in triples:
            scaled = EigenTriple(t.delta / spec.gamma, t.x, t.y)
            assert cond_number(S, scaled) == pytest.approx(cond_number(P, t), rel=1e-10)

    def test_reversal_invariance(self, oracle):
        P, triples = oracle
        rev = P.reversal()
        for t in triples:
            flipped = EigenTriple(1 / t.delta, t.x, t.y)
            assert cond_number(rev, flipped) == pytest.approx(cond_number(P, t), rel=1e-12)

    def test_T_reversal_invariance(self, oracle):
        P, triples = oracle
        rev = P.reversal()
        L, L_rev = build(P, "T"), build(rev, "T")
        for t in triples:
            flipped = EigenTriple(1 / t.delta, t.x, t.y)
            kappa = cond_number_pencil(L, t.delta, *lift(P, t, "T"))
            kappa_rev = cond_number_pencil(L_rev, flipped.delta, *lift(rev, flipped, "T"))
            assert kappa_rev == pytest.approx(kappa, rel=1e-8)

    def test_T_and_R_agree(self, oracle):
        P, triples = oracle
        T, R = build(P, "T"), build(P, "R")
        for t in triples:
            kappa_T = cond_number_pencil(T, t.delta, *lift(P, t, "T"))
            kappa_R = cond_number_pencil(R, t.delta, *lift(P, t, "R"))
            assert kappa_R == pytest.approx(kappa_T, rel=1e-12)


class TestBackwardError:
    def test_cubic(self, cubic):
        assert backward_error_right(cubic, np.ones(1), 2.0) == pytest.approx(7 / 9, rel=1e-15)
        assert backward_error_left(cubic, np.ones(1), 2.0) == pytest.approx(7 / 9, rel=1e-15)

    def test_exact_pair(self, cubic):
        assert backward_error_right(cubic, np.ones(1), 1.0) == 0.0

    def test_vector_scale_is_irrelevant(self, cubic):
        assert backward_error_right(cubic, np.array([-3j]), 2.0) == pytest.approx(7 / 9)

    def test_zero_vector(self, cubic):
        with pytest.raises(InvalidArgumentException):
            backward_error_right(cubic, np.zeros(1), 2.0)

    def test_zero_polynomial(self):
        with pytest.raises(ZeroPolynomialException):
            backward_error_right(MatrixPolynomial([np.zeros((2, 2))] * 2), np.ones(2), 1.0)

    def test_infinite_eigenvalue(self, cubic):
        with pytest.raises(ExcludedEigenvalueException):
            backward_error_right(cubic, np.ones(1), math.inf)
        with pytest.raises(ExcludedEigenvalueException):
            backward_error_left(cubic, np.ones(1), complex(math.inf, 0))
        with pytest.raises(ExcludedEigenvalueException):
            backward_error_pencil(Pencil(np.eye(2), np.eye(2)), np.ones(2), math.nan)

    def test_zero_eigenvalue_with_vanishing_trailing_coefficient(self):
        P = MatrixPolynomial([0.0, -1.0, 0.0, 1.0])
        assert backward_error_right(P, np.ones(1), 0.0) == 0.0
        assert backward_error_left(P, np.ones(1), 0.0) == 0.0
        assert backward_error_right(P, np.ones(1), 1e-3) == pytest.approx((1e-3 - 1e-9) / (1e-3 + 1e-9))

    def test_pencil_sides(self):
        L = Pencil(np.eye(2), [[1.0, 1.0], [0.0, 2.0]])
        e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        assert backward_error_pencil(L, e1, 1.0) == 0.0
        assert backward_error_pencil(L, e2, 1.0, side="left") == pytest.approx(1 / (1 + L.norms[1]))

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, delta=nonzero_points)
    def test_reversal_invariance(self, seed, delta):
        P = random_polynomial(3, 4, seed)
        x = random_vector(3, seed)
        expected = backward_error_right(P, x, delta)
        assert backward_error_right(P.reversal(), x, 1 / delta) == pytest.approx(expected, rel=1e-10)

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, mu=nonzero_points)
    def test_scaling_transport(self, seed, mu):
        P = random_polynomial(3, 3, seed)
        spec = ScalingSpec(0.3, 2.5)
        x = random_vector(3, seed)
        expected = backward_error_right(P, x, spec.gamma * mu)
        assert backward_error_right(P.scale(spec), x, mu) == pytest.approx(expected, rel=1e-10)

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, delta=nonzero_points)
    def test_left_error_is_right_error_of_adjoint(self, seed, delta):
        P = random_polynomial(3, 3, seed)
        y = random_vector(3, seed)
        expected = backward_error_right(P.conjugate_transpose(), y, np.conj(delta))
        assert backward_error_left(P, y, delta) == pytest.approx(expected, rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, delta=nonzero_points, k=st.sampled_from([3, 5]))
    def test_T_reversal_transport(self, seed, delta, k):
        P = random_polynomial(2, k, seed)
        R, _, D = structural_matrices(k, 2)
        z = random_vector(2 * k, seed)
        expected = backward_error_pencil(build(P, "T"), z, delta)
        actual = backward_error_pencil(build(P.reversal(), "T"), R @ D @ z, 1 / delta)
        assert actual == pytest.approx(expected, rel=1e-10)


class TestGrowthFactors:
    def test_unit_norms(self, unit_cubic):
        g = growth_factors(unit_cubic)
        for value in (g.rho, g.rho1, g.rho2, g.rho_prime, g.nu, g.tau):
            assert value == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "field,expected,rel",
        [("rho", 1.3, 5e-2), ("rho_prime", 74.1, 1e-2), ("rho1", 4117.0, 1e-2)],
    )
    def test_unscaled_table(self, field, expected, rel):
        g = growth_factors_from_norms(UNSCALED_NORMS)
        assert getattr(g, field) == pytest.approx(expected, rel=rel)

    @pytest.mark.parametrize("field", ["rho", "rho1", "rho_prime"])
    def test_scaled_table(self, field):
        assert getattr(growth_factors_from_norms(SCALED_NORMS), field) == pytest.approx(1.066, rel=5e-2)

    def test_rho_is_at_least_one(self):
        for seed in range(20):
            g = growth_factors(random_polynomial(3, 3, seed))
            assert g.rho >= 1.0
            assert g.rho1 >= g.rho_prime

    @pytest.mark.parametrize("norms", [[0.0, 1.0, 1.0], [1.0, 1.0, 0.0]])
    def test_degenerate(self, norms):
        with pytest.raises(DegenerateNormsException):
            growth_factors_from_norms(norms)

    def test_too_short(self):
        with pytest.raises(InvalidArgumentException):
            growth_factors_from_norms([1.0])


class TestD1:
    def test_at_zero(self):
        assert d1(0.0, 3) == 1.0

    def test_on_unit_circle(self):
        assert d1(1j, 3) == pytest.approx(6.0)
        assert d1(1.0, 3) == pytest.approx(2 + 4)

    def test_against_double_loop(self):
        a, k = 0.5, 5
        total = 0.0
        for r in range((k - 1) // 2 + 1):
            total += a ** (2 * r)
        for r in range(1, (k - 1) // 2 + 1):
            for s in range(r, k - r + 1):
                total += (k - 2 * r + 1) * a ** (2 * s)
        assert d1(-0.5, 5) == pytest.approx(total, rel=1e-15)

    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_rejects_grade(self, k):
        with pytest.raises(InvalidGradeException):
            d1(0.5, k)

    @pytest.mark.parametrize("k", [3, 5, 7, 9])
    def test_bound_inside_unit_disc(self, k):
        for a in np.linspace(0.0, 1.0, 11):
            assert d1(a, k) <= ((k + 1) / 2 + (k - 1) ** 3 / 2 * a**2) * (1 + 1e-12)

    @pytest.mark.parametrize("m", [0, 1, 3, 6])
    def test_power_sum_cauchy_schwarz(self, m):
        for a in np.linspace(0.0, 3.0, 31):
            powers = a ** np.arange(m + 1)
            assert powers.sum() ** 2 <= (m + 1) * (powers**2).sum() * (1 + 1e-12)

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, k=st.sampled_from([3, 5, 7]), delta=nonzero_points)
    def test_bounds_delta_norm(self, seed, k, delta):
        P = random_polynomial(2, k, seed)
        top = max(1.0, P.max_norm)
        assert linalg.norm(delta_vector(P, delta), 2) <= math.sqrt(d1(delta, k)) * top * (1 + 1e-12)


class TestBounds:
    def test_T_cond(self, unit_cubic):
        assert bound_T_cond(unit_cubic, 1.0) == pytest.approx((1.0, 54.0))
        assert bound_T_cond(unit_cubic, 0.1)[1] == pytest.approx(16.0)
        assert bound_T_cond(unit_cubic, 10.0)[1] == pytest.approx(16.0)
        assert bound_T_cond(unit_cubic, 0.9)[1] == pytest.approx(54.0)

    def test_T_cond_near_unit_circle_is_untightened(self):
        P = MatrixPolynomial([1.0, 1.0, 1.0])
        assert bound_T_cond(P, 1.0 + 1e-14)[1] == pytest.approx(16.0)
        assert bound_T_cond(P, 1.5)[1] == pytest.approx(12.0)

    def test_T_back(self, unit_cubic):
        assert bound_T_back(unit_cubic, 1.0, 1.0) == pytest.approx(20.78, rel=1e-3)
        assert bound_T_back(unit_cubic, 0.1, 1.0) == pytest.approx(8.0)
        assert bound_T_back(unit_cubic, 1.0, 2.0) == pytest.approx(2 * 20.78, rel=1e-3)

    def test_Dt_cond(self, unit_cubic):
        assert bound_Dt_cond(unit_cubic, 2.0, 1) == pytest.approx((1.0, 9.0))
        assert bound_Dt_cond(unit_cubic, 0.5, 3) == pytest.approx((1.0, 9.0))

    @pytest.mark.parametrize("delta,t", [(2.0, 3), (0.5, 1)])
    def test_Dt_cond_out_of_range(self, unit_cubic, delta, t):
        with pytest.raises(BoundNotApplicableException):
            bound_Dt_cond(unit_cubic, delta, t)

    def test_Dt_cond_singular_end_coefficient(self):
        P = MatrixPolynomial([np.diag([1.0, 0.0]), np.eye(2), np.eye(2), np.eye(2)])
        with pytest.raises(BoundNotApplicableException):
            bound_Dt_cond(P, 2.0, 1)
        assert bound_Dt_cond(P, 0.5, 3)[1] == pytest.approx(9.0)

    def test_Dt_index(self, unit_cubic):
        with pytest.raises(IndexRangeException):
            bound_Dt_cond(unit_cubic, 1.0, 2)
        with pytest.raises(IndexRangeException):
            bound_Dt_back(unit_cubic, 1.0, 2)

    def test_Dt_back(self, unit_cubic):
        assert bound_Dt_back(unit_cubic, 1.0, 1) == pytest.approx(5.196, rel=1e-3)

    def test_C1_cond(self, unit_cubic):
        lower, upper = bound_C1_cond(unit_cubic, 3.0)
        assert lower == pytest.approx(0.25)
        assert upper == pytest.approx(16.0)
        assert bound_C1_cond(unit_cubic, 0.5)[1] == pytest.approx(16.0)
        assert bound_C1_cond(unit_cubic, 1.0)[1] == pytest.approx(2 * math.sqrt(2) * 27)

    def test_C1_back(self, unit_cubic):
        assert bound_C1_back(unit_cubic, 1.0) == pytest.approx(15.59, rel=1e-3)
        assert bound_C1_back(unit_cubic, 1.0, side="left") == pytest.approx(5.196, rel=1e-3)
        with pytest.raises(InvalidArgumentException):
            bound_C1_back(unit_cubic, 1.0, side="up")

    def test_zero_eigenvalue(self, unit_cubic):
        with pytest.raises(ExcludedEigenvalueException):
            bound_T_cond(unit_cubic, 0.0)

    def test_bound_scale(self, unit_cubic):
        tolerances = DEFAULT_TOLERANCES.override(bound_scale=0.5)
        assert bound_T_cond(unit_cubic, 1.0, tolerances)[1] == pytest.approx(27.0)
        assert bound_C1_back(unit_cubic, 1.0, tolerances=tolerances) == pytest.approx(15.59 / 2, rel=1e-3)

    @pytest.mark.parametrize("norms,upper", [(UNSCALED_NORMS, 222319.0), (SCALED_NORMS, 57.59)])
    def test_T_cond_table(self, norms, upper):
        assert bound_T_cond(MatrixPolynomial(norms), 1.0)[1] == pytest.approx(upper, rel=1e-2)

    @pytest.mark.parametrize("norms,upper", [(UNSCALED_NORMS, 5658.99), (SCALED_NORMS, 81.44)])
    def test_C1_cond_table(self, norms, upper):
        assert bound_C1_cond(MatrixPolynomial(norms), 1.0)[1] == pytest.approx(upper, rel=1e-2)

    def test_Dt_cond_table(self):
        assert bound_Dt_cond(MatrixPolynomial(UNSCALED_NORMS), 1.0, 1)[1] == pytest.approx(12.0, rel=1e-2)


class TestPredicates:
    def test_within_bounds(self):
        assert within_bounds(1.0, 0.5, 2.0)
        assert within_bounds(2.0 * (1 + 1e-11), 0.5, 2.0)
        assert not within_bounds(2.1, 0.5, 2.0)
        assert not within_bounds(0.4, 0.5, 2.0)
        assert within_bounds(1e9, None, None)

    def test_within_bounds_rejects_nan(self):
        assert not within_bounds(math.nan, None, 2.0)

    def test_backward_ratio(self):
        assert backward_ratio(0.0, 0.0) == 0.0
        assert backward_ratio(1e-16, 0.0) == math.inf
        assert backward_ratio(1.0, 4.0) == 0.25


class TestDiagnose:
    def test_T_on_cubic(self, cubic):
        ones = np.ones(3)
        d = diagnose(cubic, build(cubic, "T"), 1.0, ones, ones)
        assert d.lin == "T"
        assert d.kappa_P == pytest.approx(2 / 3)
        assert d.kappa_L == pytest.approx(2.0)
        assert d.cond_ratio == pytest.approx(3.0)
        assert d.norm_ratio == pytest.approx(math.sqrt(3))
        assert d.back_ratio == 0.0
        assert (d.cond_lower, d.cond_upper) == pytest.approx((1.0, 54.0))
        assert d.passed
        assert d.back_ratio_left is None

    def test_C1_reports_left_side(self, cubic):
        ones = np.ones(3)
        d = diagnose(cubic, build(cubic, "C1"), 1.0, ones, ones)
        assert d.cond_ratio == pytest.approx(3.0)
        assert d.back_pass_left is True
        assert d.back_upper_left == pytest.approx(3**1.5 * math.sqrt(3))
        assert d.passed

    def test_Dk_outside_range_has_no_cond_bound(self, oracle):
        P, triples = oracle
        t = next(t for t in triples if abs(t.delta) > 1)
        d = diagnose(P, build(P, "Dk"), t.delta, *lift(P, t, "Dk"))
        assert d.cond_upper is None
        assert d.cond_pass is None

    def test_reference_vectors(self, oracle):
        P, triples = oracle
        L = build(P, "T")
        for t in triples:
            d = diagnose(P, L, t.delta, *lift(P, t, "T"), x=t.x, y=t.y)
            assert d.kappa_P == pytest.approx(cond_number(P, t), rel=1e-12)
            assert d.cond_pass

    def test_bound_violation_is_reported(self, cubic, caplog):
        ones = np.ones(3)
        tolerances = DEFAULT_TOLERANCES.override(bound_scale=1e-3)
        d = diagnose(cubic, build(cubic, "T"), 1.0, ones, ones, tolerances=tolerances)
        assert d.cond_pass is False
        assert not d.passed
        assert "Bound violated" in caplog.text

    def test_to_dict(self, cubic):
        ones = np.ones(3)
        data = diagnose(cubic, build(cubic, "T"), 1.0, ones, ones).to_dict()
        assert data["delta"] == [1.0, 0.0]
        assert data["passed"] is True
