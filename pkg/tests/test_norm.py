import math

import mpmath
import pytest
from hypothesis import given, settings
from scipy import integrate

from morreygeom.errors import DivergentAtOrigin, NotInSpace, NumericalOverflow
from morreygeom.norm import Method, NormResult, ball_norm, centered_norm, cumulative_integral
from morreygeom.oracle import oracle_norm
from morreygeom.space import INF, RadialFunction, SpaceParams, Variant, negate, scale, sphere_area

from strategies import space_and_function, space_and_pair

rf = RadialFunction.from_pieces


def f_unit(sp):
    return rf([(0, 1, 1.0, sp.critical_alpha)])


def expected_f_norm(sp):
    return (sphere_area(sp.d) / sp.d) ** (1 / sp.q) * (1 - sp.p / sp.q) ** (-1 / sp.p)


# -- cumulative integral ---------------------------------------------------------

@pytest.mark.parametrize("R", [1e-6, 0.01, 0.3, 0.999, 1.0])
def test_cumulative_integral_power_from_origin(R):
    sp = SpaceParams(1, 1, 2)
    integral = cumulative_integral(f_unit(sp), sp)
    quad, _ = integrate.quad(lambda r: r**-0.5, 0, R, epsabs=0, epsrel=1e-12)
    assert integral(R) == pytest.approx(2 * math.sqrt(R), rel=1e-14)
    assert integral(R) == pytest.approx(quad, rel=1e-10)


def test_cumulative_integral_zero_function():
    integral = cumulative_integral(RadialFunction.zero(), SpaceParams(2, 1, 3))
    assert integral(0.5) == 0.0
    assert integral(1e6) == 0.0


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.01])
@pytest.mark.parametrize("d, p, q", [(1, 1, 2), (2, 2, 3), (3, 1.5, 4)])
def test_cumulative_integral_annulus(eps, d, p, q):
    sp = SpaceParams(d, p, q)
    h = rf([(eps, 1, 1.0, sp.critical_alpha)])
    integral = cumulative_integral(h, sp)
    gamma = d * (1 - p / q)
    for R in (eps * 1.5, 0.7, 1.0):
        if R <= 1.0 and R > eps:
            assert integral(R) == pytest.approx((R**gamma - eps**gamma) / gamma, rel=1e-13)
    assert integral(eps / 2) == 0.0
    assert integral(3.0) == pytest.approx(integral(1.0), rel=1e-15)


def test_cumulative_integral_is_continuous_and_nondecreasing():
    sp = SpaceParams(2, 1.5, 4)
    f = rf([(0, 0.3, 2.0, -0.4), (0.3, 0.9, -0.5, -0.4), (1.5, 2.0, 1.0, -0.4)])
    integral = cumulative_integral(f, sp)
    radii = [0.01 * k for k in range(1, 300)]
    values = [integral(r) for r in radii]
    assert all(b >= a for a, b in zip(values, values[1:]))
    for b in (0.3, 0.9, 1.5, 2.0):
        assert integral(b * (1 - 1e-12)) == pytest.approx(integral(b * (1 + 1e-12)), rel=1e-10)


def test_cumulative_integral_log_segment():
    sp = SpaceParams(1, 1, 2, Variant.CLASSICAL)
    f = rf([(1, INF, 3.0, -1.0)])
    integral = cumulative_integral(f, sp)
    assert integral.segments[1].log_term
    assert integral(math.e**2) == pytest.approx(6.0, rel=1e-14)


def test_cumulative_integral_divergent_at_origin():
    with pytest.raises(DivergentAtOrigin):
        cumulative_integral(rf([(0, 1, 1.0, -1.0)]), SpaceParams(1, 1, 2))


# -- centered norm: worked examples -----------------------------------------------

def test_f_norm_d1():
    result = centered_norm(f_unit(SpaceParams(1, 1, 2)), SpaceParams(1, 1, 2))
    assert result.value == pytest.approx(2 * math.sqrt(2), rel=1e-15)
    assert result.method is Method.CLOSED_FORM
    assert result.attained


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("d, p, q", [(1, 1, 2), (2, 2, 3), (3, 1.5, 4), (5, 1, 8), (2, 7.5, 8)])
def test_f_norm_formula(d, p, q, variant):
    sp = SpaceParams(d, p, q, variant)
    assert centered_norm(f_unit(sp), sp).value == pytest.approx(expected_f_norm(sp), rel=1e-13)


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.01])
def test_witness_chain(eps):
    sp = SpaceParams(2, 1, 3)
    a = sp.critical_alpha
    nf = centered_norm(f_unit(sp), sp).value
    h = centered_norm(rf([(eps, 1, 1.0, a)]), sp)
    assert h.value == pytest.approx((1 - eps**sp.gamma) ** (1 / sp.p) * nf, rel=1e-13)
    assert not h.attained and h.r_star == 1.0
    g = centered_norm(rf([(0, eps, 1.0, a)]), sp)
    assert g.value == pytest.approx(nf, rel=1e-14)
    assert g.attained and g.r_star == eps
    k = rf([(0, eps, 1.0, a), (eps, 1, -1.0, a)])
    assert centered_norm(k, sp).value == pytest.approx(nf, rel=1e-14)
    l = rf([(0, eps, 1.25, a), (eps, 1, 0.75, a)])
    assert centered_norm(l, sp).value == pytest.approx(1.25 * nf, rel=1e-14)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_tiny_radius_peak_keeps_full_precision(d):
    # the peak of l sits at R = 2^-20, where log R^beta and log R^s nearly cancel
    sp = SpaceParams(d, 1, 2)
    eps = 2.0**-20
    l = rf([(0, eps, 1 + eps, sp.critical_alpha), (eps, 1, 1 - eps, sp.critical_alpha)])
    mpmath.mp.dps = 40
    c_d = 2 * mpmath.pi ** (mpmath.mpf(d) / 2) / mpmath.gamma(mpmath.mpf(d) / 2)
    expected = (1 + mpmath.mpf(eps)) * (c_d / d) ** 0.5 * 2
    assert centered_norm(l, sp).value == pytest.approx(float(expected), rel=4e-16)


def test_critical_exponent_residue_off_origin():
    # -d/q rounds so that beta + s is -1e-16 rather than 0: no interior maximum exists
    sp = SpaceParams(1, 5.359375, 5.625)
    a = -0.17777777777777778
    f = rf([(0, 0.5, 1.0, a), (0.5, 1.0, 2.0, a), (1.0, 1.5, 1.0, a)])
    result = centered_norm(f, sp)
    assert result.value == pytest.approx(oracle_norm(f, sp, 1e-10).value, rel=1e-9)


def test_one_ulp_piece():
    # adding pieces whose edges differ by rounding leaves a sliver one ulp wide
    sp = SpaceParams(1, 3, 4, Variant.CLASSICAL)
    f = rf([(0.010000000000000002, 1.01, 1.0, -0.25), (1.01, INF, 1.0, -0.25)])
    h = f + rf([(0.01, 1.01, 1.0, -0.25)])
    assert h.pieces[0].r_hi - h.pieces[0].r_lo < 1e-17
    assert centered_norm(h, sp).value == pytest.approx(oracle_norm(h, sp, 1e-10).value, rel=1e-9)


def test_interior_critical_point():
    # r^-2 on (1, 10), d=1, p=1, q=2: N(R) = sqrt2 R^(-1/2) (1 - 1/R), peak at R = 3
    sp = SpaceParams(1, 1, 2, Variant.CLASSICAL)
    result = centered_norm(rf([(1, 10, 1.0, -2.0)]), sp)
    assert result.r_star == pytest.approx(3.0, rel=1e-13)
    assert result.value == pytest.approx(2 * math.sqrt(2) / (3 * math.sqrt(3)), rel=1e-14)
    assert result.attained


def test_logarithmic_segment_peak():
    # r^-1 on (1, inf), d=1, p=1, q=2: N(R) = sqrt2 R^(-1/2) log R, peak at R = e^2
    sp = SpaceParams(1, 1, 2, Variant.CLASSICAL)
    result = centered_norm(rf([(1, INF, 1.0, -1.0)]), sp)
    assert result.r_star == pytest.approx(math.e**2, rel=1e-13)
    assert result.value == pytest.approx(2 * math.sqrt(2) / math.e, rel=1e-14)


def test_limit_at_infinity_not_attained():
    # |f| = r^(-1/2) on (0, 2), 3 r^(-1/2) beyond: N increases towards 3 ||f||
    sp = SpaceParams(1, 1, 2, Variant.CLASSICAL)
    f = rf([(0, 2, 1.0, -0.5), (2, INF, -3.0, -0.5)])
    result = centered_norm(f, sp)
    assert result.value == pytest.approx(3 * 2 * math.sqrt(2), rel=1e-14)
    assert result.r_star == INF and not result.attained


def test_zero_and_far_support():
    sp = SpaceParams(2, 1, 3)
    assert centered_norm(RadialFunction.zero(), sp).value == 0.0
    # beyond the unit ball the small variant sees nothing
    assert centered_norm(rf([(1.5, 2, 1.0, 0.0)]), sp).value == 0.0
    assert centered_norm(rf([(1.5, 2, 1.0, 0.0)]), sp.with_variant("classical")).value > 0.0


def test_not_in_space_raises():
    with pytest.raises(NotInSpace):
        centered_norm(rf([(0, INF, 1.0, -0.4)]), SpaceParams(1, 1, 2, Variant.CLASSICAL))
    with pytest.raises(DivergentAtOrigin):
        centered_norm(rf([(0, 1, 1.0, -0.5)]), SpaceParams(1, 2, 2))


def test_high_dimension_without_overflow():
    # constant c on (0, 1000) in d = 200: N(R) = c (C_d/d)^(1/q) R^(d/q), maximal at R = 1000
    d, q = 200, 2.0
    sp = SpaceParams(d, 1.0, q, Variant.CLASSICAL)
    result = centered_norm(rf([(0, 1000, 2.0, 0.0)]), sp)
    mpmath.mp.dps = 40
    c_d = 2 * mpmath.pi ** (d / 2) / mpmath.gamma(mpmath.mpf(d) / 2)
    expected = 2 * (c_d / d) ** (1 / q) * mpmath.mpf(1000) ** (d / q)
    assert result.value == pytest.approx(float(expected), rel=1e-12)
    assert result.r_star == 1000.0


def test_overflow_is_reported():
    sp = SpaceParams(3, 1, 2)
    with pytest.raises(NumericalOverflow):
        centered_norm(rf([(0, 1, 1e308, -1.5)]), sp)


def test_ball_norm_matches_quadrature():
    sp = SpaceParams(3, 2, 5)
    f = rf([(0, 0.4, 1.0, -0.3), (0.4, 2.0, -2.0, -0.3)])
    vol = sphere_area(3) / 3
    for R in (0.2, 0.4, 1.3):
        # r^1.4 is not smooth at 0, so the first piece uses the algebraic-weight rule
        inner = integrate.quad(lambda r: 1.0, 0, min(R, 0.4), weight="alg", wvar=(1.4, 0), epsrel=1e-13)[0]
        if R > 0.4:
            inner += integrate.quad(lambda r: 4 * r**1.4, 0.4, R, epsrel=1e-13)[0]
        expected = (vol * R**3) ** (1 / 5 - 1 / 2) * (sphere_area(3) * inner) ** 0.5
        assert ball_norm(f, sp, R) == pytest.approx(expected, rel=1e-10)


def test_norm_result_json_round_trip():
    r = NormResult(1.5, INF, False)
    assert r.to_json() == {"value": 1.5, "r_star": "inf", "attained": False, "method": "closed_form"}
    assert NormResult.from_json(r.to_json()) == r


# -- properties ------------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(space_and_function())
def test_homogeneity_and_sign(case):
    sp, f = case
    n = centered_norm(f, sp).value
    for s in (-3.5, 0.01, 7.0):
        assert centered_norm(scale(f, s), sp).value == pytest.approx(abs(s) * n, rel=1e-12)
    assert centered_norm(negate(f), sp).value == n


@settings(max_examples=150, deadline=None)
@given(space_and_pair())
def test_triangle_inequality(case):
    sp, f, g = case
    lhs = centered_norm(f + g, sp).value
    assert lhs <= (centered_norm(f, sp).value + centered_norm(g, sp).value) * (1 + 1e-12)


@settings(max_examples=150, deadline=None)
@given(space_and_function(variants=(Variant.SMALL,)))
def test_small_below_classical(case):
    sp, f = case
    if f.pieces and f.pieces[-1].r_hi == INF:
        return
    small = centered_norm(f, sp).value
    classical = centered_norm(f, sp.with_variant("classical")).value
    assert small <= classical * (1 + 1e-14)


@settings(max_examples=40, deadline=None)
@given(space_and_function())
def test_agrees_with_oracle(case):
    sp, f = case
    closed = centered_norm(f, sp).value
    assert oracle_norm(f, sp, 1e-8).value == pytest.approx(closed, rel=1e-8)
