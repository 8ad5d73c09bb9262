import math

import numpy as np
import pytest
from scipy import integrate

from morreygeom.constants import build_witnesses
from morreygeom.errors import DomainError, NotInSpace
from morreygeom.norm import Method, centered_norm
from morreygeom.oracle import golden_section_max, offcenter_probe, offcenter_scan, oracle_norm
from morreygeom.space import INF, RadialFunction, SpaceParams, Variant, combine, sphere_area

from corpus import random_function, random_space

rf = RadialFunction.from_pieces


def test_unit_power_d1():
    sp = SpaceParams(1, 1, 2)
    result = oracle_norm(rf([(0, 1, 1.0, -0.5)]), sp, 1e-8)
    assert abs(result.value - 2 * math.sqrt(2)) <= 2.8e-8
    assert result.method is Method.QUADRATURE


def test_zero_function():
    result = oracle_norm(RadialFunction.zero(), SpaceParams(2, 1, 3), 1e-8)
    assert result.value == 0.0


def test_l_witness():
    sp = SpaceParams(2, 1, 2, Variant.SMALL)
    ws = build_witnesses(0.25, 0.5, sp)
    nf = centered_norm(ws.f, sp).value
    assert oracle_norm(ws.l, sp, 1e-8).value == pytest.approx(1.5 * nf, rel=1e-8)


def test_h_witness_limit_not_attained():
    sp = SpaceParams(3, 1.5, 4)
    ws = build_witnesses(0.1, None, sp)
    result = oracle_norm(ws.h, sp, 1e-9)
    assert not result.attained and result.r_star == 1.0
    assert result.value == pytest.approx(centered_norm(ws.h, sp).value, rel=1e-9)


def test_interior_peak_and_log_tail():
    sp = SpaceParams(1, 1, 2, Variant.CLASSICAL)
    peak = oracle_norm(rf([(1, 10, 1.0, -2.0)]), sp, 1e-10)
    assert peak.r_star == pytest.approx(3.0, rel=1e-4)
    assert peak.value == pytest.approx(2 * math.sqrt(2) / (3 * math.sqrt(3)), rel=1e-10)
    log_tail = oracle_norm(rf([(1, INF, 1.0, -1.0)]), sp, 1e-10)
    assert log_tail.value == pytest.approx(2 * math.sqrt(2) / math.e, rel=1e-10)


def test_limit_at_infinity():
    sp = SpaceParams(1, 1, 2, Variant.CLASSICAL)
    f = rf([(0, 2, 1.0, -0.5), (2, INF, -3.0, -0.5)])
    result = oracle_norm(f, sp, 1e-9)
    assert result.value == pytest.approx(6 * math.sqrt(2), rel=1e-9)
    assert result.r_star == INF and not result.attained


def test_critical_tail_in_high_power():
    # N rises towards its limit forever; the radius grid must not be pushed to overflow
    a = -3 / 4.25
    sp = SpaceParams(3, 4.0, 4.25, Variant.CLASSICAL)
    f = rf([(0.25, 1.25, 1.0, a), (1.25, INF, 1.0, a)])
    result = oracle_norm(f, sp, 1e-9)
    assert result.r_star == INF and not result.attained
    assert result.value == pytest.approx(centered_norm(f, sp).value, rel=1e-9)


@pytest.mark.parametrize("tol", [0.0, -1e-8, 1e-3])
def test_tolerance_validated(tol):
    with pytest.raises(DomainError):
        oracle_norm(rf([(0, 1, 1.0, -0.5)]), SpaceParams(1, 1, 2), tol)


def test_membership_checked():
    with pytest.raises(NotInSpace):
        oracle_norm(rf([(0, INF, 1.0, -0.4)]), SpaceParams(1, 1, 2, Variant.CLASSICAL))


def test_halving_tol_is_stable():
    rng = np.random.default_rng(11)
    for _ in range(10):
        sp = random_space(rng)
        f = random_function(rng, sp)
        tol = 1e-6
        previous = oracle_norm(f, sp, tol).value
        for _ in range(3):
            tol /= 2
            current = oracle_norm(f, sp, tol).value
            assert abs(current - previous) <= tol * 2 * max(previous, 1e-300)
            previous = current


def test_golden_section():
    x, fx = golden_section_max(lambda x: -(x - 0.3) ** 2, -1.0, 2.0, 1e-12)
    assert x == pytest.approx(0.3, abs=1e-6)
    assert fx == pytest.approx(0.0, abs=1e-12)


def test_lazy_sum_against_direct_quadrature():
    # exponents differ, so only the quadrature path applies; r^-0.5 dominates at the
    # origin and N(R) rises towards the norm of r^-0.5 alone as R -> 0
    sp = SpaceParams(2, 1.5, 4)
    f = rf([(0, 1, 1.0, -0.5)])
    g = rf([(0, 0.5, 1.0, -0.25)])
    lazy = combine((1.0, f), (-2.0, g))
    vol = sphere_area(2) / 2

    def direct(R):
        pts = [0.5] if R > 0.5 else None
        inner = integrate.quad(lambda r: abs(lazy(r)) ** 1.5 * r, 0, R, points=pts, epsrel=1e-12, limit=200)[0]
        return (vol * R**2) ** (1 / 4 - 1 / 1.5) * (2 * vol * inner) ** (1 / 1.5)

    brute = max(direct(R) for R in np.geomspace(1e-8, 0.999, 60))
    result = oracle_norm(lazy, sp, 1e-9)
    assert result.value >= brute
    assert result.value == pytest.approx(centered_norm(f, sp).value, rel=1e-9)
    assert result.r_star == 0.0 and not result.attained


# -- Monte Carlo probe -----------------------------------------------------------

def test_probe_zero():
    assert offcenter_probe(RadialFunction.zero(), SpaceParams(2, 1, 3), 4, 256, 0) == 0.0


def test_probe_deterministic_for_seed():
    sp = SpaceParams(2, 1, 3, Variant.CLASSICAL)
    g = build_witnesses(0.1, None, sp.with_variant("small")).g
    a = offcenter_scan(g, sp, 6, 1024, seed=5)
    b = offcenter_scan(g, sp, 6, 1024, seed=5)
    c = offcenter_scan(g, sp, 6, 1024, seed=6)
    assert a == b
    assert a.value != c.value


@pytest.mark.parametrize("eps", [0.5, 0.1])
def test_probe_below_centered_for_nonincreasing(eps):
    sp = SpaceParams(1, 1, 2, Variant.CLASSICAL)
    g = build_witnesses(eps, None, sp.with_variant("small")).g
    scan = offcenter_scan(g, sp, 16, 4096, seed=1)
    assert scan.value <= centered_norm(g, sp).value + 3 * scan.stderr


@pytest.mark.parametrize("eps", [0.5, 0.25])
def test_probe_recovers_h_lower_bound(eps):
    sp = SpaceParams(1, 1, 2, Variant.CLASSICAL)
    ws = build_witnesses(eps, None, sp.with_variant("small"))
    nf = centered_norm(ws.f, sp).value
    scan = offcenter_scan(ws.h, sp, 16, 4096, seed=2)
    assert scan.value >= (1 - eps**sp.gamma) ** (1 / sp.p) * nf - 3 * scan.stderr


def test_probe_rejects_bad_counts():
    with pytest.raises(DomainError):
        offcenter_probe(rf([(0, 1, 1.0, 0.0)]), SpaceParams(1, 1, 2), 0, 10)
