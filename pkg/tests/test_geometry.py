import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from kdscatter.errors import ExtremalityViolated, NonPositiveCosmologicalConstant, OutOfDomain
from kdscatter.geometry import (
    EXTREMALITY_BOUND,
    GapCoordinate,
    build_extreme_params,
    build_tortoise_map,
    delta_eval,
    tortoise_coefficients,
)


# ---------------------------------------------------------------- parameters

def test_extremality_rejected():
    with pytest.raises(ExtremalityViolated):
        build_extreme_params(0.3, 1.0)  # a*l = 0.3 > 2 - sqrt(3)
    with pytest.raises(ExtremalityViolated):
        build_extreme_params(0.0, 1.0)
    with pytest.raises(NonPositiveCosmologicalConstant):
        build_extreme_params(0.1, 0.0)
    with pytest.raises(NonPositiveCosmologicalConstant):
        build_extreme_params(0.1, -1.0)


def test_small_spin_limit():
    p = build_extreme_params(1e-8, 1.0)
    assert p.mass < 1e-6  # M -> 0 as a -> 0 at fixed l
    assert p.r_double < 1e-6


def test_against_bignum_and_quartic_oracle():
    """Closed forms vs a 50-digit evaluation and a quartic-root oracle."""
    from mpmath import mp, mpf, sqrt as msqrt

    mp.dps = 50
    a, l = mpf("0.1"), mpf("1.0")
    x = (a * l) ** 2
    gam = (1 - x) ** 2 - 12 * x
    m_hi = msqrt(((1 - x) * (x * x + 34 * x + 1) - gam ** mpf(1.5)) / (54 * l * l))
    re_hi = (12 * x + (1 - x) * (1 - x - msqrt(gam))) / (18 * m_hi * l * l)
    s = msqrt(re_hi * re_hi + a * a / (l * l * re_hi * re_hi))
    rp_hi, rm_hi = -re_hi + s, -re_hi - s

    p = build_extreme_params(0.1, 1.0)
    assert abs(p.mass - float(m_hi)) <= 1e-12 * float(m_hi)
    assert abs(p.r_double - float(re_hi)) <= 1e-12 * float(re_hi)
    assert abs(p.r_plus - float(rp_hi)) <= 1e-12 * float(rp_hi)
    assert abs(p.r_minus - float(rm_hi)) <= 1e-12 * abs(float(rm_hi))

    # quartic-root oracle on Delta_r
    roots = np.sort(np.roots([-p.l**2, 0.0, 1.0 - p.l**2 * p.a**2, -2.0 * p.mass, p.a**2]).real)
    assert abs(roots[0] - p.r_minus) <= 1e-8 * abs(p.r_minus)
    assert abs(roots[-1] - p.r_plus) <= 1e-8 * p.r_plus
    # middle two coalesce at r_double
    assert abs(roots[1] - p.r_double) <= 1e-6 * p.r_double
    assert abs(roots[2] - p.r_double) <= 1e-6 * p.r_double


def test_invariant_sweep(sweep_params):
    for p in sweep_params:
        m2 = p.mass**2
        x = (p.a * p.l) ** 2
        m2_closed = ((1 - x) * (x * x + 34 * x + 1) - p.gamma_disc**1.5) / (54 * p.l**2)
        assert abs(m2 - m2_closed) <= 1e-12 * m2_closed
        assert abs(p.delta_r(p.r_double)) <= 1e-10 * p.mass**2
        assert abs(p.delta_r_prime(p.r_double)) <= 1e-10 * p.mass
        lhs = p.l**2 * p.r_double**4 + p.a**2
        assert abs(lhs - p.mass * p.r_double) <= 1e-12 * lhs
        assert 0.0 <= p.r_double < (4.0 / 3.0) * p.a**2 / p.mass
        # Vieta on the residual quadratic
        assert abs((p.r_minus + p.r_plus) + 2 * p.r_double) <= 1e-12 * abs(p.r_minus + p.r_plus)
        prod = p.a**2 / (p.l**2 * p.r_double**2)
        assert abs(p.r_minus * p.r_plus + prod) <= 1e-12 * prod
        assert p.r_minus < 0.0 < p.r_double < p.r_plus


@settings(max_examples=30, deadline=None)
@given(
    al=st.floats(min_value=1e-4, max_value=EXTREMALITY_BOUND - 1e-6),
    l=st.floats(min_value=0.2, max_value=5.0),
)
def test_invariants_property(al, l):
    p = build_extreme_params(al / l, l)
    assert abs(p.delta_r(p.r_double)) <= 1e-10 * max(p.mass**2, 1e-300)
    assert p.r_minus < 0.0 < p.r_double < p.r_plus
    assert abs(p.delta_r(p.r_plus)) <= 1e-9 * max(p.mass**2, p.r_plus**2)


def test_delta_eval(params):
    d = delta_eval(params, params.r_double)
    assert abs(d.delta_r) <= 1e-10 * params.mass**2
    assert abs(d.delta_r_prime) <= 1e-10 * params.mass
    assert abs(delta_eval(params, params.r_plus).delta_r) <= 1e-10 * params.mass**2
    th = np.linspace(0.1, np.pi - 0.1, 7)
    np.testing.assert_allclose(
        params.delta_theta(th), 1.0 + (params.a * params.l) ** 2 * np.cos(th) ** 2
    )


# ---------------------------------------------------------------- coefficients

def test_coefficient_signs_and_sum(params):
    c = tortoise_coefficients(params)
    assert c.alpha < 0 and c.beta > 0 and c.gamma_pf < 0 and c.delta < 0
    assert c.kappa > 0
    s = c.alpha + c.beta + c.gamma_pf
    assert abs(s) <= 1e-12 * max(abs(c.alpha), c.beta)


def test_coefficients_match_numerical_residues(params):
    """Each coefficient equals the residue of the rational function, computed
    from contour-free limit formulas with Richardson-extrapolated steps."""
    p = params
    c = tortoise_coefficients(p)

    def rat(r):
        return (r * r + p.a**2) / ((r - p.r_minus) * (r - p.r_double) ** 2 * (r - p.r_plus))

    def lim(f):
        # three-level Richardson of f(h) -> f(0), assuming f = f0 + c1 h + c2 h^2
        h = 1e-5 * p.mass
        return (8.0 * f(h / 4) - 6.0 * f(h / 2) + f(h)) / 3.0

    alpha_num = lim(lambda h: (h) * rat(p.r_minus + h))
    beta_num = lim(lambda h: (h) * rat(p.r_plus + h))
    delta_num = lim(lambda h: h * h * rat(p.r_double + h))

    def gamma_f(h):
        g = lambda r: (r * r + p.a**2) / ((r - p.r_minus) * (r - p.r_plus))
        return (g(p.r_double + h) - g(p.r_double - h)) / (2 * h)

    gamma_num = gamma_f(1e-5 * p.mass)
    assert abs(alpha_num - c.alpha) <= 1e-10 * abs(c.alpha)
    assert abs(beta_num - c.beta) <= 1e-10 * c.beta
    assert abs(delta_num - c.delta) <= 1e-8 * abs(c.delta)
    assert abs(gamma_num - c.gamma_pf) <= 1e-10 * abs(c.gamma_pf)


# ---------------------------------------------------------------- forward map

def test_forward_midpoint_and_derivative(tmap):
    p = tmap.params
    r = 0.5 * (p.r_double + p.r_plus)
    rs = tmap.forward(r)
    assert math.isfinite(rs)
    h = 1e-6 * p.mass
    num = (tmap.forward(r + h) - tmap.forward(r - h)) / (2 * h)
    assert abs(num - tmap.drstar_dr(r)) <= 1e-6 * abs(tmap.drstar_dr(r))


def test_forward_log_pole(tmap):
    p, c = tmap.params, tmap.coeffs
    rs = tmap.forward(p.r_plus - 1e-12 * p.mass)
    assert rs > 10.0 / c.kappa


def test_forward_vs_quadrature_oracle(tmap):
    p = tmap.params
    mid = 0.5 * (p.r_double + p.r_plus)
    base = tmap.forward(mid)
    for r in [p.r_double + 0.2 * (p.r_plus - p.r_double), mid, p.r_plus - 0.05 * (p.r_plus - p.r_double)]:
        val, err = quad(tmap.drstar_dr, mid, r, epsabs=1e-12, epsrel=1e-12, limit=200)
        assert err < 1e-10
        assert abs((tmap.forward(r) - base) - val) <= 1e-9


def test_forward_out_of_domain(tmap):
    p = tmap.params
    with pytest.raises(OutOfDomain):
        tmap.forward(p.r_double)
    with pytest.raises(OutOfDomain):
        tmap.forward(p.r_plus + 0.1)


def test_forward_monotone(tmap):
    p = tmap.params
    rs = np.array([
        tmap.forward(r)
        for r in np.linspace(p.r_double + 1e-6 * p.mass, p.r_plus - 1e-6 * p.mass, 1000)
    ])
    assert np.all(np.diff(rs) > 0)


# ---------------------------------------------------------------- inverse map

def test_round_trip_r_side(tmap):
    p = tmap.params
    for r in np.linspace(p.r_double + 1e-5 * p.mass, p.r_plus - 1e-5 * p.mass, 1000):
        r2 = tmap.inverse(tmap.forward(r))
        assert abs(r2 - r) <= 1e-10 * p.mass


def test_round_trip_rstar_side(tmap):
    p = tmap.params
    for s in np.concatenate([np.linspace(-1e4, 1e4, 201), [-3.3, 0.0, 7.7]]):
        rstar = s / p.mass
        gc = tmap.inverse_gap(rstar)
        back = tmap.forward_gap(gc)
        assert abs(back - rstar) <= 1e-10 * p.mass * (1.0 + abs(rstar) / p.mass)


def test_double_horizon_tail_constant(tmap):
    p, c = tmap.params, tmap.coeffs
    rstar = -1e4 / p.mass
    r = tmap.inverse(rstar)
    const = (r - p.r_double) * (-rstar)
    assert abs(const - abs(c.c_double)) <= 0.01 * abs(c.c_double)


def test_cosmo_tail_rate(tmap):
    p, c = tmap.params, tmap.coeffs
    rstar = 1e2 / c.kappa
    gc = tmap.inverse_gap(rstar)
    assert gc.side == "cosmo"
    assert abs(gc.log_gap / rstar + 2.0 * c.kappa) <= 0.01 * 2.0 * c.kappa


def test_asymptotic_fits(tmap):
    p, c = tmap.params, tmap.coeffs
    # least-squares slope of ln(r_+ - r) vs r* on [50, 100] / kappa
    rs = np.linspace(50.0 / c.kappa, 100.0 / c.kappa, 40)
    lg = np.array([tmap.inverse_gap(x).log_gap for x in rs])
    slope = np.polyfit(rs, lg, 1)[0]
    assert abs(slope + 2.0 * c.kappa) <= 0.01 * 2.0 * c.kappa
    # (r - r_e) * (-r*) on [-1e4, -1e3] / M approaches |c_double| within 1%
    for s in (-1e3, -3e3, -1e4):
        rstar = s / p.mass
        gc = tmap.inverse_gap(rstar)
        assert gc.side == "double"
        assert abs(gc.gap * (-rstar) - abs(c.c_double)) <= 0.01 * abs(c.c_double)


def test_inverse_gap_chart_consistency(tmap):
    p = tmap.params
    gc = GapCoordinate("double", 1e-4 * p.mass, math.log(1e-4 * p.mass))
    rs = tmap.forward_gap(gc)
    assert abs(tmap.forward(p.r_double + gc.gap) - rs) <= 1e-9 * (1 + abs(rs))
