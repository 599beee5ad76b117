import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from corrugate.errors import InvalidParams
from corrugate.pattern import (
    PatternParams,
    angular_function,
    shape,
    shape_average,
    shape_primitive,
)

P = PatternParams(0.2, math.pi / 2, 0.5)


@st.composite
def params(draw):
    eta = draw(st.floats(1e-3, 0.49))
    theta = draw(st.floats(0.0, math.pi))
    beta = draw(st.floats(eta, 1.0 - eta))
    return PatternParams(eta, theta, beta)


def quad_mean(p):
    # adaptive quadrature split at the kinks of g
    kw = dict(points=p.breakpoints.t[1:-1], limit=500, epsabs=1e-13)
    re = integrate.quad(lambda t: shape(p, t).z.real, 0, 1, **kw)[0]
    im = integrate.quad(lambda t: shape(p, t).z.imag, 0, 1, **kw)[0]
    return complex(re, im)


def test_invalid_params():
    for args in [(0.0, 1.0, 0.5), (0.5, 1.0, 0.5), (0.2, 1.0, 0.1), (0.2, 1.0, 0.85), (0.2, -0.1, 0.5)]:
        with pytest.raises(InvalidParams):
            PatternParams(*args)
    PatternParams(0.2, 1.0, 0.2)
    PatternParams(0.2, 1.0, 0.8)


def test_breakpoint_table_for_reference_params():
    # eta theta / 4 pi = 0.025, beta' / 2 = 0.2, eta (2 pi - theta) / 4 pi = 0.075
    expected_t = [0, 0.025, 0.225, 0.275, 0.475, 0.5, 0.525, 0.725, 0.775, 0.975, 1.0]
    np.testing.assert_allclose(P.breakpoints.t, expected_t, atol=1e-15)
    a = math.pi / 2
    expected_g = [0, a, a, 3 * a, 3 * a, 4 * a, 3 * a, 3 * a, a, a, 0]
    np.testing.assert_allclose(P.breakpoints.value, expected_g, atol=1e-15)


def test_angular_function_examples():
    assert angular_function(P, 0.0) == 0.0
    assert angular_function(P, 0.5) == pytest.approx(2 * math.pi)
    assert angular_function(P, 0.3) == pytest.approx(1.5 * math.pi)
    assert angular_function(P, 1.3) == pytest.approx(1.5 * math.pi)
    np.testing.assert_allclose(angular_function(P, [0.1, 0.2]), math.pi / 2)


def test_angular_plateaus_follow_definition():
    p = PatternParams(0.1, 1.0, 0.6)
    bp = p.beta - p.eta / 2
    lo, hi = p.eta * p.theta / (4 * math.pi), bp / 2 + p.eta * p.theta / (4 * math.pi)
    np.testing.assert_allclose(angular_function(p, np.linspace(lo, hi, 50)), p.theta, atol=1e-12)
    lo2 = bp / 2 + p.eta * (2 * math.pi - p.theta) / (4 * math.pi)
    hi2 = 0.5 - p.eta * p.theta / (4 * math.pi)
    np.testing.assert_allclose(angular_function(p, np.linspace(lo2, hi2, 50)), 2 * math.pi - p.theta, atol=1e-12)


@pytest.mark.parametrize("theta", [0.0, math.pi, 1e-9, math.pi - 1e-9])
def test_degenerate_theta_tables(theta):
    p = PatternParams(0.1, theta, 0.5)
    assert np.all(np.diff(p.breakpoints.t) > 0)
    assert angular_function(p, 0.5) == pytest.approx(2 * math.pi)
    assert abs(shape_primitive(p, 0.999999999)) < 1e-8


@settings(max_examples=100, deadline=None)
@given(params())
def test_angular_continuity_symmetry_and_slope(p):
    t = np.linspace(0, 1, 10_001)
    g = angular_function(p, t)
    slope = 4 * math.pi / p.eta
    # 1 - t is exact only up to one ulp, which the ramps amplify by their slope
    assert np.max(np.abs(g - angular_function(p, 1 - t))) < 1e-12 + slope * 4e-16
    knots = p.breakpoints.t
    for k in knots[1:-1]:
        jump = abs(angular_function(p, k - 1e-13) - angular_function(p, k + 1e-13))
        assert jump <= slope * 2e-13 + 1e-12
    dt = np.diff(knots)
    slopes = np.diff(p.breakpoints.value) / dt
    # knots carry one ulp of rounding, relative to the segment length
    assert np.all(np.abs(slopes) <= slope * (1 + 1e-9 + 4e-16 / dt))


def test_shape_examples():
    p = PatternParams(0.2, 1.0, 0.6)
    assert shape(p, 0.0).z == pytest.approx(1 + 0.2 * math.cos(1.0))
    assert shape(p, 0.0).s == 1.0
    t = np.linspace(0, 1, 101)
    np.testing.assert_allclose(np.abs(shape(P, t).z), 1.0, atol=1e-15)
    # t = 1/4 sits mid-ramp between pi/2 and 3 pi/2, so g = pi
    assert shape(P, 0.25).z == pytest.approx(-1.0, abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(params(), st.floats(0, 1))
def test_shape_on_offset_unit_circle(p, t):
    assert abs(abs(shape(p, t).z - p.eta * math.cos(p.theta)) - 1.0) < 1e-12


def test_shape_average_examples():
    assert abs(shape_average(P).z) < 1e-15
    p = PatternParams(0.1, 1.0, 0.6)
    expected = 0.6 * np.exp(1j) + 0.4 * np.exp(-1j)
    assert shape_average(p).z == pytest.approx(expected, abs=1e-15)
    assert abs(quad_mean(p) - expected) < 1e-9


def test_shape_average_at_beta_one_limit():
    # beta = 1 is only admissible in the eta -> 0 limit; the formula tends to e^{i theta}
    p = PatternParams(1e-6, 0.9, 1 - 1e-6)
    assert abs(shape_average(p).z - np.exp(0.9j)) < 1e-5
    assert abs(quad_mean(p) - shape_average(p).z) < 1e-9


@settings(max_examples=1000, deadline=None)
@given(params())
def test_shape_average_matches_quadrature(p):
    # Gauss-Legendre per smooth piece: exact to rounding for exp of a linear phase
    nodes, weights = np.polynomial.legendre.leggauss(30)
    a, b = p.breakpoints.t[:-1], p.breakpoints.t[1:]
    t = (a + b)[:, None] / 2 + (b - a)[:, None] / 2 * nodes
    mean = np.sum((b - a)[:, None] / 2 * weights * shape(p, t).z)
    assert abs(mean - shape_average(p).z) < 1e-9


def test_primitive_examples():
    assert shape_primitive(P, 0.0) == 0
    assert abs(shape_primitive(P, 1.0)) < 1e-15
    assert abs(shape_primitive(P, 1 - 1e-12)) < 1e-11
    f = lambda t: shape(P, t).z - shape_average(P).z
    re = integrate.quad(lambda t: f(t).real, 0, 0.5, limit=500, epsabs=1e-13)[0]
    im = integrate.quad(lambda t: f(t).imag, 0, 0.5, limit=500, epsabs=1e-13)[0]
    assert abs(shape_primitive(P, 0.5) - complex(re, im)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(params())
def test_primitive_matches_trapezoid(p):
    t = np.linspace(0, 1, 100_001)
    f = shape(p, t).z - shape_average(p).z
    cum = integrate.cumulative_trapezoid(f, t, initial=0)
    assert np.max(np.abs(shape_primitive(p, t) - cum)) < 1e-6


@settings(max_examples=100, deadline=None)
@given(params(), st.floats(-5, 5))
def test_primitive_is_periodic(p, t):
    assert abs(shape_primitive(p, t + 1) - shape_primitive(p, t)) < 1e-12
