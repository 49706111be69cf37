import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parabolic_basin.angles import RationalAngle
from parabolic_basin.boettcher import (DeepPoint, RayTracer, boettcher_inverse, boettcher_value, equipotential,
                                       green, green_array, landing_point, trace_ray)
from parabolic_basin.cubic import CubicMap

A_STAR = 0.3 + 1.1j
radii = st.floats(1.0, 4.0)
turns = st.floats(0.0, 1.0, exclude_max=True)


@settings(max_examples=60, deadline=None)
@given(radii, turns)
def test_green_functional_equation(r, t):
    f = CubicMap(A_STAR)
    z = f.escape_radius * r * cmath.exp(2j * math.pi * t)
    assert abs(green(f, f(z)) - 3 * green(f, z)) < 1e-9


def test_green_vectorized_matches_scalar():
    f = CubicMap(A_STAR)
    z = np.array([3 + 1j, -2.5j, 4.0, 0.1 + 0.2j])
    G, esc = green_array(f, z)
    assert list(esc) == [True, True, True, False]
    for zi, g in zip(z, G):
        assert g == green(f, zi)


@settings(max_examples=40, deadline=None)
@given(radii, turns)
def test_boettcher_conjugacy(r, t):
    f = CubicMap(A_STAR)
    z = 2 * f.escape_radius * r * cmath.exp(2j * math.pi * t)
    b = boettcher_value(f, z)
    assert abs(boettcher_value(f, f(z)) - b**3) < 1e-9 * abs(b) ** 3
    assert abs(math.log(abs(b)) - green(f, z)) < 1e-12


def test_boettcher_tangent_to_identity():
    f = CubicMap(A_STAR)
    z = 1e6 * cmath.exp(0.7j)
    assert abs(boettcher_value(f, z) - (z + A_STAR / 3)) < 1e-5


def test_deep_point_rejected():
    with pytest.raises(DeepPoint):
        boettcher_value(CubicMap(A_STAR), 0.01 + 0j)


@pytest.mark.parametrize("angle,v", [("0", 2.0), ("1/3", 0.5), ("5/8", 0.05)])
def test_inverse_has_requested_potential_and_angle(angle, v):
    f = CubicMap(A_STAR)
    z = boettcher_inverse(f, angle, v)
    assert green(f, z) == pytest.approx(v, rel=1e-9)
    # read the angle where the product formula is valid: f^n(z) has angle 3^n t
    n = 0
    while v * 3**n < 1.0:
        n += 1
    b = boettcher_value(f, f.iterate(z, n))
    t = float(RationalAngle.of(angle).times(3**n))
    d = (cmath.phase(b) / (2 * math.pi) - t) % 1
    assert min(d, 1 - d) < 1e-9


def test_equipotential_is_level_set():
    f = CubicMap(A_STAR)
    c = equipotential(f, 1.0, 128)
    G, _ = green_array(f, c.points)
    assert np.max(np.abs(G - 1.0)) < 1e-9
    assert c.points[0] == c.points[-1]


def test_ray_potentials_decrease_and_image_is_ray():
    f = CubicMap(A_STAR)
    tr = RayTracer(f)
    c = tr.trace(RationalAngle(1, 8), 1e-3)
    G, _ = green_array(f, c.points[:40])
    assert np.max(np.abs(G - c.params[:40]) / c.params[:40]) < 1e-8
    img = tr.trace(RationalAngle(3, 8), 1e-3)
    # f maps the division i of R(1/8) onto division i-1 of R(3/8)
    s = tr.s
    assert np.max(np.abs(f(c.points[s:5 * s]) - img.points[:4 * s])) < 1e-9


def test_trace_ray_argument_checks():
    f = CubicMap(A_STAR)
    with pytest.raises(ValueError):
        trace_ray(f, 0, v_high=1.0, v_low=2.0)
    with pytest.raises(ValueError):
        trace_ray(f, 0, v_low=1e-12)


def test_zero_ray_lands_at_parabolic_point():
    f = CubicMap(A_STAR)
    land = landing_point(f, 0)
    assert land.converged
    assert abs(land.point) < 1e-4


def test_fixed_ray_of_quadratic_like_map_lands_at_fixed_point():
    # R(1/2) is fixed under tripling; for a = 2 + 0.5i its landing point is a fixed point of f
    f = CubicMap(2 + 0.5j)
    land = landing_point(f, "1/2")
    assert abs(f(land.point) - land.point) < 1e-5


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(5, 500), st.sampled_from([1, 2]))
def test_power_limit_exact_on_model_sequence(xr, xi, k0, p):
    from parabolic_basin.boettcher import _power_limit

    x = complex(xr, xi)
    w = [x + 0.3 * (k0 + j) ** (-1.0 / p) for j in range(3)]
    assert abs(_power_limit(*w, p) - x) < 1e-7
