import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parabolic_basin.cubic import CubicMap
from parabolic_basin.fatou import (FatouChart, NotInPetalReach, e0_figure_eight, fatou_coord, inverse_fatou,
                                   line_E0, petal_contains)

A_STAR = 0.3 + 1.1j


def plain_limit_difference(a, z1, z2, n=200_000):
    """phi(z1) - phi(z2) from the raw orbit: u_n - kappa log u_n - n with kappa = 1 - 1/a^2."""
    kappa = 1 - 1 / (a * a)
    z = np.array([z1, z2], dtype=complex)
    for _ in range(n):
        z = z * (1 + z * (a + z))
    u = -1 / (a * z)
    val = u - kappa * np.log(u)
    return val[0] - val[1]


def test_kappa_closed_form(chart_star):
    assert chart_star.kappa == pytest.approx(1 - 1 / A_STAR**2, abs=1e-14)


def test_plain_limit_oracle(chart_star, fmap_star):
    z1 = fmap_star(fmap_star.c0)
    z2 = fmap_star(z1) + 0.01j
    ref = plain_limit_difference(A_STAR, z1, z2)
    got = chart_star.extended(z1)[0] - chart_star.extended(z2)[0]
    assert abs(got - ref) < 1e-3


def test_normalization(chart_star, fmap_star):
    assert abs(chart_star.extended(fmap_star(fmap_star.c0))[0] - 1) < 1e-8


@settings(max_examples=40, deadline=None)
@given(st.floats(1.0, 40.0), st.floats(-40.0, 40.0))
def test_abel_equation(x, y):
    chart = FatouChart(CubicMap(A_STAR))
    z = chart.from_u(complex(chart.petal_height + x, y))
    f = chart.fmap
    assert abs(chart.extended(f(z))[0] - chart.extended(z)[0] - 1) < 1e-8


def test_vectorized_agrees_with_scalar(chart_star, fmap_star):
    zs = np.array([fmap_star(fmap_star.c0), -0.1 + 0.05j, 0.05 + 0.3j])
    vec = chart_star.evaluate(zs)
    for z, v in zip(zs, vec):
        assert abs(chart_star.extended(z)[0] - v) < 1e-12


def test_derivative_matches_difference_quotient(chart_star):
    z = -0.1 + 0.05j
    h = 1e-6
    _, d = chart_star.extended(z)
    fd = (chart_star.extended(z + h)[0] - chart_star.extended(z - h)[0]) / (2 * h)
    assert abs(d - fd) < 1e-5 * abs(d)


def test_outside_basin_raises(chart_star):
    with pytest.raises(NotInPetalReach):
        fatou_coord(chart_star, 3 + 3j)


@pytest.mark.parametrize("s", [1 + 0j, 1.5 - 2j, 4 + 7j])
def test_inverse_fatou_round_trip(chart_star, s):
    z = inverse_fatou(chart_star, s)
    assert abs(chart_star.extended(z)[0] - s) < 1e-9
    assert petal_contains(chart_star, z) == (s.real > 1)


def test_e0_one_matched_heights(chart_star, fmap_star):
    c = line_E0(chart_star, 1, (-20.0, 20.0), 81)
    phi = chart_star.evaluate(c.points)
    assert np.max(np.abs(phi - (1 + 1j * c.params))) < 1e-8
    # f(c0) is the point at height 0
    i0 = int(np.argmin(np.abs(c.params)))
    assert abs(c.points[i0] - fmap_star(fmap_star.c0)) < 1e-8


def test_e0_figure_eight(chart_star, fmap_star):
    eight = e0_figure_eight(chart_star, np.sinh(np.linspace(0, np.arcsinh(1e3), 120))[1:])
    for arc in eight["arcs"]:
        assert arc.points[0] == fmap_star.c0
        phi = chart_star.evaluate(arc.points[1:])
        assert np.max(np.abs(phi - 1j * arc.params[1:])) < 1e-7
    assert abs(eight["to_zero"].points[0]) < 1e-2 and abs(eight["to_zero"].points[-1]) < 1e-2
    beta = min(fmap_star.beta_candidates(), key=lambda b: abs(b - eight["other"].points[0]))
    assert abs(eight["other"].points[0] - beta) < 1e-2


def test_negative_level_is_pullback(chart_star, fmap_star):
    c = line_E0(chart_star, -1, (-3.0, 3.0), 41)
    zero = line_E0(chart_star, 0, (-3.0, 3.0), 41)
    assert np.max(np.abs(fmap_star(c.points) - zero.points)) < 1e-10


def test_a0_charts_are_mirror_images():
    f = CubicMap(0).with_critical_order(1j / 3**0.5, -1j / 3**0.5)
    g = CubicMap(0).with_critical_order(-1j / 3**0.5, 1j / 3**0.5)
    cp, cm = FatouChart(f, sign=1), FatouChart(g, sign=-1)
    z = f(f.c0) * 0.9
    assert abs(cp.extended(z)[0] - cm.extended(-z)[0]) < 1e-10
