import numpy as np
import pytest

from parabolic_basin.angles import RationalAngle
from parabolic_basin.itinerary import (OnGraphAtStep, boundary_chart, boundary_point, jordan_certificate,
                                       periodic_boundary_point, theta_of, u_n_diagnostic, wake_of)
from parabolic_basin.partition import ON_GRAPH, XI0, XI1


def test_partition_vertices(partition_star, fmap_star):
    assert abs(fmap_star(partition_star.beta)) < 1e-14
    assert partition_star.beta_angle == RationalAngle(1, 3)


def test_rays_on_opposite_sides(partition_star):
    tr = partition_star.tracer
    assert partition_star.side(tr.ray_points("1/6", 1)[-1]) == XI0
    assert partition_star.side(tr.ray_points("2/3", 1)[-1]) == XI1
    assert partition_star.side(tr.ray_points("0", 2)[-1]) == ON_GRAPH


def test_digits_shift_under_f(partition_star, fmap_star):
    rng = np.random.default_rng(7)
    zs = (rng.random(100) - 0.5) * 3 + 1j * (rng.random(100) - 0.5) * 3
    checked = 0
    for z in zs:
        try:
            d = theta_of(partition_star, z, 12).digits
            d1 = theta_of(partition_star, fmap_star(z), 11).digits
        except OnGraphAtStep:
            continue
        assert d1[:10] == d[1:11]
        checked += 1
    assert checked > 80


def test_theta_at_vertices(partition_star):
    assert theta_of(partition_star, 0j).value == RationalAngle(0, 1)
    th = theta_of(partition_star, partition_star.beta)
    assert th.exact and th.value == RationalAngle(1, 2)


def test_periodic_boundary_point_has_that_itinerary(partition_star, fmap_star):
    x = periodic_boundary_point(partition_star, RationalAngle(1, 3))
    assert abs(fmap_star.iterate(x, 2) - x) < 1e-10
    assert theta_of(partition_star, x, 4).value == RationalAngle(1, 3)


@pytest.mark.parametrize("t", ["1/4", "3/8", "5/16", "11/32"])
def test_boundary_point_equivariance(partition_star, fmap_star, t):
    t = RationalAngle.of(t)
    x = boundary_point(partition_star, t)
    assert abs(fmap_star(x) - boundary_point(partition_star, t.times(2))) < 1e-8
    m = t.denominator.bit_length() - 1
    assert abs(fmap_star.iterate(x, m)) < 1e-10
    assert abs(fmap_star.iterate(x, m - 1)) > 1e-6


def test_boundary_point_is_dyadic_under_theta(partition_star):
    x = boundary_point(partition_star, RationalAngle(3, 8))
    th = theta_of(partition_star, x, 12)
    assert th.kind == "dyadic" and th.value == RationalAngle(3, 8)


def test_chart_samples_and_certificate(partition_star, fmap_star):
    chart = boundary_chart(partition_star, 8)
    pts = chart.points
    N = pts.size
    assert np.max(np.abs(fmap_star(pts) - pts[(2 * np.arange(N)) % N])) < 1e-5
    cert = jordan_certificate(partition_star, 8)
    assert cert.ok
    assert cert.violations == []
    assert cert.min_gap > 0


def test_chart_depth_bounds(partition_star):
    with pytest.raises(ValueError):
        boundary_chart(partition_star, 0)
    with pytest.raises(ValueError):
        boundary_chart(partition_star, 15)


def test_theta_constant_along_ray(partition_star):
    r = partition_star.tracer.ray_points("7/24", 6)
    a = theta_of(partition_star, r[-1], 16)
    b = theta_of(partition_star, r[20], 16)
    assert a.digits == b.digits


def test_wake_of_beta(partition_star):
    z = partition_star.tracer.ray_points("7/24", 6)[-1]
    th, pair = wake_of(partition_star, z, 16)
    assert th.value == RationalAngle(1, 2)
    lo, hi = pair
    assert {lo, hi} == {RationalAngle(1, 6), RationalAngle(1, 3)}
    # the wake image is the wake at 0, three times as wide
    width = (hi.fraction - lo.fraction) % 1
    assert 3 * width == RationalAngle(1, 2).fraction


def test_critical_point_lies_in_wake_of_zero(partition_star, fmap_star):
    th, pair = wake_of(partition_star, fmap_star.c, 64)
    assert th.exact and th.value == RationalAngle(0, 1)
    assert set(pair) == {RationalAngle(0, 1), RationalAngle(1, 2)}


def test_wake_well_defined_on_regions(partition_star):
    # pairs of points close together off the graph share their itinerary
    rng = np.random.default_rng(3)
    z = (rng.random(40) - 0.5) * 3 + 1j * (rng.random(40) - 0.5) * 3
    n = 0
    for a in z:
        b = a + 1e-9
        try:
            da = theta_of(partition_star, a, 8).digits
            db = theta_of(partition_star, b, 8).digits
        except OnGraphAtStep:
            continue
        assert da[:8] == db[:8]
        n += 1
    assert n > 30


def test_u_n_diagnostic_nontrivial(partition_star):
    d = u_n_diagnostic(partition_star)
    assert d.verdict == "XNontrivial"
    assert abs(d.half_ray_landing) < 1e-4


def test_a0_components_meet_only_at_zero():
    from parabolic_basin.itinerary import component_certificates

    rep = component_certificates(7)
    assert rep.ok
    assert rep.crossings == 0
    assert rep.shared == (0j,)
    assert rep.separation > 0.01
    # z -> -z exchanges the two components
    a, b = (c.chart.points for c in rep.certificates)
    assert np.max(np.abs(a + b)) < 1e-12
