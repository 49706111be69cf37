"""The ten acceptance criteria, each reported as one PASS/FAIL line in the terminal summary.

Timings cover the checked computation; the shared session objects (map, chart, partition)
are built once by the fixtures and are not charged to any single criterion.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from parabolic_basin.cubic import CubicMap

A_STAR = 0.3 + 1.1j


# 1 ------------------------------------------------------------------------------


def test_c01_boettcher_functional_equation(fmap_star, acceptance_line):
    from parabolic_basin.boettcher import green_array

    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    R = fmap_star.escape_radius
    z = R * (1 + 3 * rng.random(1000)) * np.exp(2j * np.pi * rng.random(1000))
    G, _ = green_array(fmap_star, z)
    Gf, _ = green_array(fmap_star, fmap_star.eval(z))
    err = float(np.max(np.abs(Gf - 3 * G)))
    dt = time.perf_counter() - t0
    assert acceptance_line(1, err < 1e-9, f"max |G(f z) - 3 G(z)| = {err:.2e} < 1e-9 over 1000 samples", dt, 5)


# 2 ------------------------------------------------------------------------------


def test_c02_abel_equation(fmap_star, chart_star, acceptance_line):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    H = chart_star.petal_height
    u = (H + 1 + 40 * rng.random(1000)) + 1j * (80 * rng.random(1000) - 40)
    z = np.array([chart_star.from_u(x) for x in u])
    err = float(np.max(np.abs(chart_star.evaluate(fmap_star.eval(z)) - chart_star.evaluate(z) - 1)))
    crit = abs(chart_star.extended(fmap_star.eval(fmap_star.c0))[0] - 1)
    dt = time.perf_counter() - t0
    ok = err < 1e-8 and crit < 1e-8
    assert acceptance_line(2, ok, f"Abel residual {err:.2e}, |phi(f(c0)) - 1| = {crit:.2e} (< 1e-8)", dt, 5)


# 3 ------------------------------------------------------------------------------


def test_c03_ray_landing(partition_star, acceptance_line):
    from parabolic_basin.boettcher import landing_point
    from parabolic_basin.itinerary import u_n_diagnostic

    t0 = time.perf_counter()
    f = partition_star.fmap
    l0 = landing_point(f, 0, partition_star.tracer)
    half = landing_point(f, Fraction(1, 2), partition_star.tracer).point
    d = u_n_diagnostic(partition_star)
    dt = time.perf_counter() - t0
    at_zero = abs(half) < 1e-4
    consistent = (d.verdict == "XNontrivial") == at_zero
    ok = abs(l0.point) < 1e-4 and consistent
    assert acceptance_line(3, ok, f"|R(0) landing| = {abs(l0.point):.1e}, u_n {d.verdict}, "
                                  f"|R(1/2) landing| = {abs(half):.1e}", dt, 30)


# 4 ------------------------------------------------------------------------------


def test_c04_theta_conjugacy(partition_star, acceptance_line):
    from parabolic_basin.itinerary import jordan_certificate

    t0 = time.perf_counter()
    cert = jordan_certificate(partition_star, 10)
    dt = time.perf_counter() - t0
    ok = (cert.chart.points.size == 1024 and cert.equivariance_error < 1e-5 and cert.min_gap > 0
          and cert.order_ok)
    assert acceptance_line(4, ok, f"depth 10: equivariance {cert.equivariance_error:.1e}, min gap "
                                  f"{cert.min_gap:.2e}, order {cert.orientation}", dt, 60)


# 5 ------------------------------------------------------------------------------


def test_c05_max_gap_decreases(partition_star, acceptance_line):
    from parabolic_basin.itinerary import boundary_chart

    t0 = time.perf_counter()
    gaps = [float(boundary_chart(partition_star, d).gaps().max()) for d in range(6, 13)]
    dt = time.perf_counter() - t0
    ok = all(b < a for a, b in zip(gaps, gaps[1:]))
    assert acceptance_line(5, ok, "max gap depth 6..12: " + " > ".join(f"{g:.3f}" for g in gaps), dt, 180)


# 6 ------------------------------------------------------------------------------


def test_c06_accesses(partition_star, acceptance_line):
    from parabolic_basin.accesses import build_access, y_order_matches
    from parabolic_basin.itinerary import theta_of

    t0 = time.perf_counter()
    f = partition_star.fmap
    bad, worst = [], 0.0
    for k in (2, 3, 4):
        for s in "+-":
            acc = build_access(partition_star, k, s)
            x = acc.landing.point
            res = abs(f.iterate(x, k) - x)
            worst = max(worst, res)
            th = theta_of(partition_star, x, 2 * k)
            if not (res < 1e-5 and y_order_matches(acc) and th.exact and th.value == acc.angle):
                bad.append(f"k={k}{s}")
    dt = time.perf_counter() - t0
    assert acceptance_line(6, not bad, f"6 accesses, worst periodic residual {worst:.1e}, failing: {bad or 'none'}",
                           dt, 60)


# 7 ------------------------------------------------------------------------------


def _annulus(partition, k, s):
    from parabolic_basin.puzzles import MARGIN_TOL, build_graph, check_containment, step_one_piece, zero_piece

    g = build_graph(partition, k, s)
    return check_containment(zero_piece(g), step_one_piece(g), MARGIN_TOL)


@pytest.mark.parametrize("s", "+-")
def test_c07_annulus_k3(partition_star, acceptance_line, s):
    t0 = time.perf_counter()
    c = _annulus(partition_star, 3, s)
    dt = time.perf_counter() - t0
    ok = c.kind == "CompactlyContained" and c.margin > 1e-6
    assert acceptance_line(7, ok, f"k=3 sign {s}: {c.kind} margin {c.margin:.3e}", dt, 60)


@pytest.mark.xfail(strict=True, reason="for k=2 every depth-1 piece on the far side touches 0 or the last "
                                       "access iterate, so no step-one piece exists")
@pytest.mark.parametrize("s", "+-")
def test_c07_annulus_k2(partition_star, acceptance_line, s):
    from parabolic_basin.puzzles import NoQualifyingPiece

    t0 = time.perf_counter()
    try:
        c = _annulus(partition_star, 2, s)
        detail, ok = f"k=2 sign {s}: {c.kind} margin {c.margin:.3e}", c.kind == "CompactlyContained" and c.margin > 1e-6
    except NoQualifyingPiece as exc:
        detail, ok = f"k=2 sign {s}: NoQualifyingPiece ({exc})", False
    assert acceptance_line(7, ok, detail, time.perf_counter() - t0, 60)


# 8 ------------------------------------------------------------------------------


def _oracle_orbit(p, q, m):
    """(preperiod, period) of p/q under x -> m x by factoring q."""
    q1, q2 = 1, q
    for r in {r for r in range(2, m + 1) if m % r == 0 and all(r % d for d in range(2, r))}:
        while q2 % r == 0:
            q2 //= r
            q1 *= r
    pre = 0
    while m**pre % q1:
        pre += 1
    period, x = 1, m % q2
    while x != 1 % q2:
        x = x * m % q2
        period += 1
    return pre, period


def _oracle_digits(p, q, m, n):
    return [(m**i * p // q) - m * (m ** (i - 1) * p // q) for i in range(1, n + 1)]


def test_c08_angle_oracle(acceptance_line):
    from parabolic_basin.angles import RationalAngle, theta_pm

    fracs = [(p, q) for q in range(1, 512) for p in range(q) if math.gcd(p, q) == 1]
    t0 = time.perf_counter()
    impl = {}
    for p, q in fracs:
        t = RationalAngle(p, q)
        impl[(p, q)] = (t.orbit_period(2), t.orbit_period(3), t.base_digits(2, 12), t.base_digits(3, 12))
    thetas = {(k, s): theta_pm(k, s).fraction for k in range(2, 10) for s in "+-"}
    dt = time.perf_counter() - t0
    bad = 0
    for (p, q), (o2, o3, d2, d3) in impl.items():
        bad += o2 != _oracle_orbit(p, q, 2)
        bad += o3 != _oracle_orbit(p, q, 3)
        bad += d2 != _oracle_digits(p, q, 2, 12)
        bad += d3 != _oracle_digits(p, q, 3, 12)
    for (k, s), v in thetas.items():
        bad += v != (Fraction(1, 2**k - 1) if s == "+" else 1 - Fraction(1, 2**k - 1))
    assert acceptance_line(8, bad == 0, f"{len(fracs)} reduced fractions q <= 511, {bad} mismatches", dt, 5)


# 9 ------------------------------------------------------------------------------


def test_c09_brjuno(acceptance_line):
    from parabolic_basin.renorm import brjuno_partial, fast_growth_rule, golden_mean

    t0 = time.perf_counter()
    g1, g2 = brjuno_partial(golden_mean(), 20), brjuno_partial(golden_mean(), 20)
    # the synthetic sum grows by log 2 per term, so crossing the blow-up threshold needs N ~ 1450
    h1, h2 = brjuno_partial(rule=fast_growth_rule, N=2000), brjuno_partial(rule=fast_growth_rule, N=2000)
    dt = time.perf_counter() - t0
    ok = (g1.partial_sums[-1] < 5 and g1.verdict == "likely_brjuno" and h1.verdict == "likely_not_brjuno"
          and g1 == g2 and h1 == h2)
    assert acceptance_line(9, ok, f"golden B_20 = {g1.partial_sums[-1]:.4f} ({g1.verdict}); fast growth "
                                  f"{h1.verdict}; repeat identical", dt, 1)


# 10 -----------------------------------------------------------------------------


def test_c10_a0_control(acceptance_line):
    from parabolic_basin.itinerary import component_certificates
    from parabolic_basin.render import RenderSpec, classify_grid

    t0 = time.perf_counter()
    cls = classify_grid(CubicMap(0j), RenderSpec(0j, 3.0, (201, 201), 500))
    sym = bool(np.array_equal(cls.codes, cls.codes[::-1, ::-1]) and np.array_equal(cls.times, cls.times[::-1, ::-1]))
    rep = component_certificates(8)
    dt = time.perf_counter() - t0
    # both closures contain the parabolic point, so disjointness is checked away from 0
    ok = sym and rep.ok and rep.disjoint_off_zero
    assert acceptance_line(10, ok, f"pixel symmetry {sym}; two certified curves, {rep.crossings} crossings, "
                                   f"common points {list(rep.shared)}, separation {rep.separation:.3f} "
                                   f"outside |z| < 0.05", dt, 60)
