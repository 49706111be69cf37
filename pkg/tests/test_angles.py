from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from parabolic_basin.angles import (RationalAngle, base_digits, cyclic_order, cyclic_order_real, from_digits,
                                    from_periodic_digits, orbit_period, theta_pm)


def brute_orbit(fr: Fraction, m: int):
    seen = []
    x = fr
    while x not in seen:
        seen.append(x)
        x = (m * x) % 1
    pre = seen.index(x)
    return pre, len(seen) - pre


def brute_digits(fr: Fraction, m: int, n: int):
    out = []
    for _ in range(n):
        fr *= m
        out.append(int(fr))
        fr -= int(fr)
    return out


angles = st.builds(lambda q, p: RationalAngle(p % q, q), st.integers(1, 2000), st.integers(0, 10**6))


def test_normalization():
    assert RationalAngle(3, 6) == RationalAngle(1, 2)
    assert RationalAngle(7, 6) == RationalAngle(1, 6)
    assert RationalAngle(-1, 3) == RationalAngle(2, 3)
    with pytest.raises(ValueError):
        RationalAngle(1, 0)


def test_parse_and_str():
    assert RationalAngle.parse("2/6") == RationalAngle(1, 3)
    assert str(RationalAngle.of("0")) == "0/1"
    assert RationalAngle.of(0.25) == RationalAngle(1, 4)


@pytest.mark.parametrize("m", [2, 3])
def test_oracle_small_denominators(m):
    for q in range(1, 128):
        for p in range(q):
            if Fraction(p, q).denominator != q:
                continue
            t = RationalAngle(p, q)
            assert orbit_period(t, m) == brute_orbit(Fraction(p, q), m)
            assert base_digits(t, m, 10) == brute_digits(Fraction(p, q), m, 10)


def test_known_periods():
    assert RationalAngle(1, 7).orbit_period(2) == (0, 3)
    assert RationalAngle(1, 6).orbit_period(2) == (1, 2)
    assert RationalAngle(1, 3).orbit_period(3) == (1, 1)
    assert RationalAngle(1, 8).orbit_period(3) == (0, 2)


def test_theta_pm():
    assert theta_pm(2, "+") == RationalAngle(1, 3)
    assert theta_pm(3, "-") == RationalAngle(6, 7)
    with pytest.raises(ValueError):
        theta_pm(1, "+")
    with pytest.raises(ValueError):
        theta_pm(3, "x")


@given(st.integers(2, 30))
def test_theta_pm_is_k_periodic_under_doubling(k):
    for s in "+-":
        assert theta_pm(k, s).orbit_period(2) == (0, k)
    assert theta_pm(k, "+").fraction + theta_pm(k, "-").fraction == 1


@given(angles, st.sampled_from([2, 3]))
def test_times_matches_fraction_arithmetic(t, m):
    assert t.times(m).fraction == (m * t.fraction) % 1


@given(angles, st.sampled_from([2, 3]))
def test_preimages_map_back(t, m):
    pre = t.preimages(m)
    assert len(set(pre)) == m
    assert all(p.times(m) == t for p in pre)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=40))
def test_from_digits_roundtrip(ds):
    t = from_digits(ds)
    assert base_digits(t, 2, len(ds)) == ds


@given(st.lists(st.integers(0, 2), max_size=6), st.lists(st.integers(0, 2), min_size=1, max_size=6))
def test_periodic_digits_expand_back(prefix, period):
    assume(set(period) != {2})  # 0.(2)^inf = 1 has a second expansion
    t = from_periodic_digits(prefix, period, 3)
    n = len(prefix) + 3 * len(period)
    assert base_digits(t, 3, n) == (prefix + period * 3)[:n]


@given(angles, angles, angles)
def test_cyclic_order_antisymmetric(a, b, c):
    o = cyclic_order(a, b, c)
    r = cyclic_order(a, c, b)
    if o == "degenerate":
        assert r == "degenerate"
    else:
        assert {o, r} == {"positive", "negative"}
        assert cyclic_order(b, c, a) == o
        assert cyclic_order_real(float(a), float(b), float(c)) == o or abs(float(a) - float(b)) < 1e-12
