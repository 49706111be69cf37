"""Itineraries with respect to Xi0 / Xi1, the boundary parametrization and wakes.

Theta(z) = 0.e0 e1 e2 ... in binary, where e_k = 0 or 1 according as f^k(z) lies in Xi0 or
Xi1. This is the normalization for which Theta(0) = 0, Theta(beta) = 1/2 and
Theta(f(z)) = 2 Theta(z) mod 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from .angles import RationalAngle, base_digits, from_digits, from_periodic_digits
from .boettcher import boettcher_value, landing_point
from .cubic import find_cycles
from .geometry import diameter, polygon_area, polyline_intersections, self_intersections, winding_number
from .partition import ON_GRAPH, XI0, XI1, PartitionGraph

CYCLE_TOL = 1e-7
LANDING_TOL = 1e-4
MAX_CHART_DEPTH = 14


class OnGraphAtStep(ValueError):
    def __init__(self, step: int):
        super().__init__(f"iterate {step} lies on the graph")
        self.step = step


class NoMatchingPreimage(RuntimeError):
    pass


class OrderViolation(RuntimeError):
    pass


class InjectivityFailure(RuntimeError):
    pass


class Inconclusive(RuntimeError):
    pass


@dataclass(frozen=True)
class ItineraryAngle:
    digits: tuple
    value: RationalAngle
    exact: bool
    kind: str = "truncated"  # truncated | dyadic | periodic

    def __str__(self):
        tag = "" if self.exact else "~"
        return f"{tag}{self.value}"

    def shifted(self) -> tuple:
        return self.digits[1:]


# -- Theta ---------------------------------------------------------------------


def _vertex_hit(partition: PartitionGraph, w: complex):
    o = partition.oracle
    if abs(w) < o.guards[0]:
        return 0
    if abs(w - partition.beta) < o.guards[1]:
        return 1
    return None


def theta_of(partition: PartitionGraph, z: complex, n_digits: int = 32) -> ItineraryAngle:
    """Itinerary of z, with exact values for orbits reaching 0 (dyadic) or closing up (periodic)."""
    f = partition.fmap
    digits: list[int] = []
    orbit: list[complex] = []
    w = complex(z)
    for k in range(n_digits):
        hit = _vertex_hit(partition, w)
        if hit is not None:
            # beta carries 1 followed by zeros; 0 carries zeros
            tail = ([1] if hit == 1 else []) + [0] * n_digits
            value = from_digits(digits + ([1] if hit == 1 else []))
            return ItineraryAngle(tuple((digits + tail)[:n_digits]), value, True, "dyadic")
        for j, prev in enumerate(orbit):
            if abs(w - prev) < CYCLE_TOL * (1.0 + abs(w)):
                prefix, period = digits[:j], digits[j:]
                value = from_periodic_digits(prefix, period)
                out = list(digits)
                while len(out) < n_digits:
                    out.extend(period)
                return ItineraryAngle(tuple(out[:n_digits]), value, True, "periodic")
        if abs(w) > f.escape_radius:
            # escaping: the rest of the itinerary is that of the external angle under tripling
            s = float(np.angle(boettcher_value(f, w)) / (2 * np.pi)) % 1.0
            return _angle_itinerary(partition, s, digits, k, n_digits)
        s = partition.side(w)
        if s == ON_GRAPH:
            raise OnGraphAtStep(k)
        digits.append(0 if s == XI0 else 1)
        orbit.append(w)
        w = f.eval(w)
    return ItineraryAngle(tuple(digits), from_digits(digits), False, "truncated")


def ray_side(partition: PartitionGraph, s: float, tol: float = 1e-12) -> str:
    """Side of the whole external ray R(s): Xi0 between R(0) and the beta-ray counterclockwise."""
    b = float(partition.beta_angle)
    if min(s % 1.0, 1.0 - s % 1.0) < tol or abs(s - b) < tol:
        return ON_GRAPH
    return XI0 if 0.0 < s < b else XI1


def _angle_itinerary(partition, s, digits, k0, n_digits):
    angles = []
    digits = list(digits)
    for k in range(k0, n_digits):
        for j, prev in enumerate(angles):
            d = abs(s - prev)
            if min(d, 1.0 - d) < CYCLE_TOL:
                j += len(digits) - len(angles)
                prefix, period = digits[:j], digits[j:]
                out = list(digits)
                while len(out) < n_digits:
                    out.extend(period)
                return ItineraryAngle(tuple(out[:n_digits]), from_periodic_digits(prefix, period), True, "periodic")
        side = ray_side(partition, s)
        if side == ON_GRAPH:
            raise OnGraphAtStep(k)
        digits.append(0 if side == XI0 else 1)
        angles.append(s)
        s = (3.0 * s) % 1.0
    return ItineraryAngle(tuple(digits), from_digits(digits), False, "truncated")


# -- boundary points -------------------------------------------------------------


def _select(partition: PartitionGraph, targets: np.ndarray, digits: np.ndarray) -> np.ndarray:
    """Preimages of boundary points lying on the boundary of B in the side given by ``digits``.

    Of the three preimages, the one farthest from B (it lies on the boundary of the other
    preimage component) is dropped; the remaining two sit on opposite sides of S1.
    """
    roots = partition.fmap.preimages(targets)
    dB = partition.mask.distance(roots.ravel()).reshape(roots.shape)
    order = np.argsort(dB, axis=1)
    two = np.take_along_axis(roots, order[:, :2], axis=1)
    sides = partition.sides(two.ravel()).reshape(two.shape)
    want = np.where(digits == 0, XI0, XI1)
    other = np.where(digits == 0, XI1, XI0)
    out = np.empty(targets.shape, dtype=complex)
    for i in range(targets.size):
        s0, s1 = sides[i]
        if s0 == want[i] and s1 != want[i]:
            out[i] = two[i, 0]
        elif s1 == want[i] and s0 != want[i]:
            out[i] = two[i, 1]
        elif s0 == ON_GRAPH and s1 == other[i]:
            out[i] = two[i, 0]
        elif s1 == ON_GRAPH and s0 == other[i]:
            out[i] = two[i, 1]
        else:
            raise NoMatchingPreimage(f"preimages of {targets[i]} classified {s0}, {s1}")
    return out


def boundary_point(partition: PartitionGraph, t) -> complex:
    """The iterated preimage of 0 on the boundary of B with Theta = t (t dyadic)."""
    t = RationalAngle.of(t)
    if not t.is_dyadic():
        raise ValueError("boundary_point needs a dyadic angle")
    if t.numerator == 0:
        return 0j
    m = t.denominator.bit_length() - 1
    d = base_digits(t, 2, m)
    p = partition.beta
    for i in range(m - 2, -1, -1):
        p = _select(partition, np.array([p]), np.array([d[i]]))[0]
    return complex(p)


@dataclass(frozen=True)
class BoundaryChart:
    depth: int
    angles: tuple  # RationalAngle, increasing
    points: np.ndarray = field(repr=False)

    @property
    def samples(self) -> dict:
        return dict(zip(self.angles, self.points))

    def point(self, t) -> complex:
        t = RationalAngle.of(t)
        step = 2**self.depth // t.denominator
        return complex(self.points[t.numerator * step])

    def gaps(self) -> np.ndarray:
        p = np.append(self.points, self.points[0])
        return np.abs(np.diff(p))

    def to_curve(self):
        from .curves import TracedCurve

        pts = np.append(self.points, self.points[0])
        par = np.append(np.arange(self.points.size) / self.points.size, 1.0)
        return TracedCurve(f"BOUNDARY depth={self.depth}", pts, par, {"depth": self.depth})


def boundary_chart(partition: PartitionGraph, depth: int) -> BoundaryChart:
    """Samples at all j / 2^depth, built level by level from beta."""
    if not 1 <= depth <= MAX_CHART_DEPTH:
        raise ValueError(f"depth must be in 1..{MAX_CHART_DEPTH}")
    N = 2**depth
    pts = np.zeros(N, dtype=complex)
    pts[N // 2] = partition.beta
    for m in range(2, depth + 1):
        stride = N // 2**m
        js = np.arange(1, 2**m, 2)
        idx = js * stride
        images = pts[(2 * idx) % N]
        digits = (js >= 2 ** (m - 1)).astype(int)
        pts[idx] = _select(partition, images, digits)
    angles = tuple(RationalAngle(j, N) for j in range(N))
    return BoundaryChart(depth, angles, pts)


# -- Jordan curve certificate -----------------------------------------------------


@dataclass
class JordanCertificate:
    depth: int
    equivariance_error: float
    min_gap: float
    min_gap_pair: tuple
    max_gaps: list  # max consecutive gap for depth 1..depth
    simple: bool
    orientation: str
    winds_critical_point: int
    violations: list
    chart: BoundaryChart = field(repr=False)

    @property
    def order_ok(self) -> bool:
        return self.simple and self.orientation == "counterclockwise" and self.winds_critical_point == 1

    @property
    def ok(self) -> bool:
        return self.order_ok and self.min_gap > 0 and self.equivariance_error < 1e-5

    def to_text(self) -> str:
        lines = [
            f"depth: {self.depth}",
            f"samples: {2**self.depth}",
            f"equivariance_error: {self.equivariance_error:.3e}",
            f"min_gap: {self.min_gap:.3e}",
            f"min_gap_pair: {self.min_gap_pair[0]} {self.min_gap_pair[1]}",
            "max_consecutive_gap: " + " ".join(f"{g:.4e}" for g in self.max_gaps),
            f"simple: {self.simple}",
            f"orientation: {self.orientation}",
            f"winding_about_c0: {self.winds_critical_point}",
            f"violations: {len(self.violations)}",
            f"status: {'ok' if self.ok else 'failed'}",
        ]
        return "\n".join(lines) + "\n"


def certify_chart(partition: PartitionGraph, chart: BoundaryChart, raise_on_failure: bool = False) -> JordanCertificate:
    f = partition.fmap
    pts = chart.points
    N = pts.size
    j = np.arange(N)
    eq = float(np.abs(f.eval(pts) - pts[(2 * j) % N]).max())
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    d, nn = tree.query(np.column_stack([pts.real, pts.imag]), k=2)
    i = int(np.argmin(d[:, 1]))
    min_gap = float(d[i, 1])
    pair = (chart.angles[i], chart.angles[int(nn[i, 1])])
    max_gaps = []
    for m in range(1, chart.depth + 1):
        sub = pts[:: N // 2**m]
        max_gaps.append(float(np.abs(np.diff(np.append(sub, sub[0]))).max()))
    closed = np.append(pts, pts[0])
    hits = self_intersections(closed)
    # segments sharing the closing vertex are adjacent too
    hits = [(a, b) for a, b in hits if not (a == 0 and b == N - 1)]
    area = polygon_area(closed)
    wind = winding_number(f.c0, closed)
    violations = [(chart.angles[a], chart.angles[b % N]) for a, b in hits]
    cert = JordanCertificate(chart.depth, eq, min_gap, pair, max_gaps, not hits,
                             "counterclockwise" if area > 0 else "clockwise", wind, violations, chart)
    if raise_on_failure:
        if min_gap <= 0:
            raise InjectivityFailure(f"coincident samples at {pair}")
        if not cert.order_ok:
            raise OrderViolation(f"cyclic order violated: {violations[:5]}")
    return cert


def jordan_certificate(partition: PartitionGraph, depth: int, raise_on_failure: bool = False) -> JordanCertificate:
    return certify_chart(partition, boundary_chart(partition, depth), raise_on_failure)


@dataclass(frozen=True)
class ComponentReport:
    """Boundary charts of the two basin components of the odd map z + z^3."""

    certificates: tuple
    crossings: int  # proper crossings between the two closed curves away from 0
    shared: tuple  # sample points common to both curves
    separation: float  # least distance between samples at distance >= r from 0

    @property
    def ok(self) -> bool:
        return all(c.order_ok and c.min_gap > 0 for c in self.certificates)

    @property
    def disjoint_off_zero(self) -> bool:
        return self.crossings == 0 and all(abs(z) < CYCLE_TOL for z in self.shared)


def component_certificates(depth: int, r: float = 0.05, mask_resolution: int = 768) -> ComponentReport:
    """Certify the boundary of each of the two components of B for a = 0 separately.

    Each component gets its own petal (the chart sign picks it) and its own beta = +-i.
    Both closures contain the parabolic point, so the curves are compared away from 0.
    """
    from .cubic import CubicMap
    from .fatou import FatouChart
    from .partition import build_partition

    certs, rings = [], []
    for s in (1, -1):
        f = CubicMap(0j).with_critical_order(1j * s / math.sqrt(3), -1j * s / math.sqrt(3))
        part = build_partition(f, chart=FatouChart(f, sign=s), require_assumption=False,
                               mask_resolution=mask_resolution)
        cert = jordan_certificate(part, depth)
        certs.append(cert)
        rings.append(np.append(cert.chart.points, cert.chart.points[0]))
    A, B = rings
    cross = len(polyline_intersections(A, B, exclude_near=[0j], tol=r))
    d = np.abs(A[:-1, None] - B[None, :-1])
    shared = tuple(complex(A[i]) for i in np.unique(np.nonzero(d < CYCLE_TOL)[0]))
    far = (np.abs(A[:-1]) >= r)[:, None] & (np.abs(B[:-1]) >= r)[None, :]
    sep = float(d[far].min()) if far.any() else math.inf
    return ComponentReport(tuple(certs), cross, shared, sep)


# -- wakes ---------------------------------------------------------------------


def _angles_at_zero(partition: PartitionGraph) -> list:
    out = [RationalAngle(0, 1)]
    half = landing_point(partition.fmap, RationalAngle(1, 2), tracer=partition.tracer)
    if abs(half.point) < LANDING_TOL:
        out.append(RationalAngle(1, 2))
    return out


def rays_landing_at(partition: PartitionGraph, x: complex, candidates) -> list:
    out = []
    for t in candidates:
        res = landing_point(partition.fmap, t, tracer=partition.tracer)
        if abs(res.point - x) < LANDING_TOL * 10:
            out.append(RationalAngle.of(t))
    return sorted(out)


def _bounding_pair(landing: list, reference: RationalAngle):
    """Consecutive landing angles whose arc holds ``reference`` (the side of B); the wake is the rest."""
    if len(landing) < 2:
        return None
    fl = [float(t) for t in landing]
    r = float(reference)
    for i in range(len(landing)):
        a, b = fl[i], fl[(i + 1) % len(landing)]
        if (r - a) % 1.0 < (b - a) % 1.0:
            # wake runs counterclockwise from b to a
            return (landing[(i + 1) % len(landing)], landing[i])
    return None


def periodic_boundary_point(partition: PartitionGraph, theta: RationalAngle) -> complex | None:
    pre, period = theta.orbit_period(2)
    if pre != 0:
        return None
    cycles, _ = find_cycles(partition.fmap, period)
    for cyc in cycles:
        if cyc.period != period:
            continue
        for p in cyc.points:
            if partition.mask.distance(p)[0] > 4 * partition.mask.step:
                continue
            try:
                th = theta_of(partition, p, 2 * period + 4)
            except OnGraphAtStep:
                continue
            if th.exact and th.value == theta:
                return complex(p)
    return None


def wake_of(partition: PartitionGraph, z: complex, n_digits: int = 32):
    """(Theta(z), bounding ray pair or None)."""
    th = theta_of(partition, z, n_digits)
    if not th.exact:
        return th, None
    t = th.value
    if t.is_dyadic():
        x = boundary_point(partition, t)
        m = max(0, t.denominator.bit_length() - 1)
        cands = set()
        for s in _angles_at_zero(partition):
            for k in range(3**m):
                cands.add(RationalAngle(s.numerator * 1 + k * s.denominator, s.denominator * 3**m))
        landing = rays_landing_at(partition, x, sorted(cands))
    else:
        x = periodic_boundary_point(partition, t)
        if x is None:
            return th, None
        k = t.orbit_period(2)[1]
        landing = []
        for q in (k, 2 * k):
            n = 3**q - 1
            landing = rays_landing_at(partition, x, [RationalAngle(j, n) for j in range(n)])
            if landing:
                break
    ref = RationalAngle(0, 1) if abs(x) > 1e-9 else partition.beta_angle
    return th, _bounding_pair(landing, ref)


# -- neighbourhoods U_n of the parabolic point ----------------------------------


@dataclass
class UnDiagnostic:
    verdict: str  # XIsPoint | XNontrivial | Inconclusive
    diameters: list
    bounding_angles: list
    half_ray_landing: complex
    limit_estimate: float

    def to_text(self) -> str:
        return (f"verdict: {self.verdict}\n"
                "diameters: " + " ".join(f"{d:.4e}" for d in self.diameters) + "\n"
                f"limit_estimate: {self.limit_estimate:.4e}\n"
                f"half_ray_landing: {self.half_ray_landing.real:.10g} {self.half_ray_landing.imag:.10g}\n")


def _rays_below(partition: PartitionGraph, angles, v_cut: float, n_div: int):
    tr = partition.tracer
    pot = tr.potentials(n_div)
    pts = []
    for t in angles:
        r = tr.ray_points(t, n_div)
        pts.append(r[pot <= v_cut])
    return np.concatenate(pts) if pts else np.zeros(0, dtype=complex)


def u_n_diagnostic(partition: PartitionGraph, n_max: int = 5, v0: float = 1.0, rays_per_piece: int = 96) -> UnDiagnostic:
    """Diameters of the pieces U_n (cut off at potential v0 / 3^n) around the parabolic point.

    U_n is bounded by the two pull-backs of the beta-ray landing at Theta = +-2^-(n+1) and the
    equipotential; its diameter is estimated from ray samples with angles in the piece.
    """
    tr = partition.tracer
    n_div = 14
    hi = lo = partition.beta_angle
    diams, bounds = [], []
    for n in range(1, n_max + 1):
        targets = [boundary_point(partition, RationalAngle(1, 2 ** (n + 1))),
                   boundary_point(partition, RationalAngle(2 ** (n + 1) - 1, 2 ** (n + 1)))]
        new = []
        for base, x in zip((hi, lo), targets):
            cands = [RationalAngle(base.numerator + k * base.denominator, 3 * base.denominator) for k in range(3)]
            best = min(cands, key=lambda t: abs(tr.ray_points(t, 200)[-1] - x))
            new.append(best)
        hi, lo = new
        bounds.append((lo, hi))
        # the piece runs counterclockwise from lo to hi through angle 0
        a, b = float(lo), float(hi)
        span = (b - a) % 1.0
        denom = 2 * 3**8
        grid = [RationalAngle(j, denom) for j in range(denom) if 0 < (j / denom - a) % 1.0 < span]
        if len(grid) > rays_per_piece:
            grid = [grid[i] for i in np.linspace(0, len(grid) - 1, rays_per_piece).astype(int)]
        pts = _rays_below(partition, grid + [lo, hi], v0 / 3**n, n_div)
        pts = np.concatenate([pts, targets, [0j]])
        diams.append(diameter(pts))
    half = landing_point(partition.fmap, RationalAngle(1, 2), tracer=tr).point
    d = diams
    if len(d) >= 3 and d[-1] != d[-2]:
        # limit of d_n assuming 1/(d_n - L) grows linearly (parabolic) or d_n - L shrinks geometrically
        from .boettcher import _mobius_limit

        lim = float(abs(_mobius_limit(d[-3], d[-2], d[-1])))
    else:
        lim = float(d[-1])
    decreasing = all(d[i + 1] < d[i] for i in range(len(d) - 1))
    if abs(half) < LANDING_TOL:
        verdict = "XNontrivial"
    elif decreasing and (d[-1] < 1e-3 or lim < 1e-3 * max(1.0, d[0])):
        verdict = "XIsPoint"
    else:
        raise Inconclusive(f"diameters {d} do not shrink and R(1/2) lands at {half}")
    return UnDiagnostic(verdict, diams, bounds, complex(half), lim)
