"""The graph S1 and the partition of the plane into Xi0 / Xi1.

S0 is the closed line E0(1) together with the fixed ray R(0). Its pull-back through c0 is
the figure-eight E0(0) (loops R through 0 and L through beta) plus R(0) and the preimage
of R(0) landing at beta. Xi0 is the unbounded complementary region to the left of R(0)
(walking out from 0), i.e. the one between R(0) and the beta-ray counterclockwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import ndimage

from .angles import RationalAngle
from .boettcher import RayTracer
from .cubic import CubicMap, check_assumption1
from .curves import TracedCurve
from .fatou import FatouChart, _line_from_real, e0_figure_eight
from .geometry import near_polyline, points_in_polygon

XI0, XI1, ON_GRAPH = "Xi0", "Xi1", "OnGraph"
GRAPH_TUBE = 1e-9
FAR_RADIUS = 1e6
TAIL_T = 1e4
TAIL_U = 4000.0
DECIMATE = 2e-3
PINCH_PIXELS = 8


class TracePullbackFailure(RuntimeError):
    pass


class AssumptionViolated(ValueError):
    pass


# -- basin raster ---------------------------------------------------------------


@dataclass(frozen=True)
class BasinMask:
    """Raster of the immediate basin component containing a seed, with a distance field."""

    origin: complex
    step: float
    mask: np.ndarray = field(repr=False)
    dist: np.ndarray = field(repr=False)

    def distance(self, z) -> np.ndarray:
        """Distance from z to the nearest pixel of the component (inf off the raster)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        ny, nx = self.mask.shape
        ix = np.rint((z.real - self.origin.real) / self.step).astype(np.int64)
        iy = np.rint((z.imag - self.origin.imag) / self.step).astype(np.int64)
        ok = (ix >= 0) & (ix < nx) & (iy >= 0) & (iy < ny)
        out = np.full(z.shape, np.inf)
        out[ok] = self.dist[iy[ok], ix[ok]]
        return out

    def contains(self, z) -> np.ndarray:
        return self.distance(z) == 0


def _grid(center: complex, half: float, n: int):
    xs = center.real + np.linspace(-half, half, n)
    ys = center.imag + np.linspace(-half, half, n)
    return xs, ys, xs[None, :] + 1j * ys[:, None]


def _component(fmap: CubicMap, center: complex, half: float, n: int, seed: complex, budget: int):
    xs, ys, Z = _grid(center, half, n)
    codes, _, last = fmap.classify_points(Z, budget, final=True)
    step = xs[1] - xs[0]
    # cut the pixels around the parabolic point: basins touching there would merge
    basin = (codes == 1) & (np.abs(Z) > PINCH_PIXELS * step)
    if fmap.a == 0:
        # two petals: keep the orbits entering the petal of the seed (they touch the others only
        # tangentially, which a raster cannot resolve)
        basin &= np.sign(last.imag) == np.sign(seed.imag)
    lab, _ = ndimage.label(basin)
    iy = int(round((seed.imag - ys[0]) / step))
    ix = int(round((seed.real - xs[0]) / step))
    if not (0 <= ix < n and 0 <= iy < n) or lab[iy, ix] == 0:
        raise AssumptionViolated("seed point is not resolved in the basin raster")
    return complex(xs[0], ys[0]), step, lab == lab[iy, ix]


def basin_mask(fmap: CubicMap, seed: complex, n: int = 768, budget: int = 3000) -> BasinMask:
    """Two-pass raster: locate the component on a coarse grid, then resample its bounding box."""
    R = fmap.escape_radius
    origin, step, comp = _component(fmap, 0j, R, 256, seed, budget)
    iy, ix = np.nonzero(comp)
    lo = origin + complex(ix.min() * step, iy.min() * step)
    hi = origin + complex(ix.max() * step, iy.max() * step)
    center = 0.5 * (lo + hi)
    half = 0.5 * max(hi.real - lo.real, hi.imag - lo.imag) * 1.3 + 2 * step
    origin, step, comp = _component(fmap, center, half, n, seed, budget)
    dist = ndimage.distance_transform_edt(~comp) * step
    return BasinMask(origin, float(step), comp, dist)


# -- side oracle ----------------------------------------------------------------


def _decimate(pts: np.ndarray, vertex: complex, rel: float = DECIMATE) -> np.ndarray:
    """Drop points closer than rel * |z - vertex| to the last kept one (dense parabolic tails)."""
    keep = [0]
    last = pts[0]
    for i in range(1, pts.size - 1):
        if abs(pts[i] - last) >= rel * abs(pts[i] - vertex):
            keep.append(i)
            last = pts[i]
    keep.append(pts.size - 1)
    return pts[np.array(keep)]


@dataclass(frozen=True)
class SideOracle:
    """Point -> Xi0 / Xi1 / OnGraph by even-odd crossing against a polygon bounding Xi0."""

    polygon: np.ndarray = field(repr=False)
    tube_curves: tuple = field(repr=False)
    far_arg0: float = 0.0
    far_span: float = 0.0
    vertices: tuple = ()
    guards: tuple = ()
    tube: float = GRAPH_TUBE

    def __call__(self, z) -> str:
        return self.classify(np.array([z]))[0]

    def classify(self, zs) -> np.ndarray:
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        out = np.empty(zs.shape, dtype=object)
        far = np.abs(zs) > 0.5 * FAR_RADIUS
        inside = np.zeros(zs.shape, dtype=bool)
        if (~far).any():
            inside[~far] = points_in_polygon(zs[~far], self.polygon)
        if far.any():
            rel = np.mod(np.angle(zs[far]) - self.far_arg0, 2 * np.pi)
            inside[far] = rel < self.far_span
        out[:] = np.where(inside, XI0, XI1)
        on = np.zeros(zs.shape, dtype=bool)
        for v, g in zip(self.vertices, self.guards):
            on |= np.abs(zs - v) < g
        for c in self.tube_curves:
            near = ~on
            if near.any():
                on[near] |= near_polyline(zs[near], c, self.tube)
        out[on] = ON_GRAPH
        return out


# -- the partition ------------------------------------------------------------


@dataclass(frozen=True)
class PartitionGraph:
    fmap: CubicMap
    chart: FatouChart
    s0_curves: tuple
    s1_curves: tuple
    oracle: SideOracle
    beta: complex
    beta_angle: RationalAngle
    mask: BasinMask
    tracer: RayTracer = field(repr=False, compare=False)

    def side(self, z) -> str:
        return self.oracle(z)

    def sides(self, zs) -> np.ndarray:
        return self.oracle.classify(zs)

    @property
    def xi_side_oracle(self):
        return self.oracle


def _check_continuity(curve: TracedCurve):
    d = np.abs(np.diff(curve.points))
    if d.size < 3:
        return
    # local step: median of the neighbouring steps
    pad = np.concatenate([[d[0]], d, [d[-1]]])
    local = np.minimum(pad[:-2], pad[2:])
    bad = np.nonzero(d > 10 * np.maximum(local, 1e-14) + 1e-12)[0]
    if bad.size:
        raise TracePullbackFailure(f"{curve.label}: gap at sample {int(bad[0])} ({d[bad[0]]:.3g})")


def _ray_to_vertex(tracer: RayTracer, angle: RationalAngle, chart: FatouChart, vertex_u) -> np.ndarray:
    """Ray points from potential v_high down until the tail is deep in the parabolic regime."""
    n = 64
    while True:
        pts = tracer.ray_points(angle, n)
        if vertex_u(pts[-1]) >= TAIL_U or n >= 12000:
            return pts
        n = min(12000, 2 * n)


def build_partition(fmap: CubicMap, chart: FatouChart | None = None, tracer: RayTracer | None = None,
                    require_assumption: bool = True, mask_resolution: int = 768) -> PartitionGraph:
    if require_assumption:
        res = check_assumption1(fmap)
        if not res.satisfied:
            raise AssumptionViolated(res.reason)
        fmap = fmap.with_critical_order(res.c0, res.c)
    chart = chart or FatouChart(fmap)
    tracer = tracer or RayTracer(fmap)
    c0 = fmap.c0

    ts = np.sinh(np.linspace(0.0, np.arcsinh(TAIL_T), 500))[1:]
    eight = e0_figure_eight(chart, ts)
    arcs = eight["arcs"]
    for a in arcs:
        _check_continuity(a)
    ends = [a.points[-1] for a in arcs]
    # beta: the nonzero preimage of 0 at which the loop L closes up
    other_end = eight["other"].points[0]
    bc = fmap.beta_candidates()
    beta = min(bc, key=lambda b: abs(b - other_end))
    if abs(other_end - beta) > 1e-2:
        raise TracePullbackFailure("figure-eight loop does not close at a preimage of 0")

    # S0: E0(1) sampled at the same Fatou heights, and R(0)
    tt = np.concatenate([-ts[::-1], [0.0], ts])
    pts1, par1 = _line_from_real(chart, 1.0, tt)
    e1 = TracedCurve("LineE0(1)", pts1, par1, {"level": 1})

    u0 = lambda z: abs(chart.to_u(z)) if z != 0 else np.inf
    r0 = _ray_to_vertex(tracer, RationalAngle(0, 1), chart, u0)
    ray0 = TracedCurve("ExternalRay(0/1)", r0, tracer.potentials((r0.size - 1) // tracer.s), {"angle": RationalAngle(0, 1)})

    # the preimage of R(0) landing at beta, traced with the same number of divisions
    n_div = (r0.size - 1) // tracer.s
    cands = [RationalAngle(1, 3), RationalAngle(2, 3)]
    probe = {t: tracer.ray_points(t, min(n_div, 400))[-1] for t in cands}
    bangle = min(cands, key=lambda t: abs(probe[t] - beta))
    rb = tracer.ray_points(bangle, n_div)
    if abs(rb[-1] - beta) > 1e-2:
        raise TracePullbackFailure("no preimage ray of R(0) lands at beta")
    rayb = TracedCurve(f"ExternalRay({bangle})", rb, tracer.potentials(n_div), {"angle": bangle})

    # polygon bounding Xi0
    zero_arc = min((a for a in arcs), key=lambda a: abs(a.points[-1]))
    beta_arc = min((a for a in arcs), key=lambda a: abs(a.points[-1] - beta))
    rdec = _decimate(r0, 0j)
    bdec = _decimate(rb, beta)
    zR, zB = r0[0], rb[0]
    argR, argB = math.atan2(zR.imag, zR.real), math.atan2(zB.imag, zB.real)
    span = (argB - argR) % (2 * math.pi)
    arc = FAR_RADIUS * np.exp(1j * (argR + np.linspace(0.0, span, 256)))
    poly = np.concatenate([
        [0j], rdec[::-1],            # 0 -> far end of R(0)
        arc,                          # counterclockwise at infinity
        bdec,                         # far end of the beta-ray -> beta
        [beta], _decimate(beta_arc.points[::-1], beta),  # beta -> c0 along L
        _decimate(zero_arc.points, 0j),                  # c0 -> 0 along R
    ])
    guard0 = 2.0 * max(abs(r0[-1]), abs(zero_arc.points[-1]))
    guardb = 2.0 * max(abs(rb[-1] - beta), abs(beta_arc.points[-1] - beta))
    tube_curves = tuple(a.points for a in arcs) + (r0, rb)
    oracle = SideOracle(poly, tube_curves, argR, span, (0j, beta), (guard0, guardb))

    s1 = tuple(arcs) + (ray0, rayb)
    mask = basin_mask(fmap, c0, mask_resolution)
    return PartitionGraph(fmap, chart, (e1, ray0), s1, oracle, complex(beta), bangle, mask, tracer)
