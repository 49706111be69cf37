"""Periodic accesses to the boundary of B with Theta = +-1/(2^k - 1).

An access is built from one fundamental leg delta and its images under the contracting
branch g = f_b^(k-1) o f_o, where f_b is the inverse branch into the side of the access
(Xi0 for the + sign, Xi1 for the - sign) and f_o the branch into the other side:

* delta0: the straight segment in the Fatou chart from phi(y0) = 1 + i t0 to -(k-1),
  mapped back by continuation of phi_bar (it ends at f_b^(k-1)(c0));
* delta1: an arc in the loop L joining f_o(y0) and c0, pulled back k-1 times by f_b.

Legs are pulled back by continuity: the three cubic roots are computed for every sample and
the root nearest to the previous one is kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .angles import RationalAngle, theta_pm
from .boettcher import LandingResult
from .curves import TracedCurve
from .fatou import FatouChart, NewtonDivergence, _newton, inverse_fatou
from .geometry import diameter, polyline_intersections, self_intersections
from .partition import ON_GRAPH, XI0, XI1, PartitionGraph

LEG_DIAMETER_TOL = 1e-6
MAX_LEGS = 400
PERIODIC_TOL = 1e-5
SAMPLES_DELTA0 = 240
SAMPLES_DELTA1 = 160


class BranchSelectionFailure(RuntimeError):
    pass


class NonSimple(RuntimeError):
    pass


@dataclass(frozen=True)
class AccessCurve:
    k: int
    sign: int
    legs: tuple = field(repr=False)
    landing: LandingResult
    y_points: tuple
    y_heights: tuple = ()
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def angle(self) -> RationalAngle:
        return theta_pm(self.k, "+" if self.sign > 0 else "-")

    @property
    def points(self) -> np.ndarray:
        pts = [self.legs[0].points]
        pts += [leg.points[1:] for leg in self.legs[1:]]
        return np.concatenate(pts + [[self.landing.point]])

    def to_curve(self) -> TracedCurve:
        pts = self.points
        s = "+" if self.sign > 0 else "-"
        return TracedCurve(f"ACCESS k={self.k} sign={s}", pts, np.arange(pts.size, dtype=float),
                           {"k": self.k, "sign": self.sign})


def _parse_sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be + or -, got {sign!r}")


# -- continuation helpers --------------------------------------------------------


def _continue_path(chart: FatouChart, svals: np.ndarray, z0: complex) -> np.ndarray:
    """Solve phi_bar(z) = s along a path of targets, starting from a solution at svals[0]."""
    out = [complex(z0)]
    z = complex(z0)
    for s_prev, s in zip(svals[:-1], svals[1:]):
        z = _subpath(chart, s_prev, s, z)
        out.append(z)
    return np.array(out)


def _subpath(chart, s0, s1, z, depth=0):
    try:
        return _newton(chart, s1, z)
    except NewtonDivergence:
        if depth > 14:
            raise
        sm = 0.5 * (s0 + s1)
        z = _subpath(chart, s0, sm, z, depth + 1)
        return _subpath(chart, sm, s1, z, depth + 1)


def _pull_back(fmap, pts: np.ndarray, seed: complex, ambiguity: float = 0.5) -> np.ndarray:
    """Continuous preimage of the polyline pts starting at the root nearest to seed."""
    roots = fmap.preimages(pts)
    out = np.empty(pts.size, dtype=complex)
    cur = seed
    for i in range(pts.size):
        d = np.abs(roots[i] - cur)
        order = np.argsort(d)
        if i > 0 and d[order[0]] > ambiguity * d[order[1]]:
            raise BranchSelectionFailure(f"preimage branches collide at sample {i}")
        cur = roots[i, order[0]]
        out[i] = cur
    return out


def _tau(n: int) -> np.ndarray:
    # uniform, with a geometric approach to tau = 1 (a critical point of phi_bar)
    t = np.linspace(0.0, 1.0, n)[:-1]
    tail = 1.0 - np.geomspace((1.0 - t[-1]) / 2, 1e-12, 30)
    return np.concatenate([t, tail])


def _critical_chain(fmap, c0: complex, end_guess: complex, k: int) -> list:
    """[c0, f_b(c0), ..., f_b^(k-1)(c0)] seeded by forward images of a point near the last."""
    guesses = [end_guess]
    for _ in range(k - 1):
        guesses.append(fmap.eval(guesses[-1]))
    guesses = guesses[::-1]  # guesses[j] ~ f_b^j(c0)
    chain = [complex(c0)]
    for j in range(1, k):
        chain.append(complex(fmap.preimage_near(np.array([chain[-1]]), np.array([guesses[j]]))[0]))
    return chain


def _l_arc_point(partition: PartitionGraph, sigma: int, t0: float) -> complex:
    """The point of the loop L (the figure-eight loop through beta) with phi_bar = i sigma t0."""
    arcs = partition.s1_curves[:4]
    beta = partition.beta
    cands = [a for a in arcs if np.sign(a.meta.get("sign", 0)) == sigma]
    arc = min(cands, key=lambda a: abs(a.points[-1] - beta))
    i = int(np.argmin(np.abs(arc.params - sigma * t0)))
    return _newton(partition.chart, complex(0.0, sigma * t0), complex(arc.points[i]))


# -- the access ---------------------------------------------------------------


def fundamental_leg(partition: PartitionGraph, k: int, sign, t0: float = 1.0) -> dict:
    """delta = phi^-1(delta0) followed by f_b^(k-1)(delta1), from y0 to g(y0)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    sigma = _parse_sign(sign)
    chart, fmap = partition.chart, partition.fmap
    s_start = complex(1.0, sigma * t0)
    y0 = inverse_fatou(chart, s_start)

    tau = _tau(SAMPLES_DELTA0)
    # include the parameters where the segment meets Re = 1 - j (the y-points)
    tau = np.unique(np.concatenate([tau, np.arange(k) / k]))
    svals = s_start * (1.0 - tau) - (k - 1) * tau
    d0 = _continue_path(chart, svals[:-1], y0)
    chain = _critical_chain(fmap, fmap.c0, d0[-1], k)
    if abs(chain[-1] - d0[-1]) > 1e-3:
        raise BranchSelectionFailure("delta0 does not end at a preimage of c0")
    d0 = np.append(d0, chain[-1])
    y_idx = [int(np.argmin(np.abs(tau - j / k))) for j in range(k)]

    # delta1 inside L: phi_bar from i sigma t0 to 0, bulging into Re > 0
    start1 = _l_arc_point(partition, sigma, t0)
    tau1 = _tau(SAMPLES_DELTA1)
    s1 = 1j * sigma * t0 * (1.0 - tau1) + 0.5 * t0 * np.sin(np.pi * tau1) * (1.0 - tau1)
    d1 = _continue_path(chart, s1[:-1], start1)
    d1 = np.append(d1, fmap.c0)
    # pull delta1 back k-1 times along f_b, starting at c0
    cur = d1[::-1]
    for j in range(1, k):
        cur = _pull_back(fmap, cur, chain[j])
    delta = np.concatenate([d0, cur[1:]])
    return {"delta": delta, "y0": y0, "delta0": d0, "delta1": d1, "chain": chain,
            "y_index": y_idx, "sigma": sigma, "t0": t0}


def _expected_sides(k: int, sigma: int) -> list:
    b, o = (XI0, XI1) if sigma > 0 else (XI1, XI0)
    return [o] + [b] * (k - 1)


def apply_g(partition: PartitionGraph, leg: np.ndarray, k: int, sigma: int, check: bool = True) -> np.ndarray:
    """g(leg) by k continuous pull-backs; the seed chain comes from forward images of the endpoint."""
    fmap = partition.fmap
    seeds = [complex(leg[-1])]
    for _ in range(k):
        seeds.append(fmap.eval(seeds[-1]))
    # seeds[k] ~ leg[0], seeds[k-j] is the start of the j-th pull-back
    cur = leg
    sides = _expected_sides(k, sigma)
    for j in range(1, k + 1):
        cur = _pull_back(fmap, cur, seeds[k - j])
        if check:
            got = partition.sides(cur[1:-1:max(1, cur.size // 24)])
            bad = [s for s in got if s not in (ON_GRAPH, sides[j - 1])]
            if bad:
                raise BranchSelectionFailure(f"pull-back {j} left {sides[j - 1]}")
    return cur


def _periodic_refine(fmap, x: complex, k: int) -> tuple[complex, float]:
    for _ in range(50):
        w, d = x, 1.0 + 0j
        for _ in range(k):
            d *= fmap.derivative(w)
            w = fmap.eval(w)
        step = (w - x) / (d - 1.0)
        x -= step
        if abs(step) < 1e-15:
            break
    w = x
    for _ in range(k):
        w = fmap.eval(w)
    return complex(x), float(abs(w - x))


def build_access(partition: PartitionGraph, k: int, sign, t0: float = 1.0,
                 leg_tol: float = LEG_DIAMETER_TOL, max_legs: int = MAX_LEGS) -> AccessCurve:
    """The k-periodic access of angle +-1/(2^k - 1), as a sequence of legs g^i(delta)."""
    sigma = _parse_sign(sign)
    fl = fundamental_leg(partition, k, sigma, t0)
    fmap, chart = partition.fmap, partition.chart
    legs = [fl["delta"]]
    while diameter(legs[-1]) >= leg_tol:
        if len(legs) >= max_legs:
            raise BranchSelectionFailure("access legs do not shrink")
        legs.append(apply_g(partition, legs[-1], k, sigma))
    x, res = _periodic_refine(fmap, complex(legs[-1][-1]), k)
    converged = res < PERIODIC_TOL and abs(x - legs[-1][-1]) < 10 * leg_tol
    landing = LandingResult(x, bool(converged), res, "access")

    # y-points: f^j of the delta0 samples where Re phi = 1 - j
    d0 = fl["delta0"]
    ys, hs = [], []
    for j, i in enumerate(fl["y_index"]):
        y = fmap.iterate(complex(d0[i]), j)
        ys.append(complex(y))
        hs.append(float(chart.extended(y)[0].imag))
    curves = tuple(TracedCurve(f"ACCESS k={k} leg={i}", leg, np.linspace(0.0, 1.0, leg.size),
                               {"k": k, "sign": sigma, "leg": i}) for i, leg in enumerate(legs))
    meta = {"chain": fl["chain"], "t0": t0, "y0": fl["y0"]}
    return AccessCurve(k, sigma, curves, landing, tuple(ys), tuple(hs), meta)


# -- checks -------------------------------------------------------------------


def _cyclic_sequence(values) -> tuple:
    """Indices sorted by value, rotated to start at index 0."""
    order = [int(i) for i in np.argsort(values)]
    r = order.index(0)
    return tuple(order[r:] + order[:r])


def y_order_matches(access: AccessCurve) -> bool:
    """Cyclic order of the y-points on E0(1) against the angles 2^j theta.

    On the line Re phi = 1 the height runs opposite to the circle orientation (going up the
    line is clockwise around B), so the order is compared with negated heights.
    """
    theta = access.angle
    angles = [float(theta.times(2**j)) for j in range(access.k)]
    return _cyclic_sequence([-h for h in access.y_heights]) == _cyclic_sequence(angles)


def y_point_residuals(access: AccessCurve, chart: FatouChart) -> list:
    """Distance of each y-point to E0(1), estimated as |Re phi - 1| / |phi'|."""
    out = []
    for y in access.y_points:
        v, d = chart.extended(y)
        out.append(abs(v.real - 1.0) / max(abs(d), 1e-300))
    return out


def access_iterates(partition: PartitionGraph, access: AccessCurve) -> list:
    """f^i(gamma) minus the petal, for 0 <= i < k, each as a list of polylines."""
    chart, fmap = partition.chart, partition.fmap
    pts = access.points
    out = []
    for i in range(access.k):
        w = pts if i == 0 else fmap.iterate(pts, i)
        phi = chart.evaluate(w)
        outside = ~(np.real(phi) > 1.0)
        runs, cur = [], []
        for z, keep in zip(w, outside):
            if keep:
                cur.append(z)
            elif cur:
                runs.append(np.array(cur))
                cur = []
        if cur:
            runs.append(np.array(cur))
        out.append([r for r in runs if r.size >= 2])
    return out


def check_simple(partition: PartitionGraph, access: AccessCurve) -> dict:
    """Self-intersections of the access and crossings between its first k iterates (off the petal)."""
    pts = access.points
    self_hits = self_intersections(pts)
    its = access_iterates(partition, access)
    cross = 0
    for i in range(len(its)):
        for j in range(i + 1, len(its)):
            for P in its[i]:
                for Q in its[j]:
                    cross += len(polyline_intersections(P, Q, exclude_near=[access.landing.point, 0j],
                                                        tol=1e-6))
    return {"self_intersections": len(self_hits), "iterate_crossings": cross}
