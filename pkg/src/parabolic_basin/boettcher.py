"""Green's function and Boettcher coordinate at infinity, equipotentials, external rays, landing."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .angles import RationalAngle
from .cubic import CubicMap
from .curves import TracedCurve, ray_label

BIG_RADIUS = 1e40
GREEN_BUDGET = 2000
TOP_POTENTIAL = 20.0  # Newton targets are placed at potential >= this
DEEP_POINT_POTENTIAL = 1e-6
POTENTIAL_FLOOR = 1e-9
BRANCH_TOL = 1e-12
GEOMETRIC_TOL = 1e-6
CESARO_TOL = 1e-4
CESARO_WINDOW = 64


class DeepPoint(ValueError):
    pass


class BranchAmbiguity(RuntimeError):
    def __init__(self, potential):
        super().__init__(f"preimage branches within {BRANCH_TOL} at potential {potential:.3g}")
        self.potential = potential


class NotConverged(RuntimeError):
    def __init__(self, result):
        super().__init__(f"ray landing not converged (residual {result.residual:.3g})")
        self.result = result


# -- Green's function -------------------------------------------------------------


def green_array(fmap: CubicMap, z, budget: int = GREEN_BUDGET):
    """Vectorized Green's function; returns (G, escaped mask). G = 0 where no escape within budget."""
    z = np.array(z, dtype=complex, copy=True)
    shape = z.shape
    z = z.ravel()
    G = np.zeros(z.shape)
    escaped = np.zeros(z.shape, dtype=bool)
    active = np.arange(z.size)
    w = z.copy()
    scale = 1.0
    R = fmap.escape_radius
    for n in range(budget + 1):
        if active.size == 0:
            break
        aw = np.abs(w)
        done = aw > BIG_RADIUS
        if done.any():
            G[active[done]] = np.log(aw[done]) * scale
            escaped[active[done]] = True
        # beyond the escape radius orbits grow monotonically; anything bounded never reaches it
        active = active[~done]
        w = w[~done]
        w = w * (1.0 + w * (fmap.a + w))
        scale /= 3.0
        # bounded points: stop early once all remaining are bounded for long
    return G.reshape(shape), escaped.reshape(shape)


def green(fmap: CubicMap, z: complex, budget: int = GREEN_BUDGET) -> float:
    G, _ = green_array(fmap, np.array([z]), budget)
    return float(G[0])


# -- Boettcher coordinate --------------------------------------------------------


def boettcher_value(fmap: CubicMap, z: complex) -> complex:
    """phi_inf(z) = z prod_n (1 + a/z_n + 1/z_n^2)^(1/3^(n+1)) with principal factors.

    Raises DeepPoint when the potential is below 1e-6 or when some orbit point has
    |a/z_n + 1/z_n^2| >= 1, where the principal branch is no longer the continuation
    from infinity.
    """
    if green(fmap, z) < DEEP_POINT_POTENTIAL:
        raise DeepPoint("potential too small for the product formula")
    a = fmap.a
    log_phi = cmath.log(z)
    w = complex(z)
    scale = 1.0 / 3.0
    while abs(w) < BIG_RADIUS:
        x = a / w + 1.0 / (w * w)
        if abs(x) >= 1.0:
            raise DeepPoint("orbit enters the region where branch tracking is unreliable")
        log_phi += scale * cmath.log1p(x) if hasattr(cmath, "log1p") else scale * cmath.log(1.0 + x)
        w = fmap.eval(w)
        scale /= 3.0
    return cmath.exp(log_phi)


def asymptotic_inverse(fmap: CubicMap, zeta: complex) -> complex:
    """phi_inf^{-1}(zeta) for |zeta| large: zeta - a/3 - (3 - a^2)/(9 zeta)."""
    a = fmap.a
    return zeta - a / 3.0 - (3.0 - a * a) / (9.0 * zeta)


def _target(fmap: CubicMap, angle: Fraction, v: float):
    """(n, Z): n forward steps so that 3^n v >= TOP_POTENTIAL, Z = phi^-1 at the pushed-forward point."""
    n = 0
    while v * 3**n < TOP_POTENTIAL:
        n += 1
    ang = (angle * 3**n) % 1
    zeta = cmath.exp(v * 3**n + 2j * math.pi * float(ang))
    return n, asymptotic_inverse(fmap, zeta)


def _newton_fn(fmap: CubicMap, n: int, Z: complex, z: complex, steps: int = 60) -> complex:
    for _ in range(steps):
        w, d = fmap.iterate_with_derivative(z, n)
        step = (w - Z) / d
        z = z - step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    return z


def boettcher_inverse(fmap: CubicMap, angle, v: float, guess: complex | None = None) -> complex:
    """The point of potential v on the external ray of the given (rational) angle.

    Newton on f^n(z) = phi^{-1}(exp(3^n (v + 2 pi i angle))); without a guess the
    solution is continued down from potential TOP_POTENTIAL.
    """
    ang = RationalAngle.of(angle).fraction
    if guess is None:
        vv = max(v, TOP_POTENTIAL)
        z = asymptotic_inverse(fmap, cmath.exp(vv + 2j * math.pi * float(ang)))
        while vv > v:
            vv = max(v, vv / 3 ** 0.125)
            n, Z = _target(fmap, ang, vv)
            z = _newton_fn(fmap, n, Z, z)
        return z
    n, Z = _target(fmap, ang, v)
    return _newton_fn(fmap, n, Z, guess)


# -- equipotentials ------------------------------------------------------------


def equipotential(fmap: CubicMap, v: float, n_samples: int = 256) -> TracedCurve:
    """Closed polyline through phi^-1(exp(v + 2 pi i j/n)), j = 0..n (first point repeated)."""
    if v <= 0:
        raise ValueError("v must be positive")
    n_fwd = 0
    while v * 3**n_fwd < TOP_POTENTIAL:
        n_fwd += 1
    # angular substeps keep the Newton targets within a quarter turn of each other
    sub = max(1, math.ceil(4 * 3**n_fwd / n_samples))
    z = boettcher_inverse(fmap, 0, v)
    pts = [z]
    for j in range(1, n_samples + 1):
        for s in range(1, sub + 1):
            ang = Fraction((j - 1) * sub + s, n_samples * sub)
            z = boettcher_inverse(fmap, ang, v, guess=z)
        pts.append(z)
    pts[-1] = pts[0]
    params = np.arange(n_samples + 1) / n_samples
    return TracedCurve(f"EquipotentialInf({v:g})", np.array(pts), params, {"level": v})


# -- external rays ------------------------------------------------------------


def _select_continuous(fmap: CubicMap, targets: np.ndarray, start: complex, potentials=None) -> np.ndarray:
    """Preimages of the polyline ``targets`` chosen by continuity, beginning next to ``start``."""
    roots = fmap.preimages(targets)
    out = np.empty(targets.shape, dtype=complex)
    prev = start
    for i in range(targets.size):
        r = roots[i]
        d = np.abs(r - prev)
        order = np.argsort(d)
        if abs(r[order[0]] - r[order[1]]) < BRANCH_TOL:
            raise BranchAmbiguity(potentials[i] if potentials is not None else float("nan"))
        prev = r[order[0]]
        out[i] = prev
    return out


class RayTracer:
    """Traces external rays of rational angle by pulling back along the tripling orbit.

    The ray of angle t is stored on the potential grid v_high * 3^(-i/s), i = 0, 1, ...;
    the division i in [m s, (m+1) s] of R(t) is the continuous preimage of division m-1
    of R(3t).
    """

    def __init__(self, fmap: CubicMap, v_high: float = 8.0, steps_per_division: int = 8):
        self.fmap = fmap
        self.v_high = float(v_high)
        self.s = int(steps_per_division)
        self._rays: dict[RationalAngle, list[np.ndarray]] = {}

    def potentials(self, n_div: int) -> np.ndarray:
        i = np.arange(n_div * self.s + 1)
        return self.v_high * 3.0 ** (-i / self.s)

    def _top(self, angle: RationalAngle) -> np.ndarray:
        vs = self.potentials(1)
        z = boettcher_inverse(self.fmap, angle, vs[0])
        pts = [z]
        for v in vs[1:]:
            z = boettcher_inverse(self.fmap, angle, v, guess=z)
            pts.append(z)
        return np.array(pts)

    def _ensure(self, angle: RationalAngle, n_div: int) -> None:
        orbit = [angle]
        while True:
            nxt = orbit[-1].times(3)
            if nxt in orbit:
                loop_to = orbit.index(nxt)
                break
            orbit.append(nxt)
        for t in orbit:
            if t not in self._rays:
                self._rays[t] = [self._top(t)]
        # division m of orbit[j] needs division m-1 of orbit[j+1]; periodic part must be deeper
        need = {}
        L = len(orbit)
        for j, t in enumerate(orbit):
            need[t] = n_div if j == 0 else max(need.get(t, 0), n_div - j)
        for t in orbit[loop_to:]:
            need[t] = max(need.values())
        pot = None
        while True:
            progress = False
            for j, t in enumerate(orbit):
                segs = self._rays[t]
                if len(segs) >= need[t]:
                    continue
                image = orbit[j + 1] if j + 1 < L else orbit[loop_to]
                isegs = self._rays[image]
                m = len(segs)
                if len(isegs) < m:
                    continue
                src = isegs[m - 1]
                start = segs[-1][-1]
                if pot is None or pot.size < (m + 1) * self.s + 1:
                    pot = self.potentials(m + 1 + 64)
                new = _select_continuous(self.fmap, src, start, pot[m * self.s:(m + 1) * self.s + 1])
                segs.append(new)
                progress = True
            if all(len(self._rays[t]) >= need[t] for t in orbit):
                break
            if not progress:
                raise RuntimeError("ray pull-back made no progress")

    def ray_points(self, angle, n_div: int) -> np.ndarray:
        angle = RationalAngle.of(angle)
        self._ensure(angle, n_div)
        segs = self._rays[angle][:n_div]
        return np.concatenate([segs[0]] + [s[1:] for s in segs[1:]])

    def divisions_for(self, v_low: float) -> int:
        return max(1, math.ceil(math.log(self.v_high / v_low) / math.log(3.0) - 1e-9))

    def trace(self, angle, v_low: float) -> TracedCurve:
        angle = RationalAngle.of(angle)
        n_div = self.divisions_for(v_low)
        pts = self.ray_points(angle, n_div)
        pot = self.potentials(n_div)
        return TracedCurve(ray_label(angle), pts, pot, {"angle": angle})


def trace_ray(fmap: CubicMap, angle, v_high: float = 8.0, v_low: float = 1e-4,
              steps_per_division: int = 8, tracer: RayTracer | None = None) -> TracedCurve:
    if not v_high > v_low > 0:
        raise ValueError("need v_high > v_low > 0")
    if v_low < POTENTIAL_FLOOR:
        raise ValueError("v_low below the potential floor")
    tracer = tracer or RayTracer(fmap, v_high, steps_per_division)
    return tracer.trace(angle, v_low)


# -- landing -------------------------------------------------------------------


@dataclass(frozen=True)
class LandingResult:
    point: complex
    converged: bool
    residual: float
    mode: str  # geometric | cesaro

    def to_dict(self):
        return {"point": [self.point.real, self.point.imag], "converged": self.converged,
                "residual": self.residual, "mode": self.mode}


def _mobius_limit(w0, w1, w2):
    """Limit x of a sequence with 1/(w_k - x) in arithmetic progression, from three terms.

    Exact for Moebius-parabolic orbits w_k = x + C/(k + k0); the error for a parabolic
    inverse orbit with logarithmic corrections is O(log k / k^2).
    """
    # (w1-x)(w2-x) + (w0-x)(w1-x) = 2 (w0-x)(w2-x); the x^2 terms cancel
    lin = (w0 + w2) - 2 * w1
    const = w1 * w2 + w0 * w1 - 2 * w0 * w2
    if lin == 0:
        return w2
    return -const / lin


def landing_point(fmap: CubicMap, angle, tracer: RayTracer | None = None, v_floor: float = POTENTIAL_FLOOR,
                  max_divisions: int = 6000, raise_on_failure: bool = False) -> LandingResult:
    """Landing point of a rational external ray.

    The ray is traced to the potential floor; tails that have not contracted below the
    geometric tolerance are continued by pure pull-back (the ray of a (pre)periodic angle
    is self-similar) and the limit is extrapolated from the last window (per-division
    three-term extrapolation averaged over the window).
    """
    angle = RationalAngle.of(angle)
    tracer = tracer or RayTracer(fmap)
    s = tracer.s
    n_div = tracer.divisions_for(v_floor)
    pts = tracer.ray_points(angle, n_div)
    tail = pts[-CESARO_WINDOW:]
    diam = float(np.abs(tail[:, None] - tail[None, :]).max())
    last_div = pts[-(s + 1):]
    prev_div = pts[-(2 * s + 1):-s]
    ratio = float(np.abs(last_div - last_div[-1]).max() / max(1e-300, np.abs(prev_div - prev_div[-1]).max()))
    if diam < GEOMETRIC_TOL and ratio < 0.9:
        return LandingResult(complex(pts[-1]), True, diam, "geometric")
    # slow (parabolic-type) tail: continue the self-similar pull-back and extrapolate
    best = None
    n = n_div
    while True:
        n = min(max_divisions, max(n * 2, n + 64))
        pts = tracer.ray_points(angle, n)
        res = _extrapolate(pts, s, fmap.parabolic_exponent)
        if res is not None:
            x, spread = res
            best = LandingResult(complex(x), spread < CESARO_TOL, float(spread), "cesaro")
            tail = pts[-CESARO_WINDOW:]
            diam = float(np.abs(tail[:, None] - tail[None, :]).max())
            if diam < GEOMETRIC_TOL * 1e-2:
                # tail has genuinely contracted
                return LandingResult(complex(pts[-1]), True, diam, "geometric")
            if best.converged and spread < CESARO_TOL * 1e-2:
                return best
        if n >= max_divisions:
            break
    if best is None:
        best = LandingResult(complex(pts[-1]), False, diam, "cesaro")
    if not best.converged and raise_on_failure:
        raise NotConverged(best)
    return best


def _power_limit(w0, w1, w2, p: int, steps: int = 50):
    """Limit x of a sequence with (w_k - x)^(-p) in arithmetic progression (p = 1 is Moebius)."""
    x = _mobius_limit(w0, w1, w2)
    if p == 1:
        return x
    w = np.array([w0, w1, w2])
    c = np.array([1.0, -2.0, 1.0])
    for _ in range(steps):
        d = w - x
        if np.any(d == 0):
            break
        step = np.sum(c * d**-p) / np.sum(c * p * d ** -(p + 1))
        x = x - step
        if abs(step) < 1e-16 * max(1.0, abs(x)):
            break
    return x


def _extrapolate(pts: np.ndarray, s: int, p: int = 1):
    """Window-averaged three-term extrapolation across consecutive divisions.

    p is the number of petals of the parabolic point the tail approaches; the inverse orbit
    then tends to it like n^(-1/p).
    """
    n_div = (pts.size - 1) // s
    if n_div < 8:
        return None
    est = []
    for off in range(CESARO_WINDOW):
        i2 = pts.size - 1 - off
        i1, i0 = i2 - s, i2 - 2 * s
        if i0 < 0:
            break
        est.append(_power_limit(pts[i0], pts[i1], pts[i2], p))
    est = np.array(est)
    x = est.mean()
    spread = float(np.abs(est - x).max())
    # include the distance still travelled per division as a convergence proxy
    return x, spread
