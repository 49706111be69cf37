"""Attracting Fatou coordinate at the parabolic point 0.

In u = -1/(a z) the map reads u -> u / P(1/u) with P(w) = 1 - w + w^2/a^2, i.e.
u -> u + 1 + kappa/u + O(u^-2) with kappa = 1 - 1/a^2. The coordinate is evaluated as

    phi(u) = u - kappa log u + sum_j b_j u^-j

at the first iterate with |u| above the truncation radius, minus the number of steps
taken. The b_j solve the Abel equation order by order (``series_coefficients``).
For a = 0 the same machinery runs in v = -1/(2 z^2), where v -> v / (1 - 1/(2v))^2.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .cubic import CubicMap, petal_height
from .curves import TracedCurve

SERIES_ORDER = 12
SERIES_TOL = 1e-15
MIN_RADIUS = 64.0
ITER_BUDGET = 100_000
NEWTON_TOL = 1e-12
NEWTON_STEPS = 40


class NotInPetalReach(ValueError):
    pass


class NotInBasin(ValueError):
    pass


class NewtonDivergence(RuntimeError):
    pass


def series_coefficients(P, order: int):
    """kappa and b_1..b_order for phi(u) = u - kappa log u + sum b_j u^-j.

    ``P`` holds the coefficients of P(w) (P[0] = 1, P[1] = -1), where the map is
    u -> u / P(1/u). Writing w = 1/u, the Abel equation phi(U(u)) = phi(u) + 1 becomes

        D(w) - kappa L(w) + sum_j b_j w^j (P(w)^j - 1) = 0,

    with D the coefficients of u/P(w) - u - 1 and L = -log P. The w^(m+1) coefficient
    is linear in b_m with factor -m, which gives the recursion.
    """
    K = order + 3
    Pk = np.zeros(K, dtype=complex)
    Pk[: len(P)] = P
    g = np.zeros(K, dtype=complex)
    g[0] = 1.0
    for n in range(1, K):
        g[n] = -np.dot(Pk[1 : n + 1], g[n - 1 :: -1][:n])
    x = -Pk.copy()
    x[0] = 0.0
    L = np.zeros(K, dtype=complex)
    xp = np.zeros(K, dtype=complex)
    xp[0] = 1.0
    for k in range(1, K):
        xp = np.convolve(xp, x)[:K]
        L += xp / k
    kappa = g[2]
    D = np.zeros(K, dtype=complex)
    D[1 : K - 1] = g[2:K]
    powers = [None]
    cur = np.zeros(K, dtype=complex)
    cur[0] = 1.0
    for j in range(1, order + 1):
        cur = np.convolve(cur, Pk)[:K]
        pj = cur.copy()
        pj[0] -= 1.0
        powers.append(pj)
    b = np.zeros(order + 1, dtype=complex)
    for m in range(1, order + 1):
        tot = D[m + 1] - kappa * L[m + 1]
        for j in range(1, m):
            tot += b[j] * powers[j][m + 1 - j]
        b[m] = tot / m
    return complex(kappa), b[1:]


def truncation_radius(b: np.ndarray, tol: float = SERIES_TOL) -> float:
    """Radius past which the first omitted term is below ``tol`` (estimated from the growth of b_j)."""
    order = len(b)
    growth = max(abs(bj) ** (1.0 / (j + 1)) for j, bj in enumerate(b) if bj != 0) if np.any(b) else 1.0
    # next coefficient ~ growth^(order+1); require growth^(order+1) R^-(order+1) < tol
    r = growth * tol ** (-1.0 / (order + 1))
    return float(max(MIN_RADIUS, 4.0 * growth, r))


@dataclass(frozen=True)
class FatouChart:
    """Normalized Fatou coordinate of the parabolic basin containing f(c0).

    ``truncation`` is the number of series terms; ``radius`` the |u| past which the series
    is applied. ``sign`` picks the petal (+i or -i direction) when a = 0.
    """

    fmap: CubicMap
    truncation: int = SERIES_ORDER
    sign: int = 1
    a: complex = field(init=False)
    kappa: complex = field(init=False)
    coefficients: tuple = field(init=False, repr=False)
    radius: float = field(init=False)
    petal_threshold: float = field(init=False)
    petal_height: float = field(init=False)
    normalization_shift: complex = field(init=False)

    def __post_init__(self):
        a = self.fmap.a
        object.__setattr__(self, "a", a)
        if a != 0:
            P = [1.0, -1.0, 1.0 / (a * a)]
            thr = self.fmap.petal_radius
            H = petal_height(a, thr)
        else:
            P = [1.0, -1.0, 0.25]
            thr = 1.0 / math.sqrt(8.0)
            H = 4.0
        kappa, b = series_coefficients(P, self.truncation)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "coefficients", tuple(complex(x) for x in b))
        object.__setattr__(self, "radius", truncation_radius(b))
        object.__setattr__(self, "petal_threshold", float(thr))
        object.__setattr__(self, "petal_height", float(H))
        object.__setattr__(self, "_P2", complex(P[2]))
        object.__setattr__(self, "normalization_shift", 0j)
        object.__setattr__(self, "normalization_shift", self.calibrate())

    # -- coordinates ----------------------------------------------------------
    def to_u(self, z):
        if self.a != 0:
            return -1.0 / (self.a * z)
        return -1.0 / (2.0 * z * z)

    def from_u(self, u):
        if self.a != 0:
            return -1.0 / (self.a * u)
        return self.sign * 1j / np.sqrt(2.0 * u)

    def _in_petal_u(self, z, u):
        ok = u.real > self.petal_height
        if self.a == 0:
            ok = ok & ((z * (-1j * self.sign)).real > 0)
        return ok

    def u_step(self, u):
        w = 1.0 / u
        return u / (1.0 - w + self._P2 * w * w)

    def u_step_derivative(self, u):
        w = 1.0 / u
        P = 1.0 - w + self._P2 * w * w
        dP = -1.0 + 2.0 * self._P2 * w
        return 1.0 / P + dP / (u * P * P)

    def series(self, u):
        """(phi(u), phi'(u)) for |u| past the truncation radius, without normalization."""
        w = 1.0 / u
        s = 0.0
        ds = 0.0
        for j in range(len(self.coefficients), 0, -1):
            bj = self.coefficients[j - 1]
            s = (s + bj) * w
            ds = (ds + j * bj) * w
        return u - self.kappa * np.log(u) + s, 1.0 - self.kappa * w - ds * w

    def calibrate(self) -> complex:
        """Shift making phi(f(c0)) = 1."""
        v = self._raw(np.array([self.fmap.eval(self.fmap.c0)]))[0][0]
        if not np.isfinite(v[0]):
            raise NotInBasin("f(c0) does not reach the petal")
        return complex(1.0 - v[0])

    # -- vectorized evaluation ----------------------------------------------
    def _raw(self, zs, budget: int = ITER_BUDGET, derivative: bool = False):
        """Unnormalized phi(f^n z) - n and d/dz, NaN where the orbit does not reach the petal.

        Returns array of shape (N, 2) [value, derivative] and the entry iteration n.
        """
        zs = np.asarray(zs, dtype=complex).ravel()
        out = np.full((zs.size, 2), np.nan + 0j, dtype=complex)
        entry = np.full(zs.size, -1, dtype=np.int64)
        z = zs.copy()
        dz = np.ones(zs.size, dtype=complex)
        idx = np.arange(zs.size)
        R = self.fmap.escape_radius
        fm = self.fmap
        u_idx = np.empty(0, dtype=np.int64)
        u = np.empty(0, dtype=complex)
        du = np.empty(0, dtype=complex)
        steps = np.empty(0, dtype=np.int64)
        n = 0
        # z stage: iterate until the certified petal is reached
        while idx.size and n <= budget:
            zi = z[idx]
            with np.errstate(divide="ignore", invalid="ignore"):
                ui = self.to_u(zi)
            pet = (np.abs(zi) > 0) & self._in_petal_u(zi, ui)
            if pet.any():
                sel = idx[pet]
                entry[sel] = n
                u_idx = np.concatenate([u_idx, sel])
                u = np.concatenate([u, ui[pet]])
                if self.a != 0:
                    jac = 1.0 / (self.a * zi[pet] ** 2)
                else:
                    jac = 1.0 / zi[pet] ** 3
                du = np.concatenate([du, dz[sel] * jac])
                steps = np.concatenate([steps, np.full(sel.size, n)])
            keep = ~pet & (np.abs(zi) <= R)
            idx = idx[keep]
            if idx.size == 0:
                break
            w = z[idx]
            dz[idx] = dz[idx] * fm.derivative(w)
            z[idx] = fm.eval(w)
            n += 1
        # u stage: push out past the truncation radius
        active = np.arange(u_idx.size)
        for _ in range(int(4 * self.radius) + 1000):
            far = np.abs(u[active]) >= self.radius
            active = active[~far]
            if active.size == 0:
                break
            ua = u[active]
            du[active] = du[active] * self.u_step_derivative(ua)
            u[active] = self.u_step(ua)
            steps[active] += 1
        if u_idx.size:
            val, dval = self.series(u)
            out[u_idx, 0] = val - steps
            out[u_idx, 1] = dval * du
        return out, entry

    # -- public scalar API -----------------------------------------------------
    def extended(self, z: complex, budget: int = ITER_BUDGET) -> tuple[complex, complex]:
        """(phi_bar(z), phi_bar'(z)) for z in the basin (scalar path of ``_raw``)."""
        z = complex(z)
        a = self.a
        R = self.fmap.escape_radius
        H = self.petal_height
        dz = 1.0 + 0j
        n = 0
        while True:
            if z != 0:
                u = self.to_u(z)
                if u.real > H and (a != 0 or (z * (-1j * self.sign)).real > 0):
                    break
            if abs(z) > R or n >= budget:
                raise NotInBasin(f"orbit of {z} does not reach the petal within {budget} steps")
            dz *= 1.0 + z * (2.0 * a + 3.0 * z)
            z = z * (1.0 + z * (a + z))
            n += 1
        du = dz / (a * z * z) if a != 0 else dz / (z * z * z)
        P2 = self._P2
        rad = self.radius
        while abs(u) < rad:
            w = 1.0 / u
            P = 1.0 - w + P2 * w * w
            du *= 1.0 / P + (-1.0 + 2.0 * P2 * w) / (u * P * P)
            u = u / P
            n += 1
        w = 1.0 / u
        s = ds = 0j
        for j in range(len(self.coefficients), 0, -1):
            bj = self.coefficients[j - 1]
            s = (s + bj) * w
            ds = (ds + j * bj) * w
        val = u - self.kappa * cmath.log(u) + s - n
        return val + self.normalization_shift, (1.0 - self.kappa * w - ds * w) * du

    def evaluate(self, zs, budget: int = ITER_BUDGET) -> np.ndarray:
        """Vectorized phi_bar; NaN off the basin."""
        out, _ = self._raw(zs, budget)
        return (out[:, 0] + self.normalization_shift).reshape(np.shape(zs))

    def in_petal(self, zs):
        zs = np.asarray(zs, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = self.to_u(zs)
        return (np.abs(zs) > 0) & self._in_petal_u(zs, u)


# -- module-level operations ------------------------------------------------------


def fatou_coord(chart: FatouChart, z: complex, budget: int = ITER_BUDGET) -> complex:
    try:
        return chart.extended(z, budget)[0]
    except NotInBasin as exc:
        raise NotInPetalReach(str(exc)) from None


def extended_fatou(chart: FatouChart, z: complex, budget: int = ITER_BUDGET) -> complex:
    return chart.extended(z, budget)[0]


def petal_contains(chart: FatouChart, z: complex) -> bool:
    """Membership in Omega = phi^-1(Re > 1): the component of {Re phi_bar > 1} meeting the petal.

    A point with Re phi_bar > 1 lies in Omega iff the inverse chart started far inside the
    petal and continued back to phi_bar(z) returns z itself.
    """
    try:
        s = extended_fatou(chart, z)
    except NotInBasin:
        return False
    if not s.real > 1.0:
        return False
    try:
        w = inverse_fatou(chart, s)
    except NewtonDivergence:
        return False
    return abs(w - z) < 1e-7 * max(1.0, abs(z))


def _newton(chart: FatouChart, target: complex, z: complex, tol: float = NEWTON_TOL) -> complex:
    for _ in range(NEWTON_STEPS):
        try:
            v, d = chart.extended(z, budget=20_000)
        except NotInBasin:
            raise NewtonDivergence(f"left the basin while solving phi = {target}") from None
        if d == 0:
            raise NewtonDivergence("zero derivative")
        step = (v - target) / d
        # damp large steps, the coordinate is only locally injective
        lim = 0.25 * max(abs(z), 1e-12)
        if abs(step) > lim:
            step *= lim / abs(step)
        z = z - step
        if abs(v - target) < tol * max(1.0, abs(target)):
            return z
    raise NewtonDivergence(f"no convergence solving phi = {target}")


def _series_inverse(chart: FatouChart, s: complex) -> complex:
    """u with phi(u) + shift = s, for |u| past the truncation radius."""
    t = s - chart.normalization_shift
    u = t + chart.kappa * cmath.log(t)
    for _ in range(50):
        v, d = chart.series(u)
        du = (v - t) / d
        u -= du
        if abs(du) < 1e-15 * abs(u):
            break
    return u


def inverse_fatou(chart: FatouChart, s: complex, step: float = 0.25) -> complex:
    """The point of Omega (or its closure) with phi = s, for Re s >= 1.

    Solved far out with the series, pulled back in u-coordinates while the certified petal
    allows, then continued along the horizontal path to s by Newton on phi_bar.
    """
    H = chart.petal_height
    n = int(math.ceil(2.0 * chart.radius + abs(s))) + 8
    u = _series_inverse(chart, s + n)
    while n > 0:
        # inverse of u -> U(u), unique near u - 1 inside the petal
        w = u - 1.0
        for _ in range(30):
            dw = (chart.u_step(w) - u) / chart.u_step_derivative(w)
            w -= dw
            if abs(dw) < 1e-15 * abs(w):
                break
        if w.real < H + 1.0:
            break
        u = w
        n -= 1
    z = complex(chart.from_u(u))
    if n == 0:
        return z
    m = max(1, int(math.ceil(n / step)))
    for i in range(1, m + 1):
        z = _newton(chart, s + n * (1.0 - i / m), z)
    return z


def _t_samples(t_range, n_samples: int, spacing: str) -> np.ndarray:
    t0, t1 = t_range
    if spacing == "uniform":
        return np.linspace(t0, t1, n_samples)
    if spacing == "sinh":
        # dense near 0, reaching |t| ~ 1e3 and beyond with few samples
        lo, hi = np.arcsinh(t0), np.arcsinh(t1)
        return np.sinh(np.linspace(lo, hi, n_samples))
    raise ValueError(f"unknown spacing {spacing!r}")


def _continue_line(chart: FatouChart, level: float, ts: np.ndarray, z0: complex):
    """Newton continuation of phi_bar = level + i t from z0 (a solution at ts[0]). Splits on failure."""
    pieces, cur, cur_t = [], [z0], [ts[0]]
    z = z0
    t_prev = ts[0]
    for t in ts[1:]:
        try:
            z = _substep(chart, level, t_prev, t, z)
            cur.append(z)
            cur_t.append(t)
        except NewtonDivergence:
            if len(cur) >= 2:
                pieces.append((np.array(cur), np.array(cur_t)))
            cur, cur_t = [], []
            try:
                z = inverse_fatou(chart, complex(level, t)) if level >= 1 else z
                cur, cur_t = [z], [t]
            except NewtonDivergence:
                pass
        t_prev = t
    if len(cur) >= 2:
        pieces.append((np.array(cur), np.array(cur_t)))
    return pieces


def _substep(chart, level, t0, t1, z, depth=0):
    try:
        return _newton(chart, complex(level, t1), z)
    except NewtonDivergence:
        if depth > 12:
            raise
        tm = 0.5 * (t0 + t1)
        z = _substep(chart, level, t0, tm, z, depth + 1)
        return _substep(chart, level, tm, t1, z, depth + 1)


def line_E0(chart: FatouChart, k: int, t_range=(-5.0, 5.0), n_samples: int = 201,
            spacing: str = "uniform") -> TracedCurve:
    """The line phi_bar = k + it.

    k >= 1: the curve in the closure of Omega (continued from the real axis). k = 0: the loop
    of phi_bar^-1(it) through c0 whose ends go to 0. k < 0: pull-back of the k+1 line along
    the inverse branch fixing 0.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    ts = _t_samples(t_range, n_samples, spacing)
    label = f"LineE0({k})"
    if k >= 1:
        pts, par = _line_from_real(chart, float(k), ts)
        return TracedCurve(label, pts, par, {"level": k})
    arcs = e0_figure_eight(chart, ts)
    curve = arcs["to_zero"]
    curve = TracedCurve(label if k == 0 else "LineE0(0)", curve.points, curve.params, {"level": 0})
    for level in range(-1, k - 1, -1):
        curve = _pull_back_fixing_zero(chart, curve, level)
    return curve


def _line_from_real(chart: FatouChart, level: float, ts: np.ndarray):
    # start on the real axis of the chart (where the line meets the orbit of c0), split both ways
    i0 = int(np.argmin(np.abs(ts)))
    z_start = inverse_fatou(chart, complex(level, ts[i0]))
    fwd = _continue_line(chart, level, ts[i0:], z_start)
    bwd = _continue_line(chart, level, ts[i0::-1], z_start)
    if len(fwd) != 1 or len(bwd) != 1:
        raise NewtonDivergence(f"line at level {level} split into pieces")
    pts = np.concatenate([bwd[0][0][::-1], fwd[0][0][1:]])
    par = np.concatenate([bwd[0][1][::-1], fwd[0][1][1:]])
    return pts, par


def e0_figure_eight(chart: FatouChart, ts: np.ndarray | None = None) -> dict:
    """The four arcs of phi_bar^-1(i R) leaving the critical point c0.

    Near c0, phi_bar(z) ~ q (z - c0)^2 with q = phi'(f(c0)) f''(c0) / 2, so each half-line
    t > 0, t < 0 has two preimage arcs starting at +-sqrt(i t / q). Returns a dict with
    keys 'to_zero' (the loop through 0, as one curve from one end at 0 through c0 to the
    other) and 'other' (the complementary loop), plus the four raw arcs under 'arcs'.
    """
    fm = chart.fmap
    c0 = fm.c0
    if ts is None:
        ts = np.sinh(np.linspace(0.0, np.arcsinh(1e4), 400))
    pos = np.abs(ts[ts > 0])
    # phi_bar - phi_bar(c0) is quadratic at c0: geometric heights keep the arc steps even
    pos = np.unique(np.concatenate([np.geomspace(1e-8, pos[0], 40), pos]))
    _, d1 = chart.extended(fm.eval(c0))
    q = d1 * fm.second_derivative(c0) / 2.0
    arcs = []
    for sgn in (1.0, -1.0):
        for root in (1.0, -1.0):
            t0 = pos[0]
            z0 = c0 + root * cmath.sqrt(1j * sgn * t0 / q)
            z0 = _newton(chart, complex(0.0, sgn * t0), z0)
            pieces = _continue_line(chart, 0.0, sgn * pos, z0)
            pts = np.concatenate([[c0], pieces[0][0]])
            par = np.concatenate([[0.0], pieces[0][1]])
            arcs.append(TracedCurve("LineE0(0)", pts, par, {"level": 0, "sign": sgn}))
    ends = np.array([abs(c.points[-1]) for c in arcs])
    zero_pos = [i for i in (0, 1) if ends[i] == min(ends[0], ends[1])][0]
    zero_neg = [i for i in (2, 3) if ends[i] == min(ends[2], ends[3])][0]
    A, B = arcs[zero_neg], arcs[zero_pos]
    to_zero = TracedCurve("LineE0(0)", np.concatenate([A.points[::-1], B.points[1:]]),
                          np.concatenate([A.params[::-1], B.params[1:]]), {"level": 0})
    oa, ob = arcs[5 - zero_neg], arcs[1 - zero_pos]
    other = TracedCurve("LineE0(0)", np.concatenate([oa.points[::-1], ob.points[1:]]),
                        np.concatenate([oa.params[::-1], ob.params[1:]]), {"level": 0})
    return {"to_zero": to_zero, "other": other, "arcs": arcs}


def _pull_back_fixing_zero(chart: FatouChart, curve: TracedCurve, level: int) -> TracedCurve:
    # the branch fixing 0 is near the identity close to 0: start at the end nearest 0
    pts = curve.points
    order = np.argsort([abs(pts[0]), abs(pts[-1])])
    seq = pts if order[0] == 0 else pts[::-1]
    f = chart.fmap
    out = [complex(seq[0]) if seq[0] == 0 else complex(f.preimage_near(np.array([seq[0]]), np.array([seq[0]]))[0])]
    for w in seq[1:]:
        out.append(complex(chart.fmap.preimage_near(np.array([w]), np.array([out[-1]]))[0]))
    out = np.array(out)
    if order[0] != 0:
        out = out[::-1]
    return TracedCurve(f"LineE0({level})", out, curve.params.copy(), {"level": level})
