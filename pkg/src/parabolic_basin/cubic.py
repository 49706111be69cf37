"""The family f_a(z) = z + a z^2 + z^3: evaluation, preimages, orbit classes, cycles."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

HIT_ZERO_TOL = 1e-13
DEDUP_TOL = 1e-8
INDIFFERENT_BAND = 1e-8


class OrbitKind(str, Enum):
    CONVERGES_TO_PARABOLIC = "ConvergesToParabolic"
    ESCAPES_TO_INFINITY = "EscapesToInfinity"
    OTHER_BOUNDED = "OtherBounded"
    HITS_ZERO_EXACTLY = "HitsZeroExactly"


_KIND_CODES = {
    0: OrbitKind.OTHER_BOUNDED,
    1: OrbitKind.CONVERGES_TO_PARABOLIC,
    2: OrbitKind.ESCAPES_TO_INFINITY,
    3: OrbitKind.HITS_ZERO_EXACTLY,
}


@dataclass(frozen=True)
class OrbitClass:
    kind: OrbitKind
    witness_iterations: int

    def to_dict(self):
        return {"kind": self.kind.value, "witness_iterations": self.witness_iterations}


@dataclass(frozen=True)
class Cycle:
    points: tuple
    period: int
    multiplier: complex
    kind: str  # attracting | repelling | parabolic | irrationally_indifferent

    def to_dict(self):
        return {
            "points": [[z.real, z.imag] for z in self.points],
            "period": self.period,
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "kind": self.kind,
        }


def petal_height(a: complex, petal_radius: float, samples: int = 2048) -> float:
    """Height H such that {Re u > H}, u = -1/(a z), is a certified attracting petal.

    Starts from the half-plane image of the disc of radius ``petal_radius`` tangent at 0
    in the attracting direction and doubles H until the exact u-map
    u -> u / (1 - 1/u + 1/(a^2 u^2)) moves every point of the half-plane right by at
    least 1/2 (checked on the boundary circle in w = 1/u, maximum modulus principle).
    """
    a = complex(a)
    if a == 0:
        raise ValueError("petal in u-coordinates needs a != 0")
    H = 1.0 / (2.0 * abs(a) * petal_radius)
    psi = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    for _ in range(60):
        w = (1.0 + np.exp(1j * psi)) / (2.0 * H)
        w = w[np.abs(w) > 1e-300]
        den = 1.0 - w + w * w / (a * a)
        if np.all(np.abs(den) > 0.25):
            excess = np.abs((1.0 / den - 1.0 - w) / w)
            # 10% safety margin against undersampling the circle
            if excess.max() * 1.1 < 0.5:
                return H
        H *= 2.0
    raise RuntimeError("could not certify a petal")


@dataclass(frozen=True)
class CubicMap:
    """f(z) = z + a z^2 + z^3."""

    a: complex
    petal_radius: float | None = None
    c0: complex = field(init=False)
    c: complex = field(init=False)
    escape_radius: float = field(init=False)

    def __post_init__(self):
        a = complex(self.a)
        object.__setattr__(self, "a", a)
        p, q = self.raw_critical_points()
        object.__setattr__(self, "c0", p)
        object.__setattr__(self, "c", q)
        object.__setattr__(self, "escape_radius", abs(a) + 2.0)
        if self.petal_radius is None and a != 0:
            object.__setattr__(self, "petal_radius", 0.15 / abs(a))

    def with_critical_order(self, c0: complex, c: complex) -> "CubicMap":
        m = CubicMap(self.a, self.petal_radius)
        object.__setattr__(m, "c0", complex(c0))
        object.__setattr__(m, "c", complex(c))
        return m

    # -- evaluation -----------------------------------------------------------
    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        return z * (1.0 + z * (self.a + z))

    def derivative(self, z):
        return 1.0 + z * (2.0 * self.a + 3.0 * z)

    def second_derivative(self, z):
        return 2.0 * self.a + 6.0 * z

    def iterate(self, z, n: int):
        for _ in range(n):
            z = self.eval(z)
        return z

    def iterate_with_derivative(self, z, n: int):
        d = np.ones_like(z) if isinstance(z, np.ndarray) else 1.0
        for _ in range(n):
            d = d * self.derivative(z)
            z = self.eval(z)
        return z, d

    def orbit(self, z, n: int) -> list:
        out = [z]
        for _ in range(n):
            z = self.eval(z)
            out.append(z)
        return out

    def raw_critical_points(self) -> tuple[complex, complex]:
        a = self.a
        s = cmath.sqrt(a * a - 3.0)
        return (-a + s) / 3.0, (-a - s) / 3.0

    def critical_points(self) -> tuple[complex, complex]:
        return self.c0, self.c

    def beta_candidates(self) -> tuple[complex, complex]:
        """The two nonzero preimages of 0, roots of 1 + a z + z^2."""
        a = self.a
        s = cmath.sqrt(a * a - 4.0)
        return (-a + s) / 2.0, (-a - s) / 2.0

    def cocritical_point(self) -> complex:
        """The simple preimage of f(c0) other than c0."""
        return -self.a - 2.0 * self.c0

    # -- preimages ------------------------------------------------------------
    def preimages(self, w):
        """All three roots of f(z) = w, shape w.shape + (3,)."""
        return cubic_roots(self.a, np.asarray(w, dtype=complex))

    def preimage_near(self, w, guess):
        """Root of f(z) = w closest to ``guess`` (elementwise)."""
        roots = self.preimages(w)
        guess = np.asarray(guess, dtype=complex)
        idx = np.argmin(np.abs(roots - guess[..., None]), axis=-1)
        return np.take_along_axis(roots, idx[..., None], axis=-1)[..., 0]

    @property
    def parabolic_exponent(self) -> int:
        """Number of attracting petals at 0: orbits tend to 0 like n^(-1/p)."""
        return 1 if self.a != 0 else 2

    # -- petal ---------------------------------------------------------------
    @property
    def petal_u_height(self) -> float:
        cached = self.__dict__.get("_petal_h")
        if cached is None:
            cached = petal_height(self.a, self.petal_radius)
            object.__setattr__(self, "_petal_h", cached)
        return cached

    def u_coord(self, z):
        return -1.0 / (self.a * z)

    def in_petal(self, z):
        """Membership in the certified preliminary petal {Re u > H}."""
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = -1.0 / (self.a * z)
        return (np.abs(z) > 0) & (u.real > self.petal_u_height)

    # -- orbit classification -----------------------------------------------
    def classify_points(self, zs, budget: int, final: bool = False):
        """Vectorized orbit classification. Returns (kind codes, decision iterations).

        Codes: 0 OtherBounded, 1 ConvergesToParabolic, 2 EscapesToInfinity, 3 HitsZeroExactly.
        With final=True the iterate at the decision time is returned as a third array.
        """
        z = np.array(zs, dtype=complex, copy=True).ravel()
        code = np.zeros(z.shape, dtype=np.int8)
        when = np.full(z.shape, budget, dtype=np.int64)
        active = np.arange(z.size)
        R = self.escape_radius
        has_petal = self.a != 0
        H = self.petal_u_height if has_petal else None
        zz = z.copy()
        for n in range(budget + 1):
            if active.size == 0:
                break
            w = zz[active]
            aw = np.abs(w)
            esc = aw > R
            hit = aw < HIT_ZERO_TOL
            if has_petal:
                with np.errstate(divide="ignore", invalid="ignore"):
                    u = -1.0 / (self.a * w)
                pet = (~hit) & (u.real > H)
            else:
                # a = 0: two petals along +-i/sqrt(2)... use attracting directions z^2 in (-inf,0)
                pet = (~hit) & _a0_petal(w)
            done = esc | hit | pet
            code[active[esc]] = 2
            code[active[hit & ~esc]] = 3
            code[active[pet & ~esc & ~hit]] = 1
            when[active[done]] = n
            active = active[~done]
            if n < budget:
                w = zz[active]
                zz[active] = w * (1.0 + w * (self.a + w))
        if final:
            return code.reshape(np.shape(zs)), when.reshape(np.shape(zs)), zz.reshape(np.shape(zs))
        return code.reshape(np.shape(zs)), when.reshape(np.shape(zs))

    def classify_orbit(self, z: complex, budget: int) -> OrbitClass:
        if budget < 1:
            raise ValueError("budget must be >= 1")
        # scalar transcription of classify_points (same order of tests)
        z = complex(z)
        a = self.a
        R = self.escape_radius
        H = self.petal_u_height if a != 0 else None
        for n in range(budget + 1):
            az = abs(z)
            if az > R:
                return OrbitClass(OrbitKind.ESCAPES_TO_INFINITY, n)
            if az < HIT_ZERO_TOL:
                return OrbitClass(OrbitKind.HITS_ZERO_EXACTLY, n)
            if a != 0:
                if (-1.0 / (a * z)).real > H:
                    return OrbitClass(OrbitKind.CONVERGES_TO_PARABOLIC, n)
            elif (-1.0 / (2.0 * z * z)).real > 4.0:
                return OrbitClass(OrbitKind.CONVERGES_TO_PARABOLIC, n)
            if n < budget:
                z = z * (1.0 + z * (a + z))
        return OrbitClass(OrbitKind.OTHER_BOUNDED, budget)


def _a0_petal(w):
    """Certified petals of z + z^3 at 0: |z| small and z^2 inside a disc tangent to 0 along (-inf, 0)."""
    # For f(z) = z + z^3, v = -1/(2 z^2) satisfies v -> v + 1 + O(1/v); Re v > 4 is invariant.
    with np.errstate(divide="ignore", invalid="ignore"):
        v = -1.0 / (2.0 * w * w)
    return v.real > 4.0


def cubic_roots(a: complex, w: np.ndarray) -> np.ndarray:
    """Roots of z^3 + a z^2 + z - w = 0 (Cardano + two Newton polish steps), vectorized over w."""
    w = np.asarray(w, dtype=complex)
    shift = a / 3.0
    p = 1.0 - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a / 3.0 - w
    disc = np.sqrt(q * q / 4.0 + p**3 / 27.0)
    s1 = -q / 2.0 + disc
    s2 = -q / 2.0 - disc
    s = np.where(np.abs(s1) >= np.abs(s2), s1, s2)
    u = s ** (1.0 / 3.0)
    omega = np.exp(2j * np.pi / 3.0)
    us = np.stack([u, u * omega, u * omega * omega], axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ys = np.where(np.abs(us) > 0, us - p / (3.0 * us), 0.0)
    z = ys - shift
    wb = w[..., None]
    for _ in range(2):
        fz = z * (1.0 + z * (a + z)) - wb
        dz = 1.0 + z * (2.0 * a + 3.0 * z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(np.abs(dz) > 1e-12, fz / dz, 0.0)
        z = z - step
    return z


# -- one critical point in the basin -----------------------------------------------------------------


@dataclass(frozen=True)
class Assumption1Result:
    status: str  # Satisfied | Violated | Inconclusive
    reason: str
    c0: complex | None = None
    c: complex | None = None
    classes: tuple = ()

    @property
    def satisfied(self) -> bool:
        return self.status == "Satisfied"


def has_double_critical_point(a: complex) -> bool:
    # a^2 = 3 up to rounding; comparing the critical points themselves loses half the digits
    return abs(complex(a) * complex(a) - 3.0) < 1e-12


def check_assumption1(fmap: CubicMap, budget: int = 100_000) -> Assumption1Result:
    if fmap.a == 0:
        return Assumption1Result("Violated", "a=0: z^3+z symmetric case")
    p, q = fmap.raw_critical_points()
    cls = [fmap.classify_orbit(p, budget), fmap.classify_orbit(q, budget)]
    kinds = [k.kind for k in cls]
    if has_double_critical_point(fmap.a):
        return Assumption1Result("Violated", "double critical point", classes=tuple(cls))
    if OrbitKind.ESCAPES_TO_INFINITY in kinds:
        return Assumption1Result("Violated", "critical point in basin of infinity", classes=tuple(cls))
    if OrbitKind.HITS_ZERO_EXACTLY in kinds:
        return Assumption1Result("Violated", "critical orbit hits 0", classes=tuple(cls))
    if kinds.count(OrbitKind.CONVERGES_TO_PARABOLIC) == 2:
        return Assumption1Result("Violated", "both in basin", classes=tuple(cls))
    if kinds.count(OrbitKind.CONVERGES_TO_PARABOLIC) == 1:
        i = kinds.index(OrbitKind.CONVERGES_TO_PARABOLIC)
        c0, c = (p, q) if i == 0 else (q, p)
        return Assumption1Result("Satisfied", "ok", c0, c, tuple(cls))
    return Assumption1Result("Inconclusive", "no critical orbit resolved within budget", classes=tuple(cls))


# -- cycles -----------------------------------------------------------------------


def classify_multiplier(lam: complex, band: float = INDIFFERENT_BAND) -> str:
    r = abs(lam)
    if r < 1.0 - band:
        return "attracting"
    if r > 1.0 + band:
        return "repelling"
    from .renorm import rotation_is_rational

    return "parabolic" if rotation_is_rational(lam) else "irrationally_indifferent"


def _fk_and_derivative(fmap: CubicMap, z, k):
    d = np.ones_like(z)
    w = z
    for _ in range(k):
        d = d * fmap.derivative(w)
        w = fmap.eval(w)
    return w, d


def find_cycles(fmap: CubicMap, max_period: int, grid: int = 64, newton_steps: int = 200) -> tuple[list, dict]:
    """All cycles of period <= max_period found by deflated Newton seeded on a grid.

    Returns (cycles sorted by (period, lexicographic first point), completeness report).
    """
    if max_period > 6:
        raise ValueError("max_period <= 6")
    R = fmap.escape_radius
    xs = np.linspace(-R, R, grid)
    seeds = (xs[None, :] + 1j * xs[:, None]).ravel()
    mult0 = 3 if fmap.a == 0 else 2
    points: list[complex] = [0j]
    for k in range(1, max_period + 1):
        z = seeds.copy()
        ok = np.ones(z.shape, dtype=bool)
        with np.errstate(all="ignore"):
            for _ in range(newton_steps):
                w, d = _fk_and_derivative(fmap, z, k)
                F = w - z
                dF = d - 1.0
                # deflate the multiple root at 0
                step = 1.0 / (dF / F - mult0 / z)
                step = np.where(np.isfinite(step), step, 0.0)
                z = z - step
                ok &= np.isfinite(z) & (np.abs(z) < 10 * R)
                z = np.where(ok, z, 0.0)
            w, _ = _fk_and_derivative(fmap, z, k)
            res = np.abs(w - z)
        good = z[ok & (res < 1e-9 * np.maximum(1.0, np.abs(z))) & (np.abs(z) > 1e-6)]
        for p in sorted(good.tolist(), key=lambda c: (c.real, c.imag)):
            if all(abs(p - q) >= DEDUP_TOL for q in points):
                points.append(p)
    # group into cycles
    cycles = []
    used = [False] * len(points)
    for i, p in enumerate(points):
        if used[i]:
            continue
        orbit = [p]
        used[i] = True
        w = p
        for _ in range(max_period):
            w = fmap.eval(w)
            if abs(w - p) < 1e-7 * max(1.0, abs(p)):
                break
            orbit.append(w)
            for j, q in enumerate(points):
                if not used[j] and abs(q - w) < 1e-6:
                    used[j] = True
        else:
            continue
        period = len(orbit)
        lam = complex(np.prod([fmap.derivative(x) for x in orbit]))
        if p == 0:
            lam = 1.0 + 0j
            kind = "parabolic"
        else:
            kind = classify_multiplier(lam)
        start = min(orbit, key=lambda c: (c.real, c.imag))
        j = orbit.index(start)
        orbit = orbit[j:] + orbit[:j]
        cycles.append(Cycle(tuple(complex(x) for x in orbit), period, lam, kind))
    cycles.sort(key=lambda c: (c.period, c.points[0].real, c.points[0].imag))
    expected = {k: 3**k for k in range(1, max_period + 1)}
    found = {}
    for k in range(1, max_period + 1):
        # count with multiplicity: the parabolic point counts mult0 times for every k
        n = sum(c.period for c in cycles if k % c.period == 0 and c.points[0] != 0)
        found[k] = n + mult0
    return cycles, {"expected_with_multiplicity": expected, "found_with_multiplicity": found}
