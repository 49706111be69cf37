"""Parameter scans: the single-critical-point status of every cell of a grid of parameters a."""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .boettcher import RayTracer, landing_point
from .cubic import HIT_ZERO_TOL, CubicMap, OrbitKind, check_assumption1, has_double_critical_point

KIND_NAMES = {0: OrbitKind.OTHER_BOUNDED.value, 1: OrbitKind.CONVERGES_TO_PARABOLIC.value,
              2: OrbitKind.ESCAPES_TO_INFINITY.value, 3: OrbitKind.HITS_ZERO_EXACTLY.value}


@dataclass(frozen=True)
class GridSpec:
    re_min: float = -2.0
    re_max: float = 2.0
    im_min: float = -2.0
    im_max: float = 2.0
    n_re: int = 41
    n_im: int = 41

    def __post_init__(self):
        if self.n_re < 1 or self.n_im < 1:
            raise ValueError("grid must have at least one cell per axis")

    def values(self) -> np.ndarray:
        # integer steps keep grid values exact multiples (0.1 for the default grid)
        def axis(lo, hi, n):
            if n == 1:
                return np.array([lo])
            return np.array([round(lo + (hi - lo) * i / (n - 1), 12) for i in range(n)])

        re = axis(self.re_min, self.re_max, self.n_re)
        im = axis(self.im_min, self.im_max, self.n_im)
        return (re[None, :] + 1j * im[:, None]).ravel()


def classify_critical_orbits(avals, budget: int) -> tuple[np.ndarray, np.ndarray]:
    """Kind codes of both critical orbits for many parameters at once.

    Same tests, in the same order, as CubicMap.classify_orbit; returns (codes, iterations) of
    shape (n, 2), columns in the order of CubicMap.raw_critical_points.
    """
    avals = np.asarray(avals, dtype=complex).ravel()
    n = avals.size
    a2 = np.repeat(avals, 2)
    z = np.empty(2 * n, dtype=complex)
    H = np.full(2 * n, np.inf)
    for i, a in enumerate(avals):
        m = CubicMap(a)
        z[2 * i], z[2 * i + 1] = m.raw_critical_points()
        if a != 0:
            H[2 * i] = H[2 * i + 1] = m.petal_u_height
    R = np.abs(a2) + 2.0
    code = np.zeros(2 * n, dtype=np.int8)
    when = np.full(2 * n, budget, dtype=np.int64)
    active = np.arange(2 * n)
    for it in range(budget + 1):
        if active.size == 0:
            break
        w = z[active]
        a = a2[active]
        aw = np.abs(w)
        esc = aw > R[active]
        hit = ~esc & (aw < HIT_ZERO_TOL)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.where(a != 0, -1.0 / (a * w), 0)
            v = -1.0 / (2.0 * w * w)
        pet = ~esc & ~hit & np.where(a != 0, u.real > H[active], v.real > 4.0)
        code[active[esc]] = 2
        code[active[hit]] = 3
        code[active[pet]] = 1
        done = esc | hit | pet
        when[active[done]] = it
        active = active[~done]
        if it < budget:
            w = z[active]
            z[active] = w * (1.0 + w * (a2[active] + w))
    return code.reshape(n, 2), when.reshape(n, 2)


def assumption_status(a: complex, codes) -> tuple[str, str]:
    """The decision of check_assumption1 from the two kind codes."""
    if a == 0:
        return "Violated", "a=0: z^3+z symmetric case"
    kinds = list(codes)
    if has_double_critical_point(a):
        return "Violated", "double critical point"
    if 2 in kinds:
        return "Violated", "critical point in basin of infinity"
    if 3 in kinds:
        return "Violated", "critical orbit hits 0"
    if kinds.count(1) == 2:
        return "Violated", "both in basin"
    if kinds.count(1) == 1:
        return "Satisfied", "ok"
    return "Inconclusive", "no critical orbit resolved within budget"


@dataclass(frozen=True)
class ScanRow:
    a: complex
    status: str
    reason: str
    kind_p: str
    kind_q: str
    landing_residual: float | None = None

    def cells(self) -> list:
        res = "" if self.landing_residual is None else f"{self.landing_residual:.3e}"
        return [f"{self.a.real:.12g}", f"{self.a.imag:.12g}", self.status, self.reason, self.kind_p,
                self.kind_q, res]


HEADER = ["re_a", "im_a", "status", "reason", "kind_p", "kind_q", "landing_residual_R0"]


def scan(grid: GridSpec, budget: int = 100_000, landing: bool = True, landing_floor: float = 1e-6) -> list:
    avals = grid.values()
    codes, _ = classify_critical_orbits(avals, budget)
    rows = []
    for a, cc in zip(avals, codes):
        status, reason = assumption_status(complex(a), cc)
        res = None
        if landing and status == "Satisfied":
            try:
                lp = landing_point(CubicMap(complex(a)), 0, RayTracer(CubicMap(complex(a))), v_floor=landing_floor,
                                   max_divisions=400)
                res = abs(lp.point)
            except Exception:  # a failed landing is recorded, the scan goes on
                res = float("nan")
        rows.append(ScanRow(complex(a), status, reason, KIND_NAMES[int(cc[0])], KIND_NAMES[int(cc[1])], res))
    return rows


def write_table(rows, fh, delimiter: str = "\t") -> None:
    fh.write(delimiter.join(HEADER) + "\n")
    for r in rows:
        fh.write(delimiter.join(r.cells()) + "\n")


def table_text(rows) -> str:
    buf = io.StringIO()
    write_table(rows, buf)
    return buf.getvalue()


def certified(a: complex, budget: int = 100_000) -> bool:
    """Is a a Satisfied cell (same decision as check_assumption1)?"""
    return check_assumption1(CubicMap(a), budget).satisfied
