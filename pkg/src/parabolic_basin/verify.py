"""Invariant suites run against one parameter; each item reports a measured value against its tolerance.

Suites that need a single critical point in the basin are gated on that condition: when the
gate fails they are listed with status ``gated`` and not run.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig, restore

PASS, FAIL, GATED, GATE = "pass", "FAIL", "gated", "gate"


@dataclass(frozen=True)
class Item:
    suite: str
    name: str
    status: str
    measured: float | None = None
    tolerance: float | None = None
    note: str = ""

    def line(self) -> str:
        m = "-" if self.measured is None else f"{self.measured:.3e}"
        t = "-" if self.tolerance is None else f"{self.tolerance:.1e}"
        note = f"  ({self.note})" if self.note else ""
        return f"{self.status:5s} {self.suite}.{self.name}  measured={m} tol={t}{note}"


@dataclass
class VerifyReport:
    config: RunConfig
    items: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(i.status != FAIL for i in self.items)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_text(self) -> str:
        lines = ["# effective configuration"]
        lines += self.config.to_text().splitlines()
        lines.append("# invariants")
        lines += [i.line() for i in self.items]
        n_fail = sum(i.status == FAIL for i in self.items)
        lines.append(f"# result: {'ok' if self.ok else 'failed'} ({n_fail} failing, {len(self.items)} items)")
        return "\n".join(lines) + "\n"


def _check(suite, name, measured, tol, cond=None, note="") -> Item:
    ok = (measured < tol) if cond is None else cond
    return Item(suite, name, PASS if ok else FAIL, float(measured), tol, note)


# -- suites that need no assumption ------------------------------------------------


def suite_angles(max_den: int = 63) -> list:
    from fractions import Fraction

    from .angles import RationalAngle, theta_pm

    bad = 0
    for q in range(1, max_den + 1):
        for p in range(q):
            if np.gcd(p, q) != 1:
                continue
            t = RationalAngle(p, q)
            for m in (2, 3):
                seen, x = [], Fraction(p, q)
                while x not in seen:
                    seen.append(x)
                    x = (m * x) % 1
                pre = seen.index(x)
                if t.orbit_period(m) != (pre, len(seen) - pre):
                    bad += 1
                x, ref = Fraction(p, q), []
                for _ in range(12):
                    x *= m
                    ref.append(int(x))
                    x -= int(x)
                if t.base_digits(m, 12) != ref:
                    bad += 1
    for k in range(2, 12):
        if theta_pm(k, "+").fraction != Fraction(1, 2**k - 1) or theta_pm(k, "-").fraction != Fraction(2**k - 2, 2**k - 1):
            bad += 1
    return [_check("angles", f"oracle_den_le_{max_den}", bad, 0.5, note="mismatch count")]


def suite_brjuno() -> list:
    from .renorm import brjuno_partial, fast_growth_rule, golden_mean

    g = brjuno_partial(golden_mean(), 20)
    # the synthetic sum grows by log 2 per term, so the 1e3 threshold needs N ~ 1450
    fast = brjuno_partial(rule=fast_growth_rule, N=2000)
    return [
        _check("renorm", "golden_partial_sum", g.partial_sums[-1], 5.0,
               cond=g.partial_sums[-1] < 5.0 and g.verdict == "likely_brjuno", note=g.verdict),
        Item("renorm", "fast_growth_verdict", PASS if fast.verdict == "likely_not_brjuno" else FAIL, note=fast.verdict),
    ]


def suite_boettcher(fmap, rng, n: int = 1000) -> list:
    from .boettcher import green_array

    R = fmap.escape_radius
    r = R * (1.0 + 3.0 * rng.random(n))
    z = r * np.exp(2j * np.pi * rng.random(n))
    G, _ = green_array(fmap, z)
    Gf, _ = green_array(fmap, fmap.eval(z))
    err = float(np.max(np.abs(Gf - 3 * G)))
    return [_check("boettcher", "functional_equation", err, 1e-9)]


# -- gated suites -------------------------------------------------------------------


def suite_fatou(partition, rng, n: int = 1000) -> list:
    chart, f = partition.chart, partition.fmap
    H = chart.petal_height
    u = (H + 1.0 + 40.0 * rng.random(n)) + 1j * (80.0 * rng.random(n) - 40.0)
    z = np.array([chart.from_u(x) for x in u])
    err = float(np.max(np.abs(chart.evaluate(f.eval(z)) - chart.evaluate(z) - 1.0)))
    crit = abs(chart.extended(f.eval(f.c0))[0] - 1.0)
    return [_check("fatou", "abel_equation", err, 1e-8), _check("fatou", "phi_f_c0_equals_1", crit, 1e-8)]


def suite_landing(partition) -> list:
    from .boettcher import landing_point
    from .itinerary import u_n_diagnostic

    f = partition.fmap
    l0 = landing_point(f, 0, partition.tracer)
    items = [_check("boettcher", "ray_0_lands_at_0", abs(l0.point), 1e-4)]
    d = u_n_diagnostic(partition)
    if d.verdict == "XNontrivial":
        items.append(_check("itinerary", "half_ray_lands_at_0", abs(d.half_ray_landing), 1e-4, note=d.verdict))
    else:
        items.append(Item("itinerary", "u_n_verdict", PASS if d.verdict == "XIsPoint" else FAIL, note=d.verdict))
    return items


def suite_itinerary(partition, depth: int = 8) -> list:
    from .itinerary import jordan_certificate

    cert = jordan_certificate(partition, depth)
    return [
        _check("itinerary", f"equivariance_depth_{depth}", cert.equivariance_error, 1e-5),
        _check("itinerary", "injectivity_min_gap", cert.min_gap, 0.0, cond=cert.min_gap > 0),
        Item("itinerary", "cyclic_order", PASS if cert.order_ok else FAIL, note=cert.orientation),
    ]


def suite_accesses(partition, ks=(2, 3)) -> list:
    from .accesses import build_access, check_simple, y_order_matches
    from .itinerary import theta_of

    f = partition.fmap
    items = []
    for k in ks:
        for s in ("+", "-"):
            tag = f"k{k}{'p' if s == '+' else 'm'}"
            try:
                acc = build_access(partition, k, s)
            except Exception as exc:
                items.append(Item("accesses", f"build_{tag}", FAIL, note=f"{type(exc).__name__}: {exc}"))
                continue
            x = acc.landing.point
            res = abs(f.iterate(x, k) - x)
            th = theta_of(partition, x, 2 * k)
            simple = check_simple(partition, acc)
            items += [
                _check("accesses", f"periodic_{tag}", res, 1e-5),
                Item("accesses", f"theta_{tag}", PASS if th.exact and th.value == acc.angle else FAIL, note=str(th)),
                Item("accesses", f"y_order_{tag}", PASS if y_order_matches(acc) else FAIL),
                _check("accesses", f"simple_{tag}", simple["self_intersections"] + simple["iterate_crossings"],
                       0.5, note="crossing count"),
            ]
    return items


def suite_puzzles(partition, k: int = 3) -> list:
    from .puzzles import MARGIN_TOL, build_graph, check_containment, step_one_piece, zero_piece

    items = []
    for s in ("+", "-"):
        tag = f"k{k}{'p' if s == '+' else 'm'}"
        try:
            g = build_graph(partition, k, s)
            c = check_containment(zero_piece(g), step_one_piece(g), MARGIN_TOL)
        except Exception as exc:
            items.append(Item("puzzles", f"annulus_{tag}", FAIL, note=f"{type(exc).__name__}: {exc}"))
            continue
        items.append(_check("puzzles", f"annulus_{tag}", c.margin, MARGIN_TOL,
                            cond=c.kind == "CompactlyContained" and c.margin > MARGIN_TOL, note=c.kind))
    return items


GATED_SUITES = ("fatou", "landing", "itinerary", "accesses", "puzzles")


def run_verify(config: RunConfig, quick: bool = False) -> VerifyReport:
    """Run every suite against config.a with config's tolerances installed."""
    from .cubic import CubicMap, check_assumption1

    t0 = time.perf_counter()
    rep = VerifyReport(config)
    old = config.apply()
    try:
        rng = np.random.default_rng(config.seed)
        fmap = CubicMap(config.a)
        rep.items += suite_angles()
        rep.items += suite_brjuno()
        rep.items += suite_boettcher(fmap, rng)
        gate = check_assumption1(fmap, config.assumption_budget)
        rep.items.append(Item("cubic", "assumption1", GATE, note=f"{gate.status}: {gate.reason}"))
        if not gate.satisfied:
            rep.items += [Item(s, "*", GATED, note=gate.status) for s in GATED_SUITES]
            return rep
        from .partition import build_partition

        part = build_partition(fmap)
        runs = [("fatou", lambda: suite_fatou(part, rng)), ("landing", lambda: suite_landing(part)),
                ("itinerary", lambda: suite_itinerary(part)),
                ("accesses", lambda: suite_accesses(part, (2,) if quick else (2, 3))),
                ("puzzles", lambda: [] if quick else suite_puzzles(part))]
        for name, fn in runs:
            try:
                rep.items += fn()
            except Exception as exc:  # a crashing suite is a failing item, the others still run
                rep.items.append(Item(name, "*", FAIL, note=f"{type(exc).__name__}: {exc}"))
    finally:
        restore(old)
        rep.seconds = time.perf_counter() - t0
    return rep
