"""Cycle classification for renormalization and Brjuno sums of rotation numbers."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

BLOWUP_THRESHOLD = 1e3
INCREMENT_TOL = 1e-12
TAIL_TOL = 1e-2
RATIONAL_ROTATION_TOL = 1e-8
RATIONAL_MAX_DENOMINATOR = 1000


class PrecisionExhausted(Exception):
    def __init__(self, n_reached):
        super().__init__(f"continued fraction precision exhausted after {n_reached} terms")
        self.n_reached = n_reached


@dataclass(frozen=True)
class Astronomical:
    """A quotient too large to store; ``log_over_q`` is log(a_{n+1}) / q_n."""

    log_over_q: float


@dataclass
class ContinuedFraction:
    theta: float
    partial_quotients: list = field(default_factory=list)
    convergents: list = field(default_factory=list)  # (p_n, q_n), exact ints
    terminated: bool = False

    def error_bounds_hold(self) -> bool:
        """|theta - p_n/q_n| < 1/(q_n q_{n+1}) for all consecutive convergents (exact rationals)."""
        th = Fraction(self.theta)
        for (p, q), (_, q1) in zip(self.convergents, self.convergents[1:]):
            if not abs(th - Fraction(p, q)) < Fraction(1, q * q1):
                return False
        return True


def continued_fraction(theta: float, n: int, strict: bool = False) -> ContinuedFraction:
    """First n partial quotients [a_1, a_2, ...] of theta in (0, 1) and the convergents p_n/q_n.

    The expansion runs on the exact binary value of the double, stopping early at
    termination.  Quotients beyond the double's precision (q_n^2 > 2^53) are dropped;
    with ``strict`` that raises :class:`PrecisionExhausted` instead.
    """
    x = Fraction(theta) % 1
    cf = ContinuedFraction(float(theta))
    p_prev, q_prev, p, q = 1, 0, 0, 1
    cf.convergents.append((0, 1))
    for i in range(n):
        if x == 0:
            cf.terminated = True
            break
        y = 1 / x
        a = math.floor(y)
        if a > 2**26:
            # the double is a rational whose last quotient is a rounding artifact
            cf.terminated = True
            break
        x = y - a
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        if q * q > 2**53 and x != 0:
            if strict:
                raise PrecisionExhausted(i)
            break
        cf.partial_quotients.append(a)
        cf.convergents.append((p, q))
    else:
        if x == 0:
            cf.terminated = True
    return cf


def golden_mean() -> float:
    return (math.sqrt(5.0) - 1.0) / 2.0


def fast_growth_rule(n: int, q_n) -> object:
    """Quotient rule a_{n+1} = 2^{q_n}; returns Astronomical once 2^{q_n} is unstorable."""
    if isinstance(q_n, int) and q_n < 4096:
        return 2**q_n
    return Astronomical(math.log(2.0))


@dataclass
class BrjunoReport:
    partial_sums: list
    verdict: str  # likely_brjuno | likely_not_brjuno | undecided
    N: int
    terminated: bool = False

    def to_text(self) -> str:
        lines = [
            f"N: {self.N}",
            f"verdict: {self.verdict}",
            f"terminated: {str(self.terminated).lower()}",
            f"partial_sum: {self.partial_sums[-1] if self.partial_sums else 0.0:.17g}",
        ]
        return "\n".join(lines) + "\n"


def _log_int(q) -> float:
    return math.log(q) if isinstance(q, int) else float("inf")


def brjuno_increments(quotients: Iterable | None = None, rule: Callable | None = None, N: int = 20):
    """Increments log(q_{n+1}) / q_n for n = 1..N from explicit quotients [a_1, a_2, ...] or a rule.

    ``rule(n, q_n)`` returns a_{n+1}, either an int or :class:`Astronomical`.
    """
    incs = []
    if quotients is not None:
        quotients = list(quotients)
        if not quotients:
            return incs
        a1 = quotients[0]
    else:
        a1 = rule(0, 1)
    q_prev, q = 1, a1
    n = 1
    idx = 1
    while n <= N:
        if quotients is not None:
            if idx >= len(quotients):
                break
            a = quotients[idx]
        else:
            a = rule(n, q)
        idx += 1
        if isinstance(a, Astronomical) or not isinstance(q, int):
            # q_{n+1} = a q_n + q_{n-1}: log q_{n+1} / q_n = log(a)/q_n + log(q_n)/q_n + O(1/(a q_n^2))
            if isinstance(a, Astronomical):
                lq = _log_int(q)
                tail = lq / q if isinstance(q, int) else 0.0
                incs.append(a.log_over_q + tail)
            else:
                incs.append(0.0)
            q_prev, q = q, None  # astronomically large; only its ratio terms survive
        else:
            q_prev, q = q, a * q + q_prev
            incs.append(math.log(q) / q_prev)
        n += 1
    return incs


def _verdict(incs, sums, terminated, blowup, increment_tol, tail_tol) -> str:
    if terminated:
        return "undecided"
    if sums and sums[-1] > blowup:
        return "likely_not_brjuno"
    if incs and incs[-1] < increment_tol:
        return "likely_brjuno"
    if len(incs) >= 6:
        last = incs[-6:]
        ratios = [b / a for a, b in zip(last, last[1:]) if a > 0]
        if len(ratios) == 5 and max(ratios) <= 0.9:
            r = max(ratios)
            if incs[-1] * r / (1.0 - r) < tail_tol:
                return "likely_brjuno"
    return "undecided"


def brjuno_partial(
    theta=None,
    N: int = 20,
    *,
    quotients=None,
    rule=None,
    blowup: float = BLOWUP_THRESHOLD,
    increment_tol: float = INCREMENT_TOL,
    tail_tol: float = TAIL_TOL,
) -> BrjunoReport:
    """Partial Brjuno sums sum_{n<=N} log(q_{n+1})/q_n.

    theta may be a float (expanded in double precision), or the expansion may be given
    exactly through ``quotients`` or a quotient ``rule``.
    """
    terminated = False
    if theta is not None:
        cf = continued_fraction(theta, N + 1)
        quotients = cf.partial_quotients
        terminated = cf.terminated
    incs = brjuno_increments(quotients=quotients, rule=rule, N=N)
    sums = []
    s = 0.0
    for inc in incs:
        s += inc
        sums.append(s)
    verdict = _verdict(incs, sums, terminated, blowup, increment_tol, tail_tol)
    return BrjunoReport(sums, verdict, len(sums), terminated)


# -- multipliers -------------------------------------------------------------------


def rotation_number(lam: complex) -> float:
    return (cmath.phase(lam) / (2 * math.pi)) % 1.0


def rotation_is_rational(lam: complex, tol: float = RATIONAL_ROTATION_TOL,
                         max_den: int = RATIONAL_MAX_DENOMINATOR) -> bool:
    t = rotation_number(lam)
    fr = Fraction(t).limit_denominator(max_den)
    d = abs(t - float(fr))
    return min(d, 1 - d) < tol


def classify_cycle_for_renormalization(fmap, cycle, visits: dict | None = None, N: int = 20) -> dict:
    """Report the expected renormalization behaviour of a non-repelling cycle.

    ``visits`` optionally carries puzzle-piece visit data gathered around the cycle.
    """
    if cycle.kind == "repelling":
        raise ValueError("cycle must be non-repelling")
    if any(abs(z) < 1e-12 for z in cycle.points):
        raise ValueError("cycle must avoid the parabolic point")
    report = {
        "period": cycle.period,
        "multiplier": cycle.multiplier,
        "kind": cycle.kind,
    }
    if cycle.kind in ("attracting", "parabolic"):
        report["renormalization"] = "expected"
        if cycle.kind == "parabolic":
            report["brjuno"] = None
    else:
        theta = rotation_number(cycle.multiplier)
        br = brjuno_partial(theta, N)
        report["rotation_number"] = theta
        report["brjuno"] = br
        report["renormalization"] = "expected"
        report["linearizable"] = {
            "likely_brjuno": "expected",
            "likely_not_brjuno": "not expected",
        }.get(br.verdict, "undecided")
    if visits is not None:
        report["puzzle_visits"] = visits
    return report
