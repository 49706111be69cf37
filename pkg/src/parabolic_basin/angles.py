"""Exact angles in R/Z under doubling (boundary dynamics) and tripling (external rays)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd


@dataclass(frozen=True, order=True)
class RationalAngle:
    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        p, q = self.numerator % self.denominator, self.denominator
        g = gcd(p, q)
        object.__setattr__(self, "numerator", p // g)
        object.__setattr__(self, "denominator", q // g)

    @classmethod
    def parse(cls, text: str) -> "RationalAngle":
        """Parse ``"p/q"`` (or a bare integer, meaning p/1)."""
        text = text.strip()
        if "/" in text:
            p, q = text.split("/")
            return cls(int(p), int(q))
        return cls(int(text), 1)

    @classmethod
    def of(cls, value) -> "RationalAngle":
        if isinstance(value, RationalAngle):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        fr = Fraction(value)
        return cls(fr.numerator, fr.denominator)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"

    def __float__(self) -> float:
        return self.numerator / self.denominator

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def times(self, m: int) -> "RationalAngle":
        return RationalAngle(self.numerator * m, self.denominator)

    def __add__(self, other) -> "RationalAngle":
        other = RationalAngle.of(other)
        return RationalAngle.of(self.fraction + other.fraction)

    def __sub__(self, other) -> "RationalAngle":
        other = RationalAngle.of(other)
        return RationalAngle.of(self.fraction - other.fraction)

    def orbit_period(self, m: int) -> tuple[int, int]:
        """Return (preperiod, period) of the angle under multiplication by m."""
        if m < 2:
            raise ValueError("m must be >= 2")
        # for reduced p/q the orbit type depends on q alone: q | p m^j (m^l - 1) iff q | m^j (m^l - 1)
        return _orbit_of_unit_fraction(self.denominator, m)

    def is_dyadic(self) -> bool:
        q = self.denominator
        return q & (q - 1) == 0

    def base_digits(self, m: int, n: int) -> list[int]:
        """First n digits of the base-m expansion (terminating expansion for exact m-adic angles)."""
        p, q = self.numerator, self.denominator
        digits = []
        for _ in range(n):
            p *= m
            d, p = divmod(p, q)
            digits.append(d)
        return digits

    def preimages(self, m: int) -> list["RationalAngle"]:
        return [RationalAngle(self.numerator + j * self.denominator, self.denominator * m) for j in range(m)]


@lru_cache(maxsize=None)
def _orbit_of_unit_fraction(q: int, m: int) -> tuple[int, int]:
    """(preperiod, period) of 1/q under x -> m x mod 1, iterating numerators mod q."""
    seen = {}
    x, step = 1 % q, 0
    while x not in seen:
        seen[x] = step
        x = x * m % q
        step += 1
    pre = seen[x]
    return pre, step - pre


def times(angle: RationalAngle, m: int) -> RationalAngle:
    return angle.times(m)


def orbit_period(angle: RationalAngle, m: int) -> tuple[int, int]:
    return angle.orbit_period(m)


def is_dyadic(angle: RationalAngle) -> bool:
    return angle.is_dyadic()


def base_digits(angle: RationalAngle, m: int, n: int) -> list[int]:
    return angle.base_digits(m, n)


def theta_pm(k: int, sign: str) -> RationalAngle:
    """The angles +-1/(2^k - 1) of the k-periodic accesses."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    q = 2**k - 1
    return RationalAngle(1 if sign == "+" else q - 1, q)


def from_digits(digits, m: int = 2) -> RationalAngle:
    """Angle with the finite base-m expansion 0.d1 d2 ... dn."""
    p = 0
    for d in digits:
        p = p * m + d
    return RationalAngle(p, m ** len(digits))


def from_periodic_digits(prefix, period, m: int = 2) -> RationalAngle:
    """Angle 0.prefix (period)^inf in base m."""
    head = Fraction(from_digits(prefix, m).fraction)
    if not period:
        return RationalAngle.of(head)
    block = sum(d * m ** (len(period) - 1 - i) for i, d in enumerate(period))
    tail = Fraction(block, m ** len(period) - 1) / m ** len(prefix)
    return RationalAngle.of(head + tail)


def cyclic_order(a: RationalAngle, b: RationalAngle, c: RationalAngle) -> str:
    """'positive' if a, b, c are met in this order turning counterclockwise, 'negative' if the reverse."""
    if a == b or b == c or a == c:
        return "degenerate"
    fa, fb, fc = a.fraction, b.fraction, c.fraction
    if (fb - fa) % 1 < (fc - fa) % 1:
        return "positive"
    return "negative"


def cyclic_order_real(a: float, b: float, c: float, tol: float = 0.0) -> str:
    """Floating-point counterpart of :func:`cyclic_order`."""
    if abs(a - b) <= tol or abs(b - c) <= tol or abs(a - c) <= tol:
        return "degenerate"
    return "positive" if (b - a) % 1.0 < (c - a) % 1.0 else "negative"
