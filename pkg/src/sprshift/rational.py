"""Exact rational intervals and certified logarithm bounds.

Everything here works on :class:`fractions.Fraction`; floats never enter.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

RationalLike = Union[int, str, Fraction]


def as_fraction(x: RationalLike) -> Fraction:
    """Parse ``x`` as an exact rational; strings may be ``"p/q"`` or ``"p"``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational (floats are rejected)")


def fraction_str(x: Fraction) -> str:
    """Serialize as ``"p/q"`` (denominator always present)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def floor_dyadic(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction((x.numerator * scale) // x.denominator, scale)


def ceil_dyadic(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(-((-x.numerator * scale) // x.denominator), scale)


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: RationalLike) -> RationalInterval:
        x = as_fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, x: object) -> bool:
        if isinstance(x, RationalInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= as_fraction(x) <= self.hi  # type: ignore[arg-type]

    def overlaps(self, other: RationalInterval) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: RationalInterval) -> RationalInterval | None:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return RationalInterval(lo, hi) if lo <= hi else None

    def hull(self, other: RationalInterval) -> RationalInterval:
        return RationalInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __add__(self, other: RationalInterval | RationalLike) -> RationalInterval:
        o = _lift(other)
        return RationalInterval(self.lo + o.lo, self.hi + o.hi)

    def __sub__(self, other: RationalInterval | RationalLike) -> RationalInterval:
        o = _lift(other)
        return RationalInterval(self.lo - o.hi, self.hi - o.lo)

    def __mul__(self, other: RationalInterval | RationalLike) -> RationalInterval:
        o = _lift(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RationalInterval(min(products), max(products))

    def __truediv__(self, other: RationalInterval | RationalLike) -> RationalInterval:
        o = _lift(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return self * RationalInterval(1 / o.hi, 1 / o.lo)

    def reciprocal(self) -> RationalInterval:
        return RationalInterval(1, 1) / self

    def strictly_below(self, other: RationalInterval | RationalLike) -> bool:
        return self.hi < _lift(other).lo

    def strictly_above(self, other: RationalInterval | RationalLike) -> bool:
        return self.lo > _lift(other).hi

    def to_json(self) -> dict[str, str]:
        return {"lo": fraction_str(self.lo), "hi": fraction_str(self.hi)}

    @classmethod
    def from_json(cls, data: dict[str, str]) -> RationalInterval:
        return cls(as_fraction(data["lo"]), as_fraction(data["hi"]))

    def approx(self) -> float:
        """Display-only midpoint."""
        return float(self.midpoint)


def _lift(x: RationalInterval | RationalLike) -> RationalInterval:
    if isinstance(x, RationalInterval):
        return x
    return RationalInterval.point(x)


# --- certified logarithms --------------------------------------------------

def _atanh_bounds(t: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    # 0 <= t <= 1/3; truncated Taylor series plus a geometric remainder bound.
    # Two independently rounded accumulators keep both ends valid.
    if t == 0:
        return Fraction(0), Fraction(0)
    work = bits + 16
    t_lo, t_hi = floor_dyadic(t, work + 8), ceil_dyadic(t, work + 8)
    sq_lo, sq_hi = t_lo * t_lo, t_hi * t_hi
    p_lo, p_hi = t_lo, t_hi
    s_lo = s_hi = Fraction(0)
    k = 0
    eps = Fraction(1, 1 << work)
    while True:
        s_lo = floor_dyadic(s_lo + p_lo / (2 * k + 1), work)
        s_hi = ceil_dyadic(s_hi + p_hi / (2 * k + 1), work)
        k += 1
        p_lo = floor_dyadic(p_lo * sq_lo, work + 8)
        p_hi = ceil_dyadic(p_hi * sq_hi, work + 8)
        remainder = p_hi / ((2 * k + 1) * (1 - sq_hi))
        if remainder < eps:
            break
    return s_lo, ceil_dyadic(s_hi + remainder, work)


_LOG2_CACHE: dict[int, tuple[Fraction, Fraction]] = {}


def _log2_bounds(bits: int) -> tuple[Fraction, Fraction]:
    if bits not in _LOG2_CACHE:
        lo, hi = _atanh_bounds(Fraction(1, 3), bits)
        _LOG2_CACHE[bits] = (2 * lo, 2 * hi)
    return _LOG2_CACHE[bits]


def _log_bounds_near_one(m: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    # m in [1/2, 2]; log m = 2 atanh((m-1)/(m+1)), |t| <= 1/3
    t = (m - 1) / (m + 1)
    if t >= 0:
        lo, hi = _atanh_bounds(t, bits)
        return 2 * lo, 2 * hi
    lo, hi = _atanh_bounds(-t, bits)
    return -2 * hi, -2 * lo


def log_interval(x: RationalInterval | RationalLike, bits: int = 60) -> RationalInterval:
    """Rational interval containing ``log`` of every point of ``x``.

    The enclosure is outward: its width is ``log(hi/lo)`` plus at most
    ``2**-bits`` of rounding slack.
    """
    iv = _lift(x)
    if iv.lo <= 0:
        raise ValueError("logarithm of a non-positive quantity")
    bits = max(int(bits), 8)
    return RationalInterval(_log_one(iv.lo, bits + 4)[0], _log_one(iv.hi, bits + 4)[1])


def _log_one(q: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    k = q.numerator.bit_length() - q.denominator.bit_length()
    m = q / Fraction(2) ** k
    while m > 2:
        m /= 2
        k += 1
    while m < Fraction(1, 2):
        m *= 2
        k -= 1
    shift_bits = bits + max(abs(k), 1).bit_length() + 2
    mlo, mhi = _log_bounds_near_one(m, shift_bits)
    l2lo, l2hi = _log2_bounds(shift_bits)
    if k >= 0:
        return k * l2lo + mlo, k * l2hi + mhi
    return k * l2hi + mlo, k * l2lo + mhi


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The rational with least denominator in ``[lo, hi]`` (continued fractions)."""
    lo, hi = as_fraction(lo), as_fraction(hi)
    if lo > hi:
        raise ValueError("empty interval")
    fl = lo.numerator // lo.denominator
    if Fraction(fl) == lo:
        return lo
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # lo and hi share the integer part fl; recurse on reciprocals of the fractional parts
    return fl + 1 / simplest_between(1 / (hi - fl), 1 / (lo - fl))
