"""Loop systems: Markov shifts of a bouquet of simple loops at one vertex.

A loop system is given by its loop-counting series ``f(z) = sum f_n z^n``
(``f_n`` simple loops of length ``n``).  Three exact coefficient rules are
supported:

* :class:`PolynomialLoops` -- finitely many loops;
* :class:`EventuallyGeometricLoops` -- ``f_n = floor(c * b**n / n**s)`` past a
  finite prefix;
* :class:`RationalLoops` -- ``f = P/Q`` with integer polynomials, which is what
  first-return loops of a finite graph produce.

Every rule can evaluate ``f`` on rationals with certified two-sided bounds,
which is all the entropy and recurrence computations need.
"""

from __future__ import annotations

import enum
import math
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Sequence

from . import poly
from .graph import DirectedMultigraph, Edge, essential, sort_key
from .rational import RationalInterval, as_fraction, fraction_str
from .spectra import DEFAULT_TOL, EntropyBound, OrbitCensus, _lambda_width_for

DEFAULT_SIZE_CAP = 200_000
MAX_TAIL_TERMS = 1 << 14
EXACT_DEGREE_CAP = 64  # larger lambda polynomials skip exact root isolation


def size_cap(cap: int | None = None) -> int:
    """Explicit cap, else the ``SHIFT_CAP`` environment variable, else the default."""
    if cap is not None:
        return int(cap)
    env = os.environ.get("SHIFT_CAP")
    return int(env) if env else DEFAULT_SIZE_CAP


class LoopSystemError(ValueError):
    pass


class InsufficientTailInformation(LoopSystemError):
    pass


class TruncationTooLarge(LoopSystemError):
    pass


Bounds = tuple[Fraction, "Fraction | None"]  # (lo, hi); hi None means +infinity


class LoopSystem(ABC):
    """Common interface; concrete rules are immutable value objects."""

    kind: str

    @abstractmethod
    def coeffs(self, n_max: int) -> tuple[int, ...]:
        """``(f_1, ..., f_{n_max})``."""

    def coeff(self, n: int) -> int:
        return self.coeffs(n)[n - 1]

    @abstractmethod
    def radius(self) -> RationalInterval | None:
        """Radius of convergence ``R`` (``None`` means infinite)."""

    @abstractmethod
    def bounds(self, x: Fraction, terms: int = 64) -> Bounds:
        """Certified bounds on ``f(x)`` for rational ``x`` with ``0 <= x < R``."""

    @abstractmethod
    def derivative_bounds(self, x: Fraction, terms: int = 64) -> Bounds:
        """Certified bounds on ``f'(x)`` for ``0 <= x < R``."""

    @abstractmethod
    def value_at_radius(self, terms: int = 64) -> Bounds:
        """Bounds on ``f(R-)``; only meaningful when ``R`` is finite."""

    @abstractmethod
    def is_zero(self) -> bool: ...

    @abstractmethod
    def period(self) -> int: ...

    @abstractmethod
    def to_json(self) -> dict[str, Any]: ...

    def lambda_polynomial(self) -> tuple[int, ...] | None:
        """Integer polynomial having ``lambda`` as its largest real root, when algebraic."""
        return None


def _check_coeffs(cs: Sequence[int]) -> tuple[int, ...]:
    out = []
    for c in cs:
        if isinstance(c, bool) or not isinstance(c, (int, str)):
            raise LoopSystemError(f"coefficient {c!r} is not an integer")
        c = int(c)
        if c < 0:
            raise LoopSystemError("loop counts must be nonnegative")
        out.append(c)
    return tuple(out)


@dataclass(frozen=True)
class PolynomialLoops(LoopSystem):
    """Finitely many loops: ``coeffs[i]`` loops of length ``i + 1``."""

    loop_counts: tuple[int, ...]
    kind = "polynomial"

    def __post_init__(self) -> None:
        object.__setattr__(self, "loop_counts", poly.trim(_check_coeffs(self.loop_counts)))

    @property
    def degree(self) -> int:
        return len(self.loop_counts)

    def coeffs(self, n_max: int) -> tuple[int, ...]:
        c = self.loop_counts[:n_max]
        return c + (0,) * (n_max - len(c))

    def as_poly(self) -> tuple[int, ...]:
        return (0,) + self.loop_counts

    def radius(self) -> None:
        return None

    def bounds(self, x: Fraction, terms: int = 64) -> Bounds:
        v = poly.evaluate(self.as_poly(), Fraction(x))
        return v, v

    def derivative_bounds(self, x: Fraction, terms: int = 64) -> Bounds:
        v = poly.evaluate(poly.derivative(self.as_poly()), Fraction(x))
        return v, v

    def value_at_radius(self, terms: int = 64) -> Bounds:
        return (Fraction(0), None) if self.is_zero() else (Fraction(sum(self.loop_counts)), None)

    def is_zero(self) -> bool:
        return not self.loop_counts

    def period(self) -> int:
        return math.gcd(*[n for n, c in enumerate(self.loop_counts, 1) if c]) if not self.is_zero() else 0

    def lambda_polynomial(self) -> tuple[int, ...]:
        # lambda**d * (1 - f(1/lambda))
        d = self.degree
        out = [0] * (d + 1)
        out[d] = 1
        for n, c in enumerate(self.loop_counts, 1):
            out[d - n] -= c
        return tuple(out)

    def to_json(self) -> dict[str, Any]:
        return {"type": "polynomial", "coeffs": list(self.loop_counts)}


@dataclass(frozen=True)
class RationalLoops(LoopSystem):
    """``f = num/den`` (coefficient tuples, low degree first; ``den[0] == 1``)."""

    num: tuple[int, ...]
    den: tuple[int, ...]
    kind = "rational"

    def __post_init__(self) -> None:
        num, den = poly.trim(self.num), poly.trim(self.den)
        if not den or den[0] != 1:
            raise LoopSystemError("denominator must have constant term 1")
        if num and num[0] != 0:
            raise LoopSystemError("numerator must vanish at 0 (no loops of length 0)")
        if num:
            g = poly.poly_gcd(num, den)
            if len(g) > 1:
                num, den = poly.exact_quotient(num, g), poly.exact_quotient(den, g)
                if den[0] < 0:
                    num, den = tuple(-x for x in num), tuple(-x for x in den)
                if den[0] != 1:
                    # gcd normalised to a primitive polynomial with g(0) = +-1 here
                    raise LoopSystemError("reduced denominator lost its unit constant term")
        else:
            den = (1,)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        probe = poly.series(num, den, 4 * (len(num) + len(den)) + 8)
        if any(x < 0 for x in probe):
            raise LoopSystemError("series has negative coefficients")

    def coeffs(self, n_max: int) -> tuple[int, ...]:
        return poly.series(self.num, self.den, n_max)[1:]

    @cached_property
    def _radius(self) -> RationalInterval | None:
        if len(self.den) == 1:
            return None
        return poly.smallest_positive_root(self.den, Fraction(1, 2**64))

    def radius(self, width: Fraction | None = None) -> RationalInterval | None:
        if width is None or self._radius is None or self._radius.width <= width:
            return self._radius
        return poly.smallest_positive_root(self.den, width)

    def _check_inside(self, x: Fraction) -> None:
        r = self._radius
        if r is not None and x >= r.lo:
            raise LoopSystemError("evaluation point not certified inside the disk of convergence")

    def bounds(self, x: Fraction, terms: int = 64) -> Bounds:
        x = Fraction(x)
        self._check_inside(x)
        v = poly.evaluate(self.num, x) / poly.evaluate(self.den, x)
        return v, v

    def derivative_bounds(self, x: Fraction, terms: int = 64) -> Bounds:
        x = Fraction(x)
        self._check_inside(x)
        p, q = self.num, self.den
        top = poly.sub(poly.mul(poly.derivative(p), q), poly.mul(p, poly.derivative(q)))
        v = poly.evaluate(top, x) / poly.evaluate(q, x) ** 2
        return v, v

    def value_at_radius(self, terms: int = 64) -> Bounds:
        # a pole at R with nonnegative coefficients: f(R-) is infinite
        return (Fraction(0), None) if self.is_zero() else (Fraction(1), None)

    def is_zero(self) -> bool:
        return not self.num

    def period(self) -> int:
        # For series arising from finite graphs every cycle class is visible among
        # first returns of length <= 3 * (number of states); this bound covers it.
        k = 3 * (len(self.num) + len(self.den) + 1)
        cs = self.coeffs(k)
        support = [n for n, c in enumerate(cs, 1) if c]
        return math.gcd(*support) if support else 0

    def lambda_polynomial(self) -> tuple[int, ...]:
        d = poly.sub(self.den, self.num)
        return poly.reverse(d, len(d) - 1)

    def to_json(self) -> dict[str, Any]:
        return {"type": "rational", "num": list(self.num), "den": list(self.den)}


@dataclass(frozen=True)
class EventuallyGeometricLoops(LoopSystem):
    """``f_n = prefix[n-1]`` for ``n <= n0``, else ``floor(c * b**n / n**s)``.

    ``s = 0`` is the plain geometric rule; ``s >= 2`` allows coefficient
    families with ``f(R-) < 1`` (transient systems).
    """

    prefix: tuple[int, ...]
    c: Fraction
    b: Fraction
    n0: int
    s: int = 0
    kind = "eventually_geometric"

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", _check_coeffs(self.prefix))
        object.__setattr__(self, "c", as_fraction(self.c))
        object.__setattr__(self, "b", as_fraction(self.b))
        if len(self.prefix) != self.n0:
            raise LoopSystemError("prefix must list exactly f_1..f_n0")
        if self.c <= 0 or self.b <= 0:
            raise LoopSystemError("c and b must be positive")
        if self.s < 0 or int(self.s) != self.s:
            raise LoopSystemError("s must be a nonnegative integer")

    def _tail(self, n: int) -> int:
        num = self.c.numerator * self.b.numerator**n
        den = self.c.denominator * self.b.denominator**n * n**self.s
        return num // den

    @cached_property
    def tail_vanishes(self) -> bool:
        """True when the rule contributes only finitely many loops."""
        if self.b < 1 or (self.b == 1 and self.s > 0):
            return True
        return self.b == 1 and self.c < 1

    @cached_property
    def _delegate(self) -> LoopSystem | None:
        if self.tail_vanishes:
            cs = list(self.prefix)
            n = self.n0 + 1
            # for b <= 1 the value c*b^n/n^s is nonincreasing, so stop at the first zero
            while True:
                t = self._tail(n)
                if t == 0 and self.c * self.b**n / Fraction(n) ** self.s < 1:
                    break
                cs.append(t)
                n += 1
            return PolynomialLoops(tuple(cs))
        lead = self.c * self.b ** (self.n0 + 1)
        if self.s == 0 and self.b.denominator == 1 and lead.denominator == 1:
            # f = prefix(z) + lead z^(n0+1) / (1 - b z)
            b = int(self.b)
            pre = (0,) + self.prefix
            num = poly.add(poly.mul(pre, (1, -b)), (0,) * (self.n0 + 1) + (int(lead),))
            return RationalLoops(num, (1, -b))
        return None

    def coeffs(self, n_max: int) -> tuple[int, ...]:
        cache = self.__dict__.setdefault("_coeff_cache", list(self.prefix))
        while len(cache) < n_max:
            cache.append(self._tail(len(cache) + 1))
        return tuple(cache[:n_max])

    def radius(self) -> RationalInterval | None:
        if self._delegate is not None:
            return self._delegate.radius()
        return RationalInterval.point(1 / self.b)

    def _partial(self, x: Fraction, m: int, deriv: bool = False) -> Fraction:
        return _horner(self.coeffs(m), x, deriv)

    def bounds(self, x: Fraction, terms: int = 64) -> Bounds:
        if self._delegate is not None:
            return self._delegate.bounds(x, terms)
        x = Fraction(x)
        y = self.b * x
        if not 0 <= x or y >= 1:
            raise LoopSystemError("evaluation point not inside the disk of convergence")
        m = max(terms, self.n0)
        part = self._partial(x, m)
        first = self.c * y ** (m + 1) / Fraction(m + 1) ** self.s
        hi = part + first / (1 - y)
        lo = part + max(Fraction(0), first - x ** (m + 1) / (1 - x))
        return lo, hi

    def derivative_bounds(self, x: Fraction, terms: int = 64) -> Bounds:
        if self._delegate is not None:
            return self._delegate.derivative_bounds(x, terms)
        x = Fraction(x)
        y = self.b * x
        if not 0 < x or y >= 1:
            raise LoopSystemError("evaluation point not inside the disk of convergence")
        m = max(terms, self.n0)
        part = self._partial(x, m, deriv=True)
        if self.s >= 1:
            tail = self.c / x * Fraction(m + 1) ** (1 - self.s) * y ** (m + 1) / (1 - y)
        else:
            tail = self.c / x * y ** (m + 1) * ((m + 1) - m * y) / (1 - y) ** 2
        return part, part + tail

    def value_at_radius(self, terms: int = 64) -> Bounds:
        if self._delegate is not None:
            return self._delegate.value_at_radius(terms)
        m = max(terms, self.n0)
        part = self._partial(1 / self.b, m)
        if self.s <= 1:
            return part, None  # terms behave like c/n**s: divergent
        # sum_{n>m} n**-s <= m**(1-s)/(s-1)
        return part, part + self.c * Fraction(m) ** (1 - self.s) / (self.s - 1)

    def is_zero(self) -> bool:
        if self._delegate is not None:
            return self._delegate.is_zero()
        return False

    def period(self) -> int:
        if self._delegate is not None:
            return self._delegate.period()
        return 1  # the tail is eventually positive on consecutive lengths

    def lambda_polynomial(self) -> tuple[int, ...] | None:
        return self._delegate.lambda_polynomial() if self._delegate is not None else None

    def to_json(self) -> dict[str, Any]:
        out = {
            "type": "eventually_geometric",
            "prefix": list(self.prefix),
            "c": fraction_str(self.c),
            "b": fraction_str(self.b),
            "n0": self.n0,
        }
        if self.s:
            out["s"] = self.s
        return out


def _horner(cs: Sequence[int], x: Fraction, deriv: bool = False) -> Fraction:
    """``sum c_n x^n`` (or ``sum n c_n x^(n-1)``) over ``n = 1..len(cs)``.

    Integer Horner in ``x = a/d`` with a single division at the end.
    """
    a, d = x.numerator, x.denominator
    m = len(cs)
    acc = 0
    dp = 1
    for n in range(m, 0, -1):
        acc = acc * a + (n * cs[n - 1] if deriv else cs[n - 1]) * dp
        dp *= d
    # acc = sum c_n a^(n-1) d^(m-n); dp = d^m
    if deriv:
        return Fraction(acc, dp // d) if m else Fraction(0)
    return Fraction(acc * a, dp)


def loop_system_from_json(data: dict[str, Any]) -> LoopSystem:
    if not isinstance(data, dict) or "type" not in data:
        raise LoopSystemError("loop system JSON needs a 'type'")
    kind = data["type"]
    try:
        if kind == "polynomial":
            return PolynomialLoops(tuple(data["coeffs"]))
        if kind == "eventually_geometric":
            return EventuallyGeometricLoops(
                tuple(data.get("prefix", ())),
                as_fraction(data["c"]),
                as_fraction(data["b"]),
                int(data.get("n0", len(data.get("prefix", ())))),
                int(data.get("s", 0)),
            )
        if kind == "rational":
            return RationalLoops(tuple(int(x) for x in data["num"]), tuple(int(x) for x in data["den"]))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise LoopSystemError(f"malformed {kind} loop system: {exc}") from exc
    raise LoopSystemError(f"unknown loop system type {kind!r}")


# --- entropy ---------------------------------------------------------------

def _algebraic_entropy(f: LoopSystem, tol: Fraction) -> EntropyBound:
    rev = f.lambda_polynomial()
    cauchy = 1 + max(Fraction(abs(c), abs(rev[-1])) for c in rev[:-1]) if len(rev) > 1 else Fraction(1)
    iv = RationalInterval(0, cauchy)
    width = _lambda_width_for(tol, Fraction(1, 2))
    lam = poly.refine_largest_root(rev, iv, width)
    lo_guess = lam.lo if lam.lo > 0 else Fraction(1, 2**30)
    width = _lambda_width_for(tol, lo_guess)
    if lam.width > width:
        lam = poly.refine_largest_root(rev, lam, width)
    return EntropyBound.from_lambda(lam, tol, poly.minimal_polynomial(rev, lam))


def _transient(f: LoopSystem, terms: int = 64) -> bool | None:
    """True if certified f(R-) < 1, False if certified > 1, None if undecided."""
    lo, hi = f.value_at_radius(terms)
    if hi is not None and hi < 1:
        return True
    if lo > 1:
        return False
    return None


def _decide_transient(f: LoopSystem) -> bool:
    terms = 64
    while terms <= MAX_TAIL_TERMS:
        t = _transient(f, terms)
        if t is not None:
            return t
        terms *= 2
    raise InsufficientTailInformation("insufficient tail information")


def _compare_to_one(f: LoopSystem, x: Fraction) -> int | None:
    terms = 64
    while terms <= MAX_TAIL_TERMS:
        lo, hi = f.bounds(x, terms)
        if lo > 1:
            return 1
        if hi is not None and hi < 1:
            return -1
        if lo == hi == 1:
            return 0
        terms *= 2
    return None


def _root_interval(f: LoopSystem, r_max: Fraction, width: Fraction) -> RationalInterval:
    """Bisection for the root of ``f(x) = 1`` in ``(0, r_max)`` using certified bounds."""
    lo = Fraction(0)
    hi = r_max
    # f(hi) may be undecidable at the radius itself; walk inwards until f(hi) > 1
    step = 1
    while True:
        probe = r_max * (1 - Fraction(1, 2**step))
        s = _compare_to_one(f, probe)
        if s == 1 or s == 0:
            hi = probe
            if s == 0:
                return RationalInterval(probe, probe)
            break
        if s == -1:
            lo = probe
        step += 1
        if step > 4096:
            raise InsufficientTailInformation("insufficient tail information")
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = _compare_to_one(f, mid)
        if s is None:
            # nudge off an undecidable point
            mid = lo + (hi - lo) * Fraction(3, 7)
            s = _compare_to_one(f, mid)
            if s is None:
                raise InsufficientTailInformation("insufficient tail information")
        if s == 0:
            return RationalInterval(mid, mid)
        if s > 0:
            hi = mid
        else:
            lo = mid
    return RationalInterval(lo, hi)


def loop_entropy(f: LoopSystem, tol: Fraction = DEFAULT_TOL) -> EntropyBound:
    """Entropy ``log lambda`` with ``1/lambda = min(r, R)`` and ``f(r) = 1``."""
    tol = Fraction(tol)
    if f.is_zero():
        raise LoopSystemError("loop system has no loops (f = 0)")
    rev = f.lambda_polynomial()
    if rev is not None and len(rev) - 1 <= EXACT_DEGREE_CAP:
        bound = _algebraic_entropy(f, tol)
    elif f.radius() is None:
        bound = _polynomial_entropy(f, tol)
    else:
        bound = _analytic_entropy(f, tol)
    return bound.with_refiner(lambda t: loop_entropy(f, t))


def _polynomial_entropy(f: LoopSystem, tol: Fraction) -> EntropyBound:
    # f(1) >= 1 for a nonzero integer polynomial, so the root of f = 1 lies in (0, 1]
    if _compare_to_one(f, Fraction(1)) == 0:
        return EntropyBound.from_lambda(RationalInterval.point(Fraction(1)), tol, (-1, 1))
    r_iv = _root_interval(f, Fraction(1), tol / 4)
    return EntropyBound.from_lambda(r_iv.reciprocal(), tol)


def _analytic_entropy(f: LoopSystem, tol: Fraction) -> EntropyBound:
    radius = f.radius()
    assert radius is not None and radius.is_point()
    big_r = radius.lo
    if _decide_transient(f):
        lam = 1 / big_r
        return EntropyBound.from_lambda(
            RationalInterval.point(lam), tol, (-lam.numerator, lam.denominator)
        )
    # r < R: lambda = 1/r, so relative precision on r carries over to lambda
    r_iv = _root_interval(f, big_r, big_r * tol / 4)
    if r_iv.lo == 0:
        raise InsufficientTailInformation("insufficient tail information")
    return EntropyBound.from_lambda(r_iv.reciprocal(), tol)


# --- recurrence --------------------------------------------------------------

class Recurrence(enum.Enum):
    TRANSIENT = "transient"
    NULL_RECURRENT = "null_recurrent"
    POSITIVE_RECURRENT = "positive_recurrent"
    SPR = "spr"


@dataclass(frozen=True)
class RecurrenceClass:
    """Classification with its certificates (all exact rationals)."""

    tag: Recurrence
    r_interval: RationalInterval | None  # root of f = 1, None when transient
    radius: RationalInterval | None  # None = infinite
    f_at_r: tuple[Fraction, Fraction] | None
    f_at_radius: tuple[Fraction, Fraction | None] | None
    fprime_at_r: tuple[Fraction, Fraction] | None

    @property
    def is_spr(self) -> bool:
        return self.tag is Recurrence.SPR

    def to_json(self) -> dict[str, Any]:
        def pair(p):
            if p is None:
                return None
            return [fraction_str(p[0]), "inf" if p[1] is None else fraction_str(p[1])]

        return {
            "tag": self.tag.value,
            "r": self.r_interval.to_json() if self.r_interval else None,
            "R": self.radius.to_json() if self.radius else "inf",
            "f_at_r": pair(self.f_at_r),
            "f_at_R_minus": pair(self.f_at_radius),
            "fprime_at_r": pair(self.fprime_at_r),
        }


def classify_recurrence(f: LoopSystem, tol: Fraction = Fraction(1, 2**64)) -> RecurrenceClass:
    if f.is_zero():
        raise LoopSystemError("loop system has no loops (f = 0)")
    radius = f.radius()
    if radius is not None and f.lambda_polynomial() is None and _decide_transient(f):
        return RecurrenceClass(
            Recurrence.TRANSIENT, None, radius, None, _settled_value_at_radius(f), None
        )
    ent = loop_entropy(f, tol)
    r_iv = ent.lambda_interval.reciprocal()
    if radius is not None:
        if isinstance(f, RationalLoops):
            while not r_iv.hi < radius.lo:
                tol = tol / 2**32
                radius = f.radius(tol)
                r_iv = loop_entropy(f, tol).lambda_interval.reciprocal()
                if tol < Fraction(1, 2**400):
                    raise InsufficientTailInformation("cannot separate r from R")
        elif not r_iv.hi < radius.lo:
            raise InsufficientTailInformation("insufficient tail information")
    f_r = (f.bounds(r_iv.lo)[0], f.bounds(r_iv.hi)[1])
    fp = (f.derivative_bounds(r_iv.lo)[0], f.derivative_bounds(r_iv.hi)[1])
    at_radius = _settled_value_at_radius(f) if radius is not None else None
    # r strictly inside the disk: f is analytic at r, so f'(r) < inf and the
    # exponential tail of first returns gives strong positive recurrence.
    return RecurrenceClass(Recurrence.SPR, r_iv, radius, f_r, at_radius, fp)


def _settled_value_at_radius(f: LoopSystem) -> tuple[Fraction, Fraction | None]:
    terms = 64
    lo, hi = f.value_at_radius(terms)
    while hi is not None and not (hi < 1 or lo > 1) and terms < MAX_TAIL_TERMS:
        terms *= 2
        lo, hi = f.value_at_radius(terms)
    return lo, hi


# --- loop graphs ---------------------------------------------------------------

BASE = 0


def loop_graph(f: LoopSystem, n_max: int, cap: int | None = None) -> DirectedMultigraph:
    """Finite loop graph with exactly ``f_n`` loops of length ``n`` for ``n <= n_max``.

    Loop ``(n, i)`` (``i`` counted from 1) runs through edges ``(n, i, 1)``, ...,
    ``(n, i, n)`` and interior vertices ``(n, i, 1)``, ..., ``(n, i, n-1)``.
    """
    if n_max < 1:
        raise LoopSystemError("n_max must be at least 1")
    cs = f.coeffs(n_max)
    size = sum(n * c for n, c in enumerate(cs, 1))
    if size > size_cap(cap):
        raise TruncationTooLarge("truncation too large")
    verts = [BASE]
    edges = []
    for n, c in enumerate(cs, 1):
        for i in range(1, c + 1):
            prev = BASE
            for j in range(1, n + 1):
                nxt = BASE if j == n else (n, i, j)
                if nxt != BASE:
                    verts.append(nxt)
                edges.append(Edge((n, i, j), prev, nxt))
                prev = nxt
    return DirectedMultigraph(tuple(verts), tuple(edges))


def loop_label(edge_id: tuple) -> tuple[int, int]:
    """Canonical ``(length, index)`` label of the loop an edge belongs to."""
    return edge_id[0], edge_id[1]


# --- first-return decomposition -------------------------------------------------

@dataclass(frozen=True)
class FirstReturn:
    vertex: Any
    system: LoopSystem
    counts: tuple[int, ...]  # f_1..f_{n_max} by direct path counting


def first_return_counts(g: DirectedMultigraph, allowed: Sequence[Any], v: Any, n_max: int) -> tuple[int, ...]:
    """Paths ``v -> ... -> v`` of each length inside ``allowed`` that do not revisit ``v``."""
    allowed_set = set(allowed)
    out = [0] * n_max
    vec: dict[Any, int] = {}
    for e in g.out_edges(v):
        if e.target == v:
            out[0] += 1
        elif e.target in allowed_set:
            vec[e.target] = vec.get(e.target, 0) + 1
    for n in range(2, n_max + 1):
        nxt: dict[Any, int] = {}
        for u, c in vec.items():
            for e in g.out_edges(u):
                if e.target == v:
                    out[n - 1] += c
                elif e.target in allowed_set:
                    nxt[e.target] = nxt.get(e.target, 0) + c
        vec = nxt
    return tuple(out)


def first_return_decomposition(
    g: DirectedMultigraph, vertex_order: Sequence[Any] | None = None, n_max: int = 10
) -> list[FirstReturn]:
    """Loop systems ``L_v``: first returns to ``v`` avoiding vertices earlier in the order.

    Every periodic point of ``g`` lies in exactly one ``Σ(L_v)``, namely the one for
    the earliest vertex its orbit visits.  Each ``L_v`` is returned with its exact
    rational generating function ``1 - det(I - zA_H)/det(I - zB)`` (``H`` the
    allowed subgraph, ``B`` the same with ``v`` removed) and the directly
    counted coefficients up to ``n_max``, which must agree.
    """
    order = list(vertex_order) if vertex_order is not None else sorted(g.vertices, key=sort_key)
    if sorted(order, key=sort_key) != sorted(g.vertices, key=sort_key):
        raise LoopSystemError("vertex_order must enumerate every vertex exactly once")
    result = []
    for k, v in enumerate(order):
        allowed = order[k:]
        counts = first_return_counts(g, allowed, v, n_max)
        h = g.subgraph(allowed)
        rest = h.subgraph([u for u in allowed if u != v])
        d_h = poly.det_one_minus_z(h.sparse_rows())
        d_b = poly.det_one_minus_z(rest.sparse_rows()) if rest.vertices else (1,)
        system = RationalLoops(poly.sub(d_b, d_h), d_b)
        if system.coeffs(n_max) != counts:
            raise ArithmeticError("generating function disagrees with path counts")
        result.append(FirstReturn(v, system, counts))
    return result


# --- census ------------------------------------------------------------------------

def loop_traces(f: LoopSystem, n_max: int) -> tuple[int, ...]:
    """``tr_n = sum_m m f_m u_{n-m}`` with ``u = 1/(1-f)``: points of period ``n``."""
    cs = f.coeffs(n_max)
    u = [1]
    for j in range(1, n_max + 1):
        u.append(sum(cs[m - 1] * u[j - m] for m in range(1, j + 1)))
    return tuple(sum(m * cs[m - 1] * u[n - m] for m in range(1, n + 1)) for n in range(1, n_max + 1))


def loop_census(f: LoopSystem, n_max: int) -> OrbitCensus:
    return OrbitCensus.from_traces(loop_traces(f, n_max))
