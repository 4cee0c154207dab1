"""Integer polynomials as coefficient tuples ``(c0, c1, ..., cd)``.

Exact algebra (characteristic polynomials, gcds, factorisation, real-root
counting) is delegated to sympy; this module only adapts it to plain
tuples and :class:`~fractions.Fraction` endpoints.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Sequence

import sympy
from sympy import ZZ, Poly, Rational
from sympy.polys.matrices import DomainMatrix

from .rational import RationalInterval

Coeffs = tuple[int, ...]

_X = sympy.Symbol("x")


def trim(c: Sequence[int]) -> Coeffs:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(int(x) for x in c)


def degree(c: Sequence[int]) -> int:
    return len(trim(c)) - 1


def evaluate(c: Sequence[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for coef in reversed(c):
        acc = acc * x + coef
    return acc


def add(a: Sequence[int], b: Sequence[int]) -> Coeffs:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def sub(a: Sequence[int], b: Sequence[int]) -> Coeffs:
    return add(a, [-x for x in b])


def mul(a: Sequence[int], b: Sequence[int], cap: int | None = None) -> Coeffs:
    """Product, optionally truncated to degree ``cap``."""
    if not a or not b:
        return ()
    n = len(a) + len(b) - 1
    if cap is not None:
        n = min(n, cap + 1)
    out = [0] * n
    for i, x in enumerate(a):
        if x == 0 or i >= n:
            continue
        for j, y in enumerate(b[: n - i]):
            if y:
                out[i + j] += x * y
    return trim(out)


def reverse(c: Sequence[int], deg: int | None = None) -> Coeffs:
    """``z**deg * c(1/z)``."""
    c = trim(c)
    d = len(c) - 1 if deg is None else deg
    padded = list(c) + [0] * (d + 1 - len(c))
    return trim(padded[::-1])


def primitive(c: Sequence[int]) -> Coeffs:
    """Divide out the content and make the leading coefficient positive."""
    c = trim(c)
    if not c:
        return c
    g = reduce(gcd, (abs(x) for x in c))
    sign = -1 if c[-1] < 0 else 1
    return tuple(sign * x // g for x in c)


def to_sympy(c: Sequence[int]) -> Poly:
    return Poly(list(reversed(trim(c))) or [0], _X, domain=ZZ)


def from_sympy(p: Poly) -> Coeffs:
    return trim(int(x) for x in reversed(p.all_coeffs()))


def charpoly(rows: Sequence[dict[int, int]] | Sequence[Sequence[int]]) -> Coeffs:
    """``det(t I - A)`` for an integer matrix given densely or as sparse rows."""
    n = len(rows)
    if n == 0:
        return (1,)
    dense = []
    for r in rows:
        if isinstance(r, dict):
            line = [0] * n
            for j, v in r.items():
                line[j] = v
            dense.append([ZZ(x) for x in line])
        else:
            dense.append([ZZ(int(x)) for x in r])
    cp = DomainMatrix(dense, (n, n), ZZ).charpoly()
    return trim(int(x) for x in reversed(cp))


def det_one_minus_z(rows: Sequence[dict[int, int]] | Sequence[Sequence[int]]) -> Coeffs:
    """``det(I - z A)`` as a polynomial in ``z``."""
    n = len(rows)
    return reverse(charpoly(rows), n)


def squarefree(c: Sequence[int]) -> Coeffs:
    return primitive(from_sympy(to_sympy(c).sqf_part()))


def poly_gcd(a: Sequence[int], b: Sequence[int]) -> Coeffs:
    return primitive(from_sympy(to_sympy(a).gcd(to_sympy(b))))


def exact_quotient(a: Sequence[int], b: Sequence[int]) -> Coeffs:
    q, r = to_sympy(a).div(to_sympy(b))
    if not r.is_zero:
        raise ArithmeticError("polynomial division is not exact")
    return from_sympy(q)


def irreducible_factors(c: Sequence[int]) -> list[Coeffs]:
    _, factors = to_sympy(c).factor_list()
    return sorted({primitive(from_sympy(f)) for f, _ in factors}, key=lambda f: (len(f), f))


def count_roots(c: Sequence[int], iv: RationalInterval) -> int:
    """Number of distinct real roots in the closed interval ``iv``."""
    p = to_sympy(c)
    if p.is_zero:
        raise ValueError("zero polynomial has infinitely many roots")
    return int(p.sqf_part().count_roots(_r(iv.lo), _r(iv.hi)))


def _r(x: Fraction) -> Rational:
    return Rational(x.numerator, x.denominator)


def sign_at(c: Sequence[int], x: Fraction) -> int:
    v = evaluate(c, x)
    return (v > 0) - (v < 0)


def refine_largest_root(
    c: Sequence[int], iv: RationalInterval, width: Fraction, isolate: bool = True
) -> RationalInterval:
    """Shrink ``iv`` around the largest real root of ``c``.

    Precondition: the largest real root lies in ``iv``.  Returns an interval
    of width at most ``width``; with ``isolate`` it also contains no other
    root of ``c``.
    """
    sf = squarefree(c)
    lo, hi = iv.lo, iv.hi
    if lo == hi:
        return iv
    if count_roots(sf, RationalInterval(lo, hi)) == 0:
        raise ValueError("interval contains no root")
    while True:
        n = count_roots(sf, RationalInterval(lo, hi))
        if (hi - lo) <= width and (not isolate or n == 1):
            return RationalInterval(lo, hi)
        if n == 1:
            break
        mid = (lo + hi) / 2
        if count_roots(sf, RationalInterval(mid, hi)) >= 1:
            lo = mid
        else:
            hi = mid
    # single simple root in [lo, hi]: sign bisection is enough
    if sign_at(sf, hi) == 0:
        return RationalInterval(hi, hi)
    if sign_at(sf, lo) == 0:
        return RationalInterval(lo, lo)
    s_hi = sign_at(sf, hi)
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = sign_at(sf, mid)
        if s == 0:
            return RationalInterval(mid, mid)
        if s == s_hi:
            hi = mid
        else:
            lo = mid
    return RationalInterval(lo, hi)


def minimal_polynomial(c: Sequence[int], iv: RationalInterval) -> Coeffs:
    """Irreducible factor of ``c`` vanishing at the unique root of ``c`` in ``iv``."""
    if count_roots(squarefree(c), iv) != 1:
        raise ValueError("interval does not isolate a single root")
    hits = [f for f in irreducible_factors(c) if count_roots(f, iv) == 1]
    if len(hits) != 1:
        raise ArithmeticError("could not identify the minimal polynomial")
    return hits[0]


def rational_root(c: Sequence[int]) -> Fraction | None:
    """The root of a degree-one polynomial, else ``None``."""
    c = trim(c)
    if len(c) != 2:
        return None
    return Fraction(-c[0], c[1])


def series(num: Sequence[int], den: Sequence[int], n_max: int) -> Coeffs:
    """Power-series coefficients ``a_0..a_{n_max}`` of ``num/den`` (``den[0] == 1``)."""
    den = trim(den)
    if not den or den[0] != 1:
        raise ValueError("denominator must have constant term 1")
    out = []
    for n in range(n_max + 1):
        acc = num[n] if n < len(num) else 0
        for j in range(1, min(n, len(den) - 1) + 1):
            acc -= den[j] * out[n - j]
        out.append(acc)
    return tuple(out)


def derivative(c: Sequence[int]) -> Coeffs:
    return trim(i * x for i, x in enumerate(c))[1:] if len(c) > 1 else ()


def smallest_positive_root(c: Sequence[int], width: Fraction) -> RationalInterval | None:
    """Isolating interval (width <= ``width``) for the least positive root, or None."""
    p = to_sympy(c).sqf_part()
    if p.degree() < 1:
        return None
    best = None
    for (a, b), _ in p.intervals():
        a, b = Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q))
        if b <= 0:
            continue
        if a <= 0 < b and p.eval(0) != 0:
            # interval straddles zero: it still isolates a single root; split it
            if p.count_roots(0, _r(b)) == 0:
                continue
            a = Fraction(0)
        if best is None or a < best[0]:
            best = (a, b)
    if best is None:
        return None
    a, b = best
    if a == b:
        return RationalInterval(a, b)
    s_b = sign_at(p_coeffs := from_sympy(p), b)
    if s_b == 0:
        return RationalInterval(b, b)
    while b - a > width:
        mid = (a + b) / 2
        s = sign_at(p_coeffs, mid)
        if s == 0:
            return RationalInterval(mid, mid)
        if s == s_b:
            b = mid
        else:
            a = mid
    return RationalInterval(a, b)
