"""Certified entropy intervals and periodic-orbit censuses.

Floating point is used only to *propose* a positive test vector; every
reported bound is then recomputed exactly.  For an irreducible nonnegative
matrix ``A`` and any positive vector ``v``::

    min_i (Av)_i / v_i  <=  lambda(A)  <=  max_i (Av)_i / v_i

(Collatz-Wielandt).  When the spectral radius is also needed as an algebraic
number, its minimal polynomial is read off the characteristic polynomial.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

import networkx as nx
import numpy as np

from . import poly
from .graph import DirectedMultigraph, essential
from .rational import RationalInterval, ceil_dyadic, fraction_str, log_interval

DEFAULT_TOL = Fraction(1, 2**40)
PRECISION_FLOOR = Fraction(1, 2**200)
EXACT_DIM_CAP = 64
DENSE_DIM_CAP = 2500

Rows = Sequence[dict]


class EmptyShiftError(ValueError):
    pass


@dataclass(frozen=True)
class EntropyBound:
    """Bounds on ``lambda`` and on the entropy ``log lambda``.

    ``interval`` is ``None`` for the empty shift (entropy ``-inf``).
    ``lambda_poly`` is the minimal polynomial of ``lambda`` (low degree first)
    when exactness was requested and certified.
    """

    interval: RationalInterval | None
    lambda_interval: RationalInterval
    lambda_poly: tuple[int, ...] | None = None
    witness: tuple[Fraction, ...] | None = field(default=None, compare=False, repr=False)
    witness_rayleigh: Fraction | None = field(default=None, compare=False, repr=False)
    refine: Callable[[Fraction], "EntropyBound"] | None = field(default=None, compare=False, repr=False)

    @classmethod
    def empty(cls) -> EntropyBound:
        return cls(None, RationalInterval.point(0), None)

    @classmethod
    def from_lambda(
        cls,
        lam: RationalInterval,
        tol: Fraction = DEFAULT_TOL,
        lambda_poly: tuple[int, ...] | None = None,
        **extra,
    ) -> EntropyBound:
        exact = poly.rational_root(lambda_poly) if lambda_poly else None
        if exact is not None:
            lam = RationalInterval.point(exact)
        bits = max(8, -math.floor(math.log2(tol)) + 3) if tol > 0 else 64
        return cls(log_interval(lam, bits), lam, lambda_poly, **extra)

    @property
    def is_empty(self) -> bool:
        return self.interval is None

    @property
    def exact(self) -> bool:
        return self.lambda_poly is not None

    @property
    def exact_lambda(self) -> Fraction | None:
        return poly.rational_root(self.lambda_poly) if self.lambda_poly else None

    def with_refiner(self, refine: Callable[[Fraction], EntropyBound]) -> EntropyBound:
        return replace(self, refine=refine)

    def to_json(self) -> dict:
        if self.interval is None:
            return {"log_lo": "-inf", "log_hi": "-inf", "lambda_poly": None, "empty": True}
        return {
            "log_lo": fraction_str(self.interval.lo),
            "log_hi": fraction_str(self.interval.hi),
            "lambda_lo": fraction_str(self.lambda_interval.lo),
            "lambda_hi": fraction_str(self.lambda_interval.hi),
            "lambda_poly": list(self.lambda_poly) if self.lambda_poly else None,
            "exact_lambda": fraction_str(self.exact_lambda) if self.exact_lambda is not None else None,
            "approx_entropy": f"{self.interval.approx():.12g}",
        }


# --- Collatz-Wielandt machinery ---------------------------------------------

def _nontrivial_components(rows: Rows) -> list[list[int]]:
    g = nx.DiGraph()
    g.add_nodes_from(range(len(rows)))
    for i, r in enumerate(rows):
        for j, v in r.items():
            if v:
                g.add_edge(i, j)
    comps = []
    for c in nx.strongly_connected_components(g):
        c = sorted(c)
        if len(c) > 1 or rows[c[0]].get(c[0], 0):
            comps.append(c)
    comps.sort()
    return comps


def _restrict(rows: Rows, comp: list[int]) -> list[dict[int, int]]:
    pos = {v: i for i, v in enumerate(comp)}
    return [{pos[j]: m for j, m in rows[v].items() if j in pos and m} for v in comp]


def collatz_wielandt(rows: Rows, v: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """Exact ``(min, max)`` of ``(Av)_i / v_i``; ``v`` must be positive."""
    lo = hi = None
    for i, r in enumerate(rows):
        if v[i] <= 0:
            raise ValueError("test vector must be positive")
        ratio = sum((m * v[j] for j, m in r.items()), Fraction(0)) / v[i]
        lo = ratio if lo is None or ratio < lo else lo
        hi = ratio if hi is None or ratio > hi else hi
    return lo, hi


def _dense(rows: Rows) -> np.ndarray:
    n = len(rows)
    a = np.zeros((n, n))
    for i, r in enumerate(rows):
        for j, m in r.items():
            a[i, j] = float(m)
    return a


def _propose(rows: Rows) -> tuple[float, np.ndarray]:
    n = len(rows)
    if n == 1:
        return float(rows[0].get(0, 0)), np.ones(1)
    a = _dense(rows)
    scale = np.abs(a).max() or 1.0
    vals, vecs = np.linalg.eig(a / scale)
    k = int(np.argmax(vals.real))
    v = np.abs(vecs[:, k].real)
    # a few shifted power steps repair tiny/zero entries of the eigensolver output
    positive = v[v > 0]
    floor = positive.min() * 1e-3 if positive.size else 1.0
    v = np.where(v > 0, v, floor)
    shifted = a / scale + np.eye(n)
    for _ in range(8):
        v = shifted @ v
        v /= v.max()
    return float(vals[k].real) * scale, v


def _to_fractions(v: np.ndarray) -> list[Fraction]:
    out = []
    for x in v:
        x = float(x)
        if not x > 0 or not math.isfinite(x):
            x = 1e-300
        out.append(Fraction(x))
    return out


def _newton_step(rows: Rows, a: np.ndarray, lam: Fraction, v: list[Fraction], bits: int):
    """One defect-correction step for the eigenpair; residual computed exactly."""
    n = len(rows)
    resid = [
        sum((m * v[j] for j, m in r.items()), Fraction(0)) - lam * v[i] for i, r in enumerate(rows)
    ]
    s = max(abs(x) for x in resid)
    if s == 0:
        return lam, v, True
    vmax = max(v)
    k = max(range(n), key=lambda i: v[i])
    j = np.zeros((n + 1, n + 1))
    j[:n, :n] = a - float(lam) * np.eye(n)
    j[:n, n] = -np.array([float(x / vmax) for x in v])
    j[n, k] = 1.0
    rhs = np.zeros(n + 1)
    rhs[:n] = [-float(x / s) for x in resid]
    try:
        sol = np.linalg.solve(j, rhs)
    except np.linalg.LinAlgError:
        return lam, v, True
    scale = s
    new_v = []
    for i in range(n):
        x = v[i] + Fraction(float(sol[i])) * scale
        new_v.append(x)
    new_lam = lam + Fraction(float(sol[n])) * scale / vmax
    new_v = [ceil_dyadic(x, bits) if x > 0 else x for x in new_v]
    return new_lam, new_v, False


@dataclass
class _ComponentState:
    rows: list[dict[int, int]]
    lam: Fraction
    v: list[Fraction]
    lo: Fraction
    hi: Fraction
    dense: np.ndarray | None = None

    def refine(self, width: Fraction, max_steps: int = 40) -> None:
        if len(self.rows) > DENSE_DIM_CAP:
            return
        if self.dense is None:
            self.dense = _dense(self.rows)
        bits = max(64, -math.floor(math.log2(width)) + 40) if width > 0 else 256
        for _ in range(max_steps):
            if self.hi - self.lo <= width:
                return
            lam, v, done = _newton_step(self.rows, self.dense, self.lam, self.v, bits)
            if any(x <= 0 for x in v):
                return
            lo, hi = collatz_wielandt(self.rows, v)
            if hi - lo < self.hi - self.lo:
                self.lo, self.hi, self.v = lo, hi, v
            self.lam = lam
            if done:
                return


def _component_state(rows: list[dict[int, int]]) -> _ComponentState:
    lam_f, vf = _propose(rows)
    v = _to_fractions(vf)
    lo, hi = collatz_wielandt(rows, v)
    return _ComponentState(rows, Fraction(lam_f) if math.isfinite(lam_f) else hi, v, lo, hi)


def _lambda_width_for(tol: Fraction, lam_lo: Fraction) -> Fraction:
    # log(hi/lo) <= (hi-lo)/lo, and the log enclosure adds at most tol/4
    return tol * max(lam_lo, Fraction(1, 2**30)) / 2


def perron_bound_rows(
    rows: Rows, tol: Fraction = DEFAULT_TOL, exact: bool = True, allow_empty: bool = False
) -> EntropyBound:
    """Spectral radius bounds for a nonnegative integer matrix in sparse rows."""
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    comps = _nontrivial_components(rows)
    if not comps:
        if allow_empty:
            return EntropyBound.empty()
        raise EmptyShiftError("empty shift has no entropy")
    states = [_component_state(_restrict(rows, c)) for c in comps]

    def contenders() -> list[_ComponentState]:
        top = max(s.lo for s in states)
        return [s for s in states if s.hi >= top]

    width = _lambda_width_for(tol, max(s.lo for s in states))
    for s in contenders():
        s.refine(width)
    live = contenders()
    lam_lo = max(s.lo for s in states)
    lam_hi = max(s.hi for s in live)
    lam_iv = RationalInterval(lam_lo, lam_hi)

    min_poly = None
    cw_derived = True
    if exact and sum(len(s.rows) for s in live) <= EXACT_DIM_CAP:
        cp = (1,)
        for s in live:
            cp = poly.mul(cp, poly.charpoly(s.rows))
        sf = poly.squarefree(cp)
        while poly.count_roots(sf, lam_iv) != 1:
            narrower = poly.refine_largest_root(sf, lam_iv, lam_iv.width / 4, isolate=False)
            for s in live:
                s.refine(narrower.width / 2)
            live = contenders()
            cw = RationalInterval(max(s.lo for s in states), max(s.hi for s in live))
            if cw.width < narrower.width:
                lam_iv = cw
            else:
                lam_iv, cw_derived = narrower, False  # eigenvector refinement stalled
        min_poly = poly.minimal_polynomial(sf, lam_iv)
        if lam_iv.width > width:
            lam_iv, cw_derived = poly.refine_largest_root(min_poly, lam_iv, width), False

    best = max(states, key=lambda s: s.lo)
    extra = {}
    if cw_derived and not (poly.rational_root(min_poly or ()) is not None and not lam_iv.is_point()):
        num = sum(
            (best.v[i] * sum((m * best.v[j] for j, m in r.items()), Fraction(0)) for i, r in enumerate(best.rows)),
            Fraction(0),
        )
        extra = {"witness": tuple(best.v), "witness_rayleigh": num / sum((x * x for x in best.v), Fraction(0))}
    return EntropyBound.from_lambda(lam_iv, tol, min_poly, **extra)


def perron_bound(
    g: DirectedMultigraph, tol: Fraction = DEFAULT_TOL, exact: bool = True, allow_empty: bool = False
) -> EntropyBound:
    """Certified entropy of ``Σ(g)`` with a refiner attached."""
    core = essential(g)
    if core.is_empty():
        if allow_empty:
            return EntropyBound.empty()
        raise EmptyShiftError("empty shift has no entropy")
    rows = core.sparse_rows()
    bound = perron_bound_rows(rows, tol, exact)
    return bound.with_refiner(lambda t: perron_bound_rows(rows, t, exact).with_refiner(bound.refine))


# --- orbit census ------------------------------------------------------------

def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius is defined on positive integers")
    result, p, m = 1, 2, n
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    return -result if m > 1 else result


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


@dataclass(frozen=True)
class OrbitCensus:
    """Fixed-point counts ``tr(A^n)`` and least-period counts ``|P^o_n|``."""

    n_max: int
    traces: tuple[int, ...]
    least_period_points: tuple[int, ...]
    orbit_counts: tuple[int, ...]

    @classmethod
    def from_traces(cls, traces: Sequence[int]) -> OrbitCensus:
        traces = tuple(int(t) for t in traces)
        n_max = len(traces)
        least = []
        for n in range(1, n_max + 1):
            least.append(sum(mobius(n // d) * traces[d - 1] for d in divisors(n)))
        for n, p in enumerate(least, 1):
            if p < 0 or p % n:
                raise ArithmeticError(f"inconsistent trace sequence at n={n}")
        return cls(n_max, traces, tuple(least), tuple(p // n for n, p in enumerate(least, 1)))

    def points(self, n: int) -> int:
        """``|P^o_n|``."""
        return self.least_period_points[n - 1]

    def to_json(self) -> dict:
        return {
            "n_max": self.n_max,
            "traces": [str(t) for t in self.traces],
            "least_period_points": [str(p) for p in self.least_period_points],
            "orbit_counts": [str(c) for c in self.orbit_counts],
        }


def traces_from_rows(rows: Rows, n_max: int) -> list[int]:
    n = len(rows)
    totals = [0] * n_max
    items = [list(r.items()) for r in rows]
    for start in range(n):
        vec = {start: 1}
        for k in range(n_max):
            nxt: dict[int, int] = {}
            for i, c in vec.items():
                for j, m in items[i]:
                    nxt[j] = nxt.get(j, 0) + c * m
            vec = nxt
            totals[k] += vec.get(start, 0)
    return totals


def orbit_census(g: DirectedMultigraph, n_max: int) -> OrbitCensus:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    return OrbitCensus.from_traces(traces_from_rows(g.sparse_rows(), n_max))


# --- comparisons -------------------------------------------------------------

class Comparison(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    UNDETERMINED = "undetermined"

    def flip(self) -> Comparison:
        return {Comparison.LESS: Comparison.GREATER, Comparison.GREATER: Comparison.LESS}.get(self, self)


@dataclass(frozen=True)
class ComparisonResult:
    outcome: Comparison
    a: EntropyBound
    b: EntropyBound
    certificate: dict

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "a": self.a.to_json(),
            "b": self.b.to_json(),
            "certificate": self.certificate,
        }


def _algebraic_equal(a: EntropyBound, b: EntropyBound) -> bool | None:
    """True/False when the minimal polynomials settle the question, else None."""
    if not (a.lambda_poly and b.lambda_poly):
        return None
    if a.lambda_poly != b.lambda_poly:
        return False  # distinct irreducible polynomials share no root
    if not a.lambda_interval.overlaps(b.lambda_interval):
        return False
    hull = a.lambda_interval.hull(b.lambda_interval)
    if poly.count_roots(a.lambda_poly, hull) == 1:
        return True
    return None


def compare_entropy_detailed(
    a: EntropyBound,
    b: EntropyBound,
    refine_a: Callable[[Fraction], EntropyBound] | None = None,
    refine_b: Callable[[Fraction], EntropyBound] | None = None,
    floor: Fraction = PRECISION_FLOOR,
) -> ComparisonResult:
    refine_a = refine_a or a.refine
    refine_b = refine_b or b.refine
    if a.is_empty or b.is_empty:
        if a.is_empty and b.is_empty:
            return ComparisonResult(Comparison.EQUAL, a, b, {"reason": "both empty"})
        out = Comparison.LESS if a.is_empty else Comparison.GREATER
        return ComparisonResult(out, a, b, {"reason": "empty shift"})
    tol = max(a.interval.width, b.interval.width, Fraction(1, 2**20))
    while True:
        ia, ib = a.lambda_interval, b.lambda_interval
        if ia.strictly_below(ib):
            return ComparisonResult(Comparison.LESS, a, b, {"reason": "separated intervals"})
        if ia.strictly_above(ib):
            return ComparisonResult(Comparison.GREATER, a, b, {"reason": "separated intervals"})
        alg = _algebraic_equal(a, b)
        if alg:
            return ComparisonResult(
                Comparison.EQUAL,
                a,
                b,
                {
                    "reason": "shared minimal polynomial with a single root in the interval hull",
                    "lambda_poly": list(a.lambda_poly),
                    "hull": ia.hull(ib).to_json(),
                },
            )
        if tol < floor or (refine_a is None and refine_b is None):
            return ComparisonResult(
                Comparison.UNDETERMINED, a, b, {"reason": "intervals overlap at the precision floor"}
            )
        tol = tol / 2**16
        if refine_a is not None and a.interval.width > tol:
            a = refine_a(tol)
        if refine_b is not None and b.interval.width > tol:
            b = refine_b(tol)


def compare_entropy(
    a: EntropyBound,
    b: EntropyBound,
    refine_a: Callable[[Fraction], EntropyBound] | None = None,
    refine_b: Callable[[Fraction], EntropyBound] | None = None,
    floor: Fraction = PRECISION_FLOOR,
) -> Comparison:
    return compare_entropy_detailed(a, b, refine_a, refine_b, floor).outcome


def disjoint_union_bound(bounds: Sequence[EntropyBound], tol: Fraction = DEFAULT_TOL) -> EntropyBound:
    """Entropy of a disjoint union: the maximum of the parts."""
    live = [b for b in bounds if not b.is_empty]
    if not live:
        return EntropyBound.empty()
    lo = max(b.lambda_interval.lo for b in live)
    hi = max(b.lambda_interval.hi for b in live)
    top = [b for b in live if b.lambda_interval.hi >= lo]
    polys = {b.lambda_poly for b in top}
    lam_poly = polys.pop() if len(polys) == 1 and None not in polys else None
    if lam_poly is not None and poly.count_roots(lam_poly, RationalInterval(lo, hi)) != 1:
        lam_poly = None
    return EntropyBound.from_lambda(RationalInterval(lo, hi), tol, lam_poly)
