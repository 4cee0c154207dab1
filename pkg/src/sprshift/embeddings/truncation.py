"""Truncate-and-pad: embed a loop system into a finite loop system of lower entropy target.

Given ``f`` with ``lambda(f) < lambda_target`` we pick rationals ``b < c`` in the
gap, a cut-off ``N``, and pad the truncation ``f^(N)`` with ``2 g_n = 2 ceil(b^n)``
loops for ``N < n <= 2N``:

    p = f^(N) + 2 g^<N>,   h = f^(N) + g^<N>,   k = g^<N>,   q = h (1 + k + k^2 + ...)

``p`` is a polynomial whose loop shift has ``lambda < c``; every ``q``-loop is a
concatenation of ``p``-loops (one ``h``-loop followed by ``k``-loops), and
``f_n <= q_n`` for all ``n`` lets each ``f``-loop be sent to its own ``q``-loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Sequence

from .. import poly
from ..loops import (
    LoopSystem,
    PolynomialLoops,
    TruncationTooLarge,
    loop_entropy,
    loop_graph,
    size_cap,
)
from ..rational import RationalInterval, as_fraction, fraction_str, log_interval, simplest_between
from ..spectra import DEFAULT_TOL, PRECISION_FLOOR, EntropyBound, collatz_wielandt, perron_bound


class ConstructionError(ValueError):
    """A construction could not be completed (exit code 3 in the CLI)."""


class GapTooSmall(ConstructionError):
    pass


class ConstructionInvalid(ConstructionError):
    pass


class InjectionImpossible(ConstructionError):
    pass


MAX_CUTOFF = 1 << 13
ENUMERATION_LIMIT = 4000  # literal composition enumeration up to this many per length


def _ceil_power(b: Fraction, n: int) -> int:
    num, den = b.numerator**n, b.denominator**n
    return -(-num // den)


def _strs(xs: Sequence[int]) -> list[str]:
    return [str(x) for x in xs]


@dataclass(frozen=True)
class TruncationPlan:
    """Parameters and exact coefficients of one truncate-and-pad construction.

    ``p_coeffs[n-1] = p_n``; ``g_coeffs[j] = g_{N+1+j}``; ``f_coeffs`` holds
    ``f_1..f_{2N+1}`` (every coefficient the certificates looked at).
    """

    source: LoopSystem
    lambda_target: Fraction
    lambda_source: RationalInterval
    b: Fraction
    c: Fraction
    N: int
    f_coeffs: tuple[int, ...]
    g_coeffs: tuple[int, ...]
    p_coeffs: tuple[int, ...]
    rouche_lhs: Fraction  # 2 g^<N>(1/c)
    rouche_rhs: Fraction  # 1 - f^(N)(1/c)
    padded: bool
    certificates: dict = field(default_factory=dict, compare=False)

    @property
    def beta(self) -> RationalInterval:
        return log_interval(self.b)

    @property
    def gamma(self) -> RationalInterval:
        return log_interval(self.c)

    @property
    def rouche_margin(self) -> Fraction:
        return self.rouche_rhs - self.rouche_lhs

    def g(self, n: int) -> int:
        """``g_n`` for ``N < n <= 2N``, zero elsewhere."""
        if self.N < n <= 2 * self.N and self.padded:
            return self.g_coeffs[n - self.N - 1]
        return 0

    def f(self, n: int) -> int:
        return self.f_coeffs[n - 1] if n <= len(self.f_coeffs) else self.source.coeff(n)

    def p_poly(self) -> PolynomialLoops:
        return PolynomialLoops(self.p_coeffs)

    def to_json(self) -> dict[str, Any]:
        return {
            "source": self.source.to_json(),
            "lambda_target": fraction_str(self.lambda_target),
            "lambda_source": self.lambda_source.to_json(),
            "b": fraction_str(self.b),
            "c": fraction_str(self.c),
            "beta": self.beta.to_json(),
            "gamma": self.gamma.to_json(),
            "N": str(self.N),
            "padded": self.padded,
            "g_coeffs": _strs(self.g_coeffs),
            "p_coeffs": _strs(self.p_coeffs),
            "rouche": {
                "lhs_2g_at_inv_c": fraction_str(self.rouche_lhs),
                "rhs_1_minus_fN_at_inv_c": fraction_str(self.rouche_rhs),
                "margin": fraction_str(self.rouche_margin),
                "holds": self.rouche_margin > 0,
            },
            "certificates": self.certificates,
        }


def _certified_gap(f: LoopSystem, target: Fraction, tol: Fraction) -> EntropyBound:
    ent = loop_entropy(f, tol)
    t = tol
    while not ent.lambda_interval.hi < target:
        if ent.lambda_interval.lo >= target or t < PRECISION_FLOOR:
            raise GapTooSmall(
                f"gap too small: lambda(f) in [{ent.lambda_interval.lo}, {ent.lambda_interval.hi}]"
                f" is not certified below {target}"
            )
        t = t / 2**16
        ent = ent.refine(t)
    return ent


def _padding_check(f: Sequence[int], b: Fraction, c: Fraction, N: int) -> dict | None:
    """All exact conditions for cut-off ``N``; returns the evidence or None."""
    inv_c = 1 / c
    f_n = poly.evaluate((0,) + tuple(f[:N]), inv_c)
    g = [_ceil_power(b, n) for n in range(N + 1, 2 * N + 1)]
    g_val = poly.evaluate((0,) * (N + 1) + tuple(g), inv_c)
    lhs, rhs = 2 * g_val, 1 - f_n
    if not lhs < rhs:
        return None
    for n in range(1, 2 * N + 2):
        if not f[n - 1] < b**n:
            return None
    # length 2N+1 is the only length where 1 + k + k^2 + ... vanishes beyond N
    q_odd = sum(f[a - 1] * g[2 * N + 1 - a - N - 1] for a in range(1, N + 1))
    if q_odd < f[2 * N]:
        return None
    return {"g": tuple(g), "lhs": lhs, "rhs": rhs, "q_2N_plus_1": q_odd}


def choose_truncation(
    f: LoopSystem,
    lambda_target: Fraction | int | str,
    pad_polynomial: bool = True,
    tol: Fraction = DEFAULT_TOL,
) -> TruncationPlan:
    """Choose ``b, c, N`` and the padded polynomial ``p`` for ``f`` below ``lambda_target``."""
    target = as_fraction(lambda_target)
    ent = _certified_gap(f, target, Fraction(tol))
    lam = ent.lambda_interval
    gap = target - lam.hi
    b = simplest_between(lam.hi + gap / 4, lam.hi + gap * 5 / 12)
    c = simplest_between(lam.hi + gap * 7 / 12, lam.hi + gap * 3 / 4)
    base_certs = {
        "order": "lambda_hi < b < c < lambda_target",
        "lambda_hi": fraction_str(lam.hi),
        "coeff_tail": "f_n <= lambda^n <= lambda_hi^n < b^n for every n",
    }

    if isinstance(f, PolynomialLoops) and not pad_polynomial:
        d = f.degree
        fs = f.coeffs(2 * d + 1)
        rhs = 1 - poly.evaluate(f.as_poly(), 1 / c)
        certs = dict(base_certs, note="polynomial source used as is; no padding")
        return TruncationPlan(f, target, lam, b, c, d, fs, (), fs[:d], Fraction(0), rhs, False, certs)

    first = next((n for n, x in enumerate(f.coeffs(64), 1) if x), 1)
    lo_fail, N = 0, max(1, first)
    evidence = None
    while N <= MAX_CUTOFF:
        evidence = _padding_check(f.coeffs(2 * N + 1), b, c, N)
        if evidence:
            break
        lo_fail, N = N, 2 * N
    if not evidence:
        raise ConstructionInvalid("no admissible cut-off N found below the search limit")
    # shrink towards the least passing N found by bisection on the doubling bracket
    hi_ok = N
    while hi_ok - lo_fail > 1:
        mid = (lo_fail + hi_ok) // 2
        ev = _padding_check(f.coeffs(2 * mid + 1), b, c, mid) if mid >= first else None
        if ev:
            hi_ok, evidence = mid, ev
        else:
            lo_fail = mid
    N = hi_ok
    fs = f.coeffs(2 * N + 1)
    g = evidence["g"]
    p = tuple(fs[:N]) + tuple(2 * x for x in g)
    certs = dict(
        base_certs,
        coeff_bound_checked_to=str(2 * N + 1),
        q_2N_plus_1=str(evidence["q_2N_plus_1"]),
        f_2N_plus_1=str(fs[2 * N]),
        q_domination=(
            "n<=N: q_n=f_n; N<n<=2N: q_n>=g_n>=b^n>f_n; n=2N+1: checked; "
            "n>=2N+2: q_n>=(k^j)_n>=b^n>f_n"
        ),
    )
    return TruncationPlan(f, target, lam, b, c, N, fs, g, p, evidence["lhs"], evidence["rhs"], True, certs)


# --- padded entropy ----------------------------------------------------------------

def compressed_loop_rows(p: Sequence[int]) -> list[dict[int, int]]:
    """Graph whose first returns to vertex 0 are exactly the ``p``-loops.

    ``p_n`` parallel edges ``0 -> n-1`` followed by the chain ``n-1 -> ... -> 0``;
    it has ``deg p`` vertices instead of ``sum n p_n``.
    """
    d = len(p)
    rows: list[dict[int, int]] = [dict() for _ in range(d)]
    for n, c in enumerate(p, 1):
        if c:
            rows[0][n - 1] = rows[0].get(n - 1, 0) + c
    for j in range(1, d):
        rows[j][j - 1] = 1
    return rows


@dataclass(frozen=True)
class PaddedCertificate:
    bound: EntropyBound
    presentation: str
    size: int
    p_at_inv_c: Fraction
    literal_bound: EntropyBound | None

    def to_json(self) -> dict[str, Any]:
        return {
            "lambda_p": self.bound.lambda_interval.to_json(),
            "log_lambda_p": self.bound.interval.to_json(),
            "presentation": self.presentation,
            "size": str(self.size),
            "p_at_inv_c": fraction_str(self.p_at_inv_c),
            "literal_loop_graph_checked": self.literal_bound is not None,
        }


def geometric_cw_bounds(rows: Sequence[dict[int, int]], mu: Fraction) -> tuple[Fraction, Fraction]:
    """Collatz-Wielandt bounds for the compressed loop graph with test vector ``v_j = mu^-j``.

    Integer scaling ``v_j = a^(D-1-j) d^j`` for ``mu = a/d`` keeps the check exact.
    """
    a, d = mu.numerator, mu.denominator
    D = len(rows)
    v = [a ** (D - 1 - j) * d**j for j in range(D)]
    return collatz_wielandt(rows, v)


def certify_padded_entropy(
    plan: TruncationPlan, tol: Fraction = DEFAULT_TOL, cap: int | None = None
) -> PaddedCertificate:
    """Certify ``lambda(sigma_p) < c`` on a graph presentation of ``sigma_p``.

    Bisection on ``mu``: each step checks the Collatz-Wielandt ratios of an
    explicit positive vector row by row, so ``[lo, hi]`` brackets the Perron
    root without using the Rouché inequality.
    """
    p = plan.p_coeffs
    rows = compressed_loop_rows(p)
    lo, hi = Fraction(1), plan.c
    if geometric_cw_bounds(rows, lo)[0] < 1:
        raise ConstructionInvalid("construction invalid: padded system has no loops")
    if not geometric_cw_bounds(rows, hi)[1] <= hi:
        raise ConstructionInvalid(f"construction invalid: lambda(sigma_p) is not below c = {plan.c}")
    width = Fraction(tol) / 4
    while hi == plan.c or hi - lo > width:
        mid = (lo + hi) / 2
        mid = simplest_between(mid - (hi - lo) / 8, mid + (hi - lo) / 8)
        cw_lo, cw_hi = geometric_cw_bounds(rows, mid)
        if cw_hi <= mid:
            hi = mid
        elif cw_lo >= mid:
            lo = mid
        else:
            raise ConstructionInvalid("construction invalid: test vector gives no bound")
    bound = EntropyBound.from_lambda(RationalInterval(lo, hi), Fraction(tol))
    p_val = poly.evaluate((0,) + tuple(p), 1 / plan.c)
    literal = None
    loops = sum(n * x for n, x in enumerate(p, 1))
    if loops <= size_cap(cap):
        literal = perron_bound(loop_graph(plan.p_poly(), len(p), cap), tol, exact=False)
        if not literal.lambda_interval.overlaps(bound.lambda_interval):
            raise ConstructionInvalid("construction invalid: loop graph and compressed graph disagree")
    if plan.padded and not (plan.rouche_lhs < plan.rouche_rhs and p_val < 1):
        raise ConstructionInvalid("construction invalid: Rouché inequality does not hold")
    return PaddedCertificate(bound, "compressed loop graph", len(rows), p_val, literal)


# --- loop coding ----------------------------------------------------------------------

Label = tuple[int, int]
Descriptor = tuple[Label, ...]


@dataclass(frozen=True)
class LoopCoding:
    """Coefficients of ``h, k, q`` and the injection of ``f``-loops into ``q``-loops.

    ``p``-loop labels are ``(length, index)`` with ``1 <= index <= p_n``.  The
    ``h``-copies use indices ``1..h_n`` and the extra ``k``-copies of a padded
    length ``n`` use ``g_n + 1 .. 2 g_n``.  A ``q``-loop is a descriptor: one
    head (an ``h``-copy) followed by zero or more ``k``-copies.
    """

    plan: TruncationPlan
    n_cap: int
    head_coeffs: tuple[int, ...]  # h_1 .. h_{2N}
    tail_coeffs: tuple[int, ...]  # k_1 .. k_{2N}
    tail_series: tuple[int, ...]  # (1 + k + k^2 + ...)_0 .. _{n_cap}
    q_coeffs: tuple[int, ...]  # q_1 .. q_{n_cap}
    source_coeffs: tuple[int, ...]  # f_1 .. f_{n_cap}
    injection: tuple[tuple[int, int, Descriptor], ...]
    checks: dict = field(default_factory=dict, compare=False)

    @property
    def N(self) -> int:
        return self.plan.N

    def h(self, n: int) -> int:
        return self.head_coeffs[n - 1] if 1 <= n <= len(self.head_coeffs) else 0

    def k(self, n: int) -> int:
        return self.tail_coeffs[n - 1] if 1 <= n <= len(self.tail_coeffs) else 0

    def tail(self, m: int) -> int:
        return self.tail_series[m]

    def table(self) -> dict[Label, Descriptor]:
        return {(n, i): d for n, i, d in self.injection}

    def to_json(self) -> dict[str, Any]:
        return {
            "N": str(self.N),
            "n_cap": str(self.n_cap),
            "head_coeffs": _strs(self.head_coeffs),
            "tail_coeffs": _strs(self.tail_coeffs),
            "q_coeffs": _strs(self.q_coeffs),
            "source_coeffs": _strs(self.source_coeffs),
            "injection": [[str(n), str(i), [[str(a), str(j)] for a, j in d]] for n, i, d in self.injection],
            "checks": self.checks,
        }

    # canonical order: head (length, index) ascending, then tails lexicographically

    def unrank(self, n: int, r: int) -> Descriptor:
        """The ``r``-th (0-based) canonical ``q``-loop of length ``n``."""
        if not 0 <= r < self.q_coeffs[n - 1]:
            raise IndexError("rank out of range")
        for a in range(1, min(n, 2 * self.N) + 1):
            block = self.tail(n - a)
            if not block:
                continue
            if r < self.h(a) * block:
                return ((a, r // block + 1),) + self._unrank_tail(n - a, r % block)
            r -= self.h(a) * block
        raise AssertionError("rank bookkeeping broken")

    def _unrank_tail(self, t: int, r: int) -> Descriptor:
        out: list[Label] = []
        while t:
            for b in range(self.N + 1, min(t, 2 * self.N) + 1):
                block = self.tail(t - b)
                if r < self.k(b) * block:
                    out.append((b, self.plan.g(b) + r // block + 1))
                    r %= block
                    t -= b
                    break
                r -= self.k(b) * block
            else:
                raise AssertionError("rank bookkeeping broken")
        return tuple(out)

    def rank(self, d: Descriptor) -> tuple[int, int]:
        """Inverse of :meth:`unrank`: ``(length, rank)``."""
        n = sum(a for a, _ in d)
        if not d or not 1 <= d[0][1] <= self.h(d[0][0]):
            raise ValueError("descriptor does not start with a head loop")
        a, i = d[0]
        r = sum(self.h(x) * self.tail(n - x) for x in range(1, a))
        r += (i - 1) * self.tail(n - a)
        t = n - a
        for b, j in d[1:]:
            g = self.plan.g(b)
            if not (self.k(b) and g < j <= 2 * g):
                raise ValueError("descriptor tail is not a padding loop")
            r += sum(self.k(x) * self.tail(t - x) for x in range(self.N + 1, b))
            r += (j - g - 1) * self.tail(t - b)
            t -= b
        return n, r

    def compositions(self, n: int) -> Iterator[Descriptor]:
        """All ``q``-loops of length ``n`` in canonical order (literal enumeration)."""
        for a in range(1, min(n, 2 * self.N) + 1):
            for i in range(1, self.h(a) + 1):
                for rest in self._tails(n - a):
                    yield ((a, i),) + rest

    def _tails(self, t: int) -> Iterator[Descriptor]:
        if t == 0:
            yield ()
            return
        for b in range(self.N + 1, min(t, 2 * self.N) + 1):
            g = self.plan.g(b)
            for j in range(g + 1, g + self.k(b) + 1):
                for rest in self._tails(t - b):
                    yield ((b, j),) + rest


def _geometric_powers(k: Sequence[int], n_cap: int) -> tuple[int, ...]:
    """``(1 + k + k^2 + ...)`` truncated at degree ``n_cap`` by summing powers."""
    total = [0] * (n_cap + 1)
    total[0] = 1
    power: tuple[int, ...] = (1,)
    kp = (0,) + tuple(k)
    while True:
        power = poly.mul(power, kp, cap=n_cap)
        if not power:
            break
        for i, x in enumerate(power):
            total[i] += x
    return tuple(total)


def _tail_recursion(k: Sequence[int], n_cap: int) -> tuple[int, ...]:
    """Same series by counting sequences through their first loop."""
    t = [1] + [0] * n_cap
    for m in range(1, n_cap + 1):
        t[m] = sum(k[b - 1] * t[m - b] for b in range(1, min(m, len(k)) + 1))
    return tuple(t)


def build_loop_coding(plan: TruncationPlan, n_cap: int | None = None, cap: int | None = None) -> LoopCoding:
    N = plan.N
    n_cap = 2 * N if n_cap is None else int(n_cap)
    if n_cap < N:
        raise ValueError("n_cap must be at least N")
    D = max(2 * N, N)
    h = tuple(plan.f(n) if n <= N else plan.g(n) for n in range(1, D + 1))
    k = tuple(plan.g(n) for n in range(1, D + 1))
    t_conv = _geometric_powers(k, n_cap)
    t_rec = _tail_recursion(k, n_cap)
    if t_conv != t_rec:
        raise ConstructionInvalid("construction invalid: tail series disagree")
    q_conv = poly.mul((0,) + h, t_conv, cap=n_cap)
    q_conv = tuple(q_conv[1:]) + (0,) * (n_cap - len(q_conv) + 1)
    # per-head counting, the bookkeeping unrank relies on
    q_count = tuple(
        sum(h[a - 1] * t_rec[n - a] for a in range(1, min(n, D) + 1)) for n in range(1, n_cap + 1)
    )
    if q_conv != q_count:
        raise ConstructionInvalid("construction invalid: q coefficient identity fails")
    source = plan.source.coeffs(n_cap)
    for n in range(1, n_cap + 1):
        if n <= N and q_conv[n - 1] != source[n - 1]:
            raise ConstructionInvalid(f"construction invalid: q_{n} != f_{n}")
        if source[n - 1] > q_conv[n - 1]:
            raise InjectionImpossible(f"injection impossible: f_{n} > q_{n}")
    if sum(source) > size_cap(cap):
        raise TruncationTooLarge("truncation too large")
    coding = LoopCoding(plan, n_cap, h, k, t_conv, q_conv, source, ())
    table = []
    for n in range(1, n_cap + 1):
        for i in range(1, source[n - 1] + 1):
            table.append((n, i, coding.unrank(n, i - 1)))
    images = {d for _, _, d in table}
    if len(images) != len(table):
        raise ConstructionInvalid("construction invalid: injection table repeats an image")
    for n, _, d in table:
        if sum(a for a, _ in d) != n:
            raise ConstructionInvalid("construction invalid: injection changes a loop length")
    enumerated = []
    for n in range(1, n_cap + 1):
        if q_conv[n - 1] <= ENUMERATION_LIMIT:
            listed = list(coding.compositions(n))
            if len(listed) != q_conv[n - 1] or any(coding.unrank(n, r) != d for r, d in enumerate(listed)):
                raise ConstructionInvalid(f"construction invalid: enumeration disagrees at length {n}")
            enumerated.append(n)
    checks = {
        "tail_series_agree_to": str(n_cap),
        "q_identity_agree_to": str(n_cap),
        "literal_enumeration_lengths": str(len(enumerated)),
        "f_le_q_to": str(n_cap),
        "injective": True,
        "length_preserving": True,
    }
    return LoopCoding(plan, n_cap, h, k, t_conv, q_conv, source, tuple(table), checks)


def encode_point_window(coding: LoopCoding, loops: Sequence[Label]) -> tuple[Label, ...]:
    """Send a window of ``f``-loops to the concatenated ``p``-loops of their images."""
    table = coding.table()
    out: list[Label] = []
    for lab in loops:
        key = (int(lab[0]), int(lab[1]))
        if key not in table:
            raise KeyError(f"unknown source loop {key}")
        out.extend(table[key])
    return tuple(out)


def decode_point_window(coding: LoopCoding, p_loops: Sequence[Label]) -> tuple[Label, ...]:
    """Inverse of :func:`encode_point_window` on its image."""
    groups: list[list[Label]] = []
    for a, j in p_loops:
        if 1 <= j <= coding.h(a):
            groups.append([(a, j)])
        elif groups:
            groups[-1].append((a, j))
        else:
            raise ValueError("window does not start with a head loop")
    out = []
    for grp in groups:
        n, r = coding.rank(tuple(grp))
        if n > coding.n_cap or r >= coding.source_coeffs[n - 1]:
            raise ValueError("window is not in the image of the coding")
        out.append((n, r + 1))
    return tuple(out)
