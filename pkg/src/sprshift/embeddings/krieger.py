"""Embedding conditions between finite graph shifts: entropy and periodic-point counts.

The count condition ``|P^o_n(X)| <= |P^o_n(Y)|`` is checked exactly for
``n <= n_check``.  When the entropy gap is certified, an explicit bound
``B(n) < 1`` for ``n >= n0`` covers every larger ``n``:

* ``|P^o_n(X)| <= tr(A_X^n) <= d_X lx^n`` with ``lx`` an upper bound on ``lambda_X``;
* ``tr(A_Y^n) >= S mu^(n-k)`` where ``A_Y^k > 0``, ``A_Y u >= mu u`` for an
  integer vector ``u`` and ``S = sum_i u_i min_j (A_Y^k)_ji / u_j``;
* ``|P^o_n(Y)| >= tr(A_Y^n) - sum_{d <= n/2} tr(A_Y^d) >= tr(A_Y^n) - d_Y ly^(n//2+1) / (ly - 1)``.

So ``|P^o_n(X)| < |P^o_n(Y)|`` as soon as
``B(n) = (d_X lx^n + d_Y ly^(n//2+1)/(ly-1)) / (S mu^(n-k)) < 1``; with
``lx < mu`` and ``ly < mu^2`` one has ``B(n+2) < B(n)``, so two consecutive
values below 1 settle the tail.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from ..graph import DirectedMultigraph, essential, is_mixing
from ..rational import fraction_str
from ..spectra import Comparison, ComparisonResult, compare_entropy_detailed, orbit_census, perron_bound

TAIL_SEARCH_LIMIT = 600
TAIL_DIM_CAP = 64


@dataclass(frozen=True)
class TailCertificate:
    n0: int
    k: int
    mu: Fraction
    S: Fraction
    lx: Fraction
    ly: Fraction
    d_x: int
    d_y: int

    def bound(self, n: int) -> Fraction:
        num = self.d_x * self.lx**n + self.d_y * self.ly ** (n // 2 + 1) / (self.ly - 1)
        return num / (self.S * self.mu ** (n - self.k))

    def y_lower(self, n: int) -> Fraction:
        """Certified lower bound on ``|P^o_n(Y)| - |P^o_n(X)|``."""
        return self.S * self.mu ** (n - self.k) * (1 - self.bound(n))

    def to_json(self) -> dict[str, Any]:
        return {
            "n0": str(self.n0),
            "primitivity_exponent": str(self.k),
            "mu": fraction_str(self.mu),
            "S": fraction_str(self.S),
            "lambda_x_hi": fraction_str(self.lx),
            "lambda_y_hi": fraction_str(self.ly),
            "dim_x": str(self.d_x),
            "dim_y": str(self.d_y),
        }


def primitivity_exponent(rows: list[list[int]]) -> int | None:
    """Least ``k`` with ``A^k > 0``, or None if the matrix is not primitive."""
    a = np.array(rows, dtype=bool)
    n = len(rows)
    p = a.copy()
    for k in range(1, (n - 1) ** 2 + 2):
        if p.all():
            return k
        p = (p.astype(np.int64) @ a.astype(np.int64)) > 0
    return None


def _int_matpow(a: list[list[int]], k: int) -> list[list[int]]:
    n = len(a)
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(k):
        out = [[sum(out[i][m] * a[m][j] for m in range(n)) for j in range(n)] for i in range(n)]
    return out


def tail_certificate(
    x: DirectedMultigraph, y: DirectedMultigraph, lx: Fraction, ly: Fraction
) -> TailCertificate | None:
    """Explicit ``n0`` past which ``|P^o_n(X)| < |P^o_n(Y)|``, when one can be found."""
    xc, yc = essential(x), essential(y)
    if yc.is_empty() or len(yc.vertices) > TAIL_DIM_CAP or ly <= 1:
        return None
    a = yc.adjacency()
    k = primitivity_exponent(a)
    if k is None:
        return None
    ak = _int_matpow(a, k)
    d_y = len(a)
    d_x = max(len(xc.vertices), 1)
    u = [1] * d_y
    mu = Fraction(0)
    steps = 0
    while steps < 4096:
        for _ in range(max(8, steps)):
            u = [sum(a[i][j] * u[j] for j in range(d_y)) for i in range(d_y)]
        steps += max(8, steps)
        au = [sum(a[i][j] * u[j] for j in range(d_y)) for i in range(d_y)]
        mu = min(Fraction(au[i], u[i]) for i in range(d_y))
        if mu > lx and ly < mu * mu:
            break
    else:
        return None
    if not (mu > lx and ly < mu * mu):
        return None
    S = sum(Fraction(u[i]) * min(Fraction(ak[j][i], u[j]) for j in range(d_y)) for i in range(d_y))
    if S <= 0:
        return None
    cert = TailCertificate(0, k, mu, S, lx, ly, d_x, d_y)
    prev = cert.bound(1) < 1
    for n in range(2, TAIL_SEARCH_LIMIT):
        cur = cert.bound(n) < 1
        if prev and cur:
            return TailCertificate(n - 1, k, mu, S, lx, ly, d_x, d_y)
        prev = cur
    return None


@dataclass(frozen=True)
class EmbeddingCheck:
    """Outcome of the embedding-condition checks for a pair ``X -> Y``."""

    status: str
    holds: bool
    y_mixing: bool
    entropy: ComparisonResult
    n_check: int
    checked_to: int
    x_points: tuple[int, ...]
    y_points: tuple[int, ...]
    x_traces: tuple[int, ...]
    y_traces: tuple[int, ...]
    first_failure: int | None
    tail: TailCertificate | None

    @property
    def point_differences(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.x_points, self.y_points))

    @property
    def trace_differences(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.x_traces, self.y_traces))

    def divergence(self) -> dict[str, Any] | None:
        """Certificate that the point differences tend to infinity."""
        if self.tail is None or self.entropy.outcome is not Comparison.LESS:
            return None
        t = self.tail
        return {
            "from_n": str(t.n0),
            "lower_bound_rule": "S mu^(n-k) (1 - B(n)), increasing without bound",
            "lower_bound_at_n0": fraction_str(t.y_lower(t.n0)),
        }

    def to_json(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "holds": self.holds,
            "y_mixing": self.y_mixing,
            "entropy": self.entropy.to_json(),
            "n_check": str(self.n_check),
            "checked_to": str(self.checked_to),
            "x_points": [str(v) for v in self.x_points],
            "y_points": [str(v) for v in self.y_points],
            "point_differences": [str(v) for v in self.point_differences],
            "trace_differences": [str(v) for v in self.trace_differences],
            "first_failure": None if self.first_failure is None else str(self.first_failure),
            "tail_certificate": self.tail.to_json() if self.tail else None,
            "divergence": self.divergence(),
        }


def krieger_check(x: DirectedMultigraph, y: DirectedMultigraph, n_check: int = 20) -> EmbeddingCheck:
    """Entropy inequality plus periodic-point domination, with a tail certificate."""
    if n_check < 1:
        raise ValueError("n_check must be at least 1")
    hx, hy = perron_bound(x, allow_empty=True), perron_bound(y)
    cmp = compare_entropy_detailed(hx, hy)
    mixing = is_mixing(y)
    tail = None
    if cmp.outcome is Comparison.LESS and mixing:
        tail = tail_certificate(x, y, hx.lambda_interval.hi if not hx.is_empty else Fraction(1), hy.lambda_interval.hi)
    checked_to = n_check
    if tail is not None and tail.n0 - 1 > n_check:
        checked_to = tail.n0 - 1
    cx, cy = orbit_census(x, checked_to), orbit_census(y, checked_to)
    failure = next(
        (n for n in range(1, checked_to + 1) if cx.points(n) > cy.points(n)),
        None,
    )
    if not mixing:
        status, holds = "fail (target not mixing)", False
    elif cmp.outcome is not Comparison.LESS:
        status, holds = "fail (entropy)", False
    elif failure is not None:
        status, holds = f"fail at n={failure}", False
    elif tail is not None:
        status, holds = "hypotheses hold", True
    else:
        status, holds = "holds up to n_check, tail uncertified", False
    return EmbeddingCheck(
        status,
        holds,
        mixing,
        cmp,
        n_check,
        checked_to,
        cx.least_period_points,
        cy.least_period_points,
        cx.traces,
        cy.traces,
        failure,
        tail,
    )


def count_gap_check(x: DirectedMultigraph, y: DirectedMultigraph, n_check: int = 20) -> EmbeddingCheck:
    """Same record; read :attr:`point_differences` and :meth:`divergence`."""
    return krieger_check(x, y, n_check)
