"""Slow reference computations and random instance generators.

These deliberately avoid the machinery they check: censuses come from
listing cyclic words, loop censuses from listing loop concatenations.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .graph import DirectedMultigraph, Edge, is_irreducible
from .loops import LoopSystem


def brute_force_traces(g: DirectedMultigraph, n_max: int) -> tuple[int, ...]:
    """``tr(A^n)``: closed edge paths of length ``n`` (cyclic words with a start)."""
    counts = [0] * n_max

    def walk(start, v, depth):
        for e in g.out_edges(v):
            if e.target == start:
                counts[depth] += 1
            if depth + 1 < n_max:
                walk(start, e.target, depth + 1)

    for v in g.vertices:
        walk(v, v, 0)
    return tuple(counts)


def brute_force_least_period(g: DirectedMultigraph, n_max: int) -> tuple[int, ...]:
    """``|P^o_n|``: closed words of length ``n`` that are not a power of a shorter word."""
    counts = [0] * n_max

    def primitive(word):
        n = len(word)
        return all(word != word[d:] + word[:d] for d in range(1, n) if n % d == 0)

    def walk(start, v, word):
        for e in g.out_edges(v):
            w = word + (e.id,)
            if e.target == start and primitive(w):
                counts[len(w) - 1] += 1
            if len(w) < n_max:
                walk(start, e.target, w)

    for v in g.vertices:
        walk(v, v, ())
    return tuple(counts)


def brute_force_loop_traces(f: LoopSystem, n_max: int) -> tuple[int, ...]:
    """Points of period ``n`` in the loop shift by listing loop sequences.

    A point of period ``n`` is a cyclic sequence of loops of total length ``n``
    plus the position of coordinate 0 inside it: a sequence ``(l_1, ..., l_k)``
    with the origin inside ``l_1`` contributes ``len(l_1)`` points.
    """
    cs = f.coeffs(n_max)
    out = []
    for n in range(1, n_max + 1):
        total = 0

        def seqs(rest):
            # number of loop sequences with total length ``rest``
            if rest == 0:
                return 1
            return sum(cs[m - 1] * seqs(rest - m) for m in range(1, rest + 1) if cs[m - 1])

        for m in range(1, n + 1):
            if cs[m - 1]:
                total += m * cs[m - 1] * seqs(n - m)
        out.append(total)
    return tuple(out)


def bisect_root(fn: Callable[[Fraction], Fraction], lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    """Sign bisection for a continuous function changing sign on ``[lo, hi]``."""
    s_lo = fn(lo) > 0
    while hi - lo > width:
        mid = (lo + hi) / 2
        if (fn(mid) > 0) == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def random_graph(rng: random.Random, max_vertices: int = 4, max_edges: int = 6, max_out: int = 3) -> DirectedMultigraph:
    nv = rng.randint(1, max_vertices)
    ne = rng.randint(0, max_edges)
    out = [0] * nv
    edges = []
    for i in range(ne):
        s = rng.randrange(nv)
        if out[s] >= max_out:
            continue
        out[s] += 1
        edges.append(Edge(i, s, rng.randrange(nv)))
    return DirectedMultigraph(tuple(range(nv)), tuple(edges))


def random_irreducible_graph(rng: random.Random, max_vertices: int = 5, extra_edges: int = 4) -> DirectedMultigraph:
    """Strongly connected: a Hamiltonian cycle in random order plus random extra edges."""
    while True:
        nv = rng.randint(1, max_vertices)
        order = list(range(nv))
        rng.shuffle(order)
        edges = [(order[i], order[(i + 1) % nv]) for i in range(nv)]
        for _ in range(rng.randint(0, extra_edges)):
            edges.append((rng.randrange(nv), rng.randrange(nv)))
        g = DirectedMultigraph(tuple(range(nv)), tuple(Edge(i, s, t) for i, (s, t) in enumerate(edges)))
        if is_irreducible(g):
            return g
