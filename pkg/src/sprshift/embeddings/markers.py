"""Pairwise disjoint mixing sub-SFTs of a mixing SFT, each of nearly full entropy.

Construction: pick ``count`` marker words ``w_1..w_count`` of length ``ell``.
``S_i`` consists of the points that avoid every other marker and see ``w_i``
in every window of ``gap + ell`` symbols.  A point of ``S_i`` contains ``w_i``
while ``S_j`` forbids it, so the subshifts are disjoint; that is certified by
the emptiness of each pairwise fibre product rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, Sequence

from ..graph import (
    DirectedMultigraph,
    Edge,
    GraphError,
    block_label,
    bounded_gap_subshift,
    essential,
    higher_block,
    intersection_is_empty,
    is_mixing,
)
from ..rational import as_fraction, fraction_str
from ..spectra import DEFAULT_TOL, EntropyBound, perron_bound
from .truncation import ConstructionError

GAP_LADDER = (8, 16, 32, 64, 128)


class EntropyFloorError(ConstructionError):
    pass


@dataclass(frozen=True)
class SubshiftFamily:
    """Result of :func:`disjoint_mixing_subshifts`; iterates over the graphs."""

    graphs: tuple[DirectedMultigraph, ...]
    markers: tuple[tuple, ...]
    entropies: tuple[EntropyBound, ...]
    gap: int
    word_length: int
    floor: Fraction  # certified lower bound target log(lambda_Y) - epsilon (lower end)

    def __iter__(self) -> Iterator[DirectedMultigraph]:
        return iter(self.graphs)

    def __len__(self) -> int:
        return len(self.graphs)

    def __getitem__(self, i: int) -> DirectedMultigraph:
        return self.graphs[i]

    def to_json(self) -> dict[str, Any]:
        return {
            "gap": str(self.gap),
            "word_length": str(self.word_length),
            "markers": [[block_label(x) for x in m] for m in self.markers],
            "entropies": [e.to_json() for e in self.entropies],
            "entropy_floor": fraction_str(self.floor),
            "sizes": [[str(len(g.vertices)), str(len(g.edges))] for g in self.graphs],
            "pairwise_disjoint": True,
            "mixing": True,
        }


def _symbol_graph(g: DirectedMultigraph) -> DirectedMultigraph:
    # counter-graph edge ids are (block, counter); the current symbol is block[0]
    return DirectedMultigraph(
        g.vertices, tuple(Edge(e.id, e.source, e.target, block_label(e.id[0][0])) for e in g.edges)
    )


def _candidate_markers(h: DirectedMultigraph, count: int, tol: Fraction) -> list:
    """Blocks ranked by the entropy left after forbidding them (ties: canonical order)."""
    scored = []
    for e in h.edges:
        rest = essential(h.without_edges([e.id]))
        if rest.is_empty():
            continue
        b = perron_bound(rest, tol, exact=False)
        scored.append((-b.lambda_interval.lo, e.id))
    scored.sort(key=lambda t: t[0])
    return [eid for _, eid in scored]


def disjoint_mixing_subshifts(
    y: DirectedMultigraph,
    count: int,
    epsilon: Fraction | str | int,
    word_length: int = 5,
    gaps: Sequence[int] = GAP_LADDER,
    tol: Fraction = DEFAULT_TOL,
) -> SubshiftFamily:
    """``count`` pairwise disjoint mixing sub-SFTs of ``y`` with entropy above ``h(y) - epsilon``."""
    eps = as_fraction(epsilon)
    if count < 1:
        raise ValueError("count must be at least 1")
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    core = essential(y)
    if core.is_empty() or not is_mixing(core):
        raise GraphError("target must be a mixing shift")
    hy = perron_bound(core, tol)
    if not hy.interval.lo > 0:
        raise GraphError("target must have positive entropy")
    floor = hy.interval.hi - eps
    h, _ = higher_block(core, word_length)
    ranked = _candidate_markers(h, count, tol)
    if len(ranked) < count:
        raise EntropyFloorError("cannot certify entropy floor; increase epsilon or budget")
    for start in range(0, len(ranked) - count + 1):
        markers = ranked[start : start + count]
        for gap in gaps:
            fam = _attempt(h, markers, gap, floor, tol)
            if fam is not None:
                graphs, bounds = fam
                return SubshiftFamily(
                    tuple(graphs), tuple(markers), tuple(bounds), gap, word_length, floor
                )
        if start >= 4:
            break
    raise EntropyFloorError("cannot certify entropy floor; increase epsilon or budget")


def _attempt(h, markers, gap, floor, tol):
    graphs, bounds = [], []
    for i, w in enumerate(markers):
        others = [m for j, m in enumerate(markers) if j != i]
        base = essential(h.without_edges(others))
        if not base.has_edge(w):
            return None
        s = essential(bounded_gap_subshift(base, [w], gap))
        if s.is_empty() or not is_mixing(s):
            return None
        b = perron_bound(s, tol, exact=False)
        if not b.interval.lo > floor:
            return None
        graphs.append(_symbol_graph(s))
        bounds.append(b)
    for i in range(len(graphs)):
        for j in range(i + 1, len(graphs)):
            if not intersection_is_empty(graphs[i], graphs[j]):
                return None
    return graphs, bounds
