from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sprshift.graph import (
    DirectedMultigraph,
    Edge,
    GraphError,
    avoid_word,
    bounded_gap_subshift,
    cycle,
    essential,
    fiber_product,
    full_shift,
    golden_mean,
    higher_block,
    intersection_is_empty,
    is_irreducible,
    is_mixing,
    language,
    paths,
    period,
    strongly_connected_components,
)
from sprshift.oracles import random_graph, random_irreducible_graph
from sprshift.spectra import orbit_census, perron_bound

seeds = st.integers(0, 10**6)


def test_component_examples():
    assert is_irreducible(full_shift(2))
    g = DirectedMultigraph.from_edges([("e", 1, 2)])
    dec = strongly_connected_components(g)
    assert len(dec.components) == 2 and not dec.nontrivial_components() and not dec.irreducible
    assert is_irreducible(golden_mean())
    assert len(strongly_connected_components(golden_mean()).components) == 1


def test_period_examples():
    assert period(full_shift(2)) == 1
    assert period(cycle(3)) == 3
    assert period(golden_mean()) == 1
    with pytest.raises(GraphError, match="trivial component has no period"):
        period(DirectedMultigraph.from_edges([("e", 1, 2)]), [1])


def test_json_roundtrip_and_validation():
    g, _ = higher_block(golden_mean(), 3)
    assert DirectedMultigraph.from_json(g.to_json()) == g
    with pytest.raises(GraphError):
        DirectedMultigraph((1,), (Edge("e", 1, 2),))
    with pytest.raises(GraphError):
        DirectedMultigraph((1,), (Edge("e", 1, 1), Edge("e", 1, 1)))


def test_higher_block_examples():
    assert higher_block(golden_mean(), 1)[0] is golden_mean() or higher_block(golden_mean(), 1)[0] == golden_mean()
    h, _ = higher_block(full_shift(2), 2)
    assert (len(h.vertices), len(h.edges)) == (2, 4)
    h, _ = higher_block(golden_mean(), 2)
    assert len(h.edges) == 5


def test_block_recoding_roundtrip():
    g = golden_mean()
    _, rec = higher_block(g, 3)
    for w in paths(g, 6):
        assert rec.decode(rec.encode(w)) == w


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 3))
def test_higher_block_preserves_census_period_entropy(seed, m):
    g = random_irreducible_graph(random.Random(seed), max_vertices=4, extra_edges=3)
    h, _ = higher_block(g, m)
    assert orbit_census(h, 8) == orbit_census(g, 8)
    assert period(essential(h)) == period(g)
    assert perron_bound(h).lambda_interval.overlaps(perron_bound(g).lambda_interval)


def test_avoid_word_examples():
    two = full_shift(2)
    gm_like = avoid_word(two, ["a", "a"])
    b = perron_bound(gm_like)
    assert b.lambda_poly == (-1, -1, 1)
    only_b = avoid_word(two, ["a"])
    assert len(only_b.edges) == 1 and perron_bound(only_b).lambda_interval.hi == 1
    g = DirectedMultigraph.from_edges([("x", 0, 0), ("y", 0, 1)])  # y leads nowhere
    assert language(avoid_word(g, ["y"]), 4) == language(g, 4)
    with pytest.raises(GraphError):
        avoid_word(golden_mean(), ["c", "c"])


def _extendable_states(g, w, forward):
    """Greatest fixed point of context states with an infinite avoiding continuation.

    A state is the tuple of the last ``len(w) - 1`` edges (first edges when going
    backward), or a vertex when ``len(w) == 1``.
    """
    k = len(w) - 1
    by_id = {e.id: e for e in g.edges}

    def step(state):
        if k == 0:
            nexts = g.out_edges(state) if forward else [e for e in g.edges if e.target == state]
            return [(e.target if forward else e.source) for e in nexts if (e.id,) != tuple(w)]
        ids = list(state)
        end = by_id[ids[-1]].target if forward else by_id[ids[0]].source
        out = []
        for e in (g.out_edges(end) if forward else [x for x in g.edges if x.target == end]):
            window = tuple(ids + [e.id]) if forward else tuple([e.id] + ids)
            if window != tuple(w):
                out.append(window[1:] if forward else window[:-1])
        return out

    states = set(g.vertices) if k == 0 else set(paths(g, k))
    while True:
        keep = {s for s in states if any(t in states for t in step(s))}
        if keep == states:
            return states
        states = keep


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 3))
def test_avoid_word_language_matches_filter(seed, wl):
    rng = random.Random(seed)
    g = random_irreducible_graph(rng, max_vertices=3, extra_edges=2)
    w = rng.choice(list(paths(g, wl)))
    out = avoid_word(g, w)
    ell = 6
    fwd, bwd = _extendable_states(g, w, True), _extendable_states(g, w, False)
    by_id = {e.id: e for e in g.edges}
    ok = set()
    for p in paths(g, ell):
        if any(p[i : i + wl] == tuple(w) for i in range(ell - wl + 1)):
            continue
        if wl == 1:
            head, tail = by_id[p[0]].source, by_id[p[-1]].target
        else:
            head, tail = p[: wl - 1], p[ell - wl + 1 :]
        if head in bwd and tail in fwd:
            ok.add(p)
    decoded = {tuple(_first_symbol(x) for x in word) for word in language(out, ell)}
    assert decoded == ok


def _first_symbol(block):
    return block[0] if isinstance(block, tuple) else block


def test_bounded_gap_examples():
    two = full_shift(2)
    s = bounded_gap_subshift(two, ["a"], 1)
    assert is_mixing(s)
    h = perron_bound(s).interval
    assert 0 < h.lo and h.hi < perron_bound(two).interval.lo
    h2 = perron_bound(bounded_gap_subshift(two, ["a"], 4)).interval
    assert h.hi < h2.lo
    g = DirectedMultigraph.from_edges([("x", 0, 0), ("y", 0, 1)])
    assert bounded_gap_subshift(g, ["y"], 3).is_empty()


def test_bounded_gap_language_is_increasing_in_gap():
    two = full_shift(2)
    for gap in (1, 2, 3):
        a = {tuple(_first_symbol(x[0]) for x in w) for w in language(bounded_gap_subshift(two, ["a", "b"], gap), 8)}
        b = {tuple(_first_symbol(x[0]) for x in w) for w in language(bounded_gap_subshift(two, ["a", "b"], gap + 1), 8)}
        assert a <= b


def _labelled(rng: random.Random) -> DirectedMultigraph:
    g = random_graph(rng, max_vertices=3, max_edges=5)
    return DirectedMultigraph(g.vertices, tuple(Edge(e.id, e.source, e.target, rng.choice("xy")) for e in g.edges))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_intersection_emptiness_matches_fiber_product(seed):
    rng = random.Random(seed)
    a, b = _labelled(rng), _labelled(rng)
    assert intersection_is_empty(a, b) == essential(fiber_product(a, b)).is_empty()


def test_essential_prunes_wandering_edges():
    g = DirectedMultigraph.from_edges([("a", 0, 0), ("b", 0, 1), ("c", 1, 1), ("d", 2, 0)])
    core = essential(g)
    assert {e.id for e in core.edges} == {"a", "b", "c"}
    assert not is_irreducible(g)
