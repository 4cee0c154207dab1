from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sprshift.graph import DirectedMultigraph, disjoint_union, full_shift, golden_mean
from sprshift.loops import EventuallyGeometricLoops, RationalLoops
from sprshift.oracles import random_irreducible_graph
from sprshift.verdicts import (
    Conclusion,
    HypothesesUnmet,
    ShiftDescriptor,
    borel_conjugacy,
    borel_iso_free_parts,
    embed_verdict_spr,
    embed_verdict_strict,
)

ONES = RationalLoops((0, 1), (1, -1))
# two edges each way between two vertices: entropy log 2, period 2
PERIOD_TWO = DirectedMultigraph.from_edges([("a", 0, 1), ("b", 0, 1), ("c", 1, 0), ("d", 1, 0)])


def d(pres, **kw):
    return ShiftDescriptor.of(pres, **kw)


def test_two_shift_versus_constant_loops():
    a, b = d(full_shift(2)), d(ONES)
    iso = borel_iso_free_parts(a, b)
    assert iso.conclusion is Conclusion.YES
    cert = iso.evidence["entropy"]["certificate"]
    assert cert["lambda_poly"] == [-2, 1]
    conj = borel_conjugacy(a, b)
    assert conj.conclusion is Conclusion.NO
    assert (conj.evidence["n"], conj.evidence["a"], conj.evidence["b"]) == ("1", "2", "1")


def test_period_mismatch():
    v = borel_iso_free_parts(d(PERIOD_TWO), d(full_shift(2)))
    assert v.conclusion is Conclusion.NO and v.evidence["reason"] == "period"


def test_unmet_hypotheses():
    red = DirectedMultigraph.from_edges([("a", 0, 0), ("b", 0, 1), ("c", 1, 1)])
    with pytest.raises(HypothesesUnmet):
        borel_iso_free_parts(d(red), d(full_shift(2)))
    transient = EventuallyGeometricLoops((0, 0, 0), Fraction(1), Fraction(2), 3, 2)
    with pytest.raises(HypothesesUnmet, match="not SPR"):
        borel_iso_free_parts(d(transient), d(full_shift(2)))
    with pytest.raises(HypothesesUnmet, match="not mixing"):
        embed_verdict_strict(d(golden_mean()), d(PERIOD_TWO))


def test_strict_embedding():
    assert embed_verdict_strict(d(golden_mean()), d(full_shift(2))).conclusion is Conclusion.YES
    v = embed_verdict_strict(d(full_shift(2)), d(golden_mean()))
    assert v.conclusion is Conclusion.HYPOTHESES_FAIL and v.evidence["failing_clause"] == "h(x) < h(y)"


def test_equal_entropy_embedding():
    two = d(full_shift(2))
    ok = embed_verdict_spr([d(golden_mean()), d(ONES)], two)
    assert ok.conclusion is Conclusion.YES and ok.evidence["full_entropy_component"] == "1"
    dup = embed_verdict_spr([d(full_shift(2)), d(ONES)], two)
    assert dup.evidence["failing_clause"] == "unique full-entropy component"
    per = embed_verdict_spr([d(PERIOD_TWO)], two)
    assert per.evidence["failing_clause"] == "component is mixing"
    low = embed_verdict_spr([d(golden_mean())], two)
    assert low.conclusion is Conclusion.HYPOTHESES_FAIL


graphs = st.integers(0, 10**6).map(lambda s: random_irreducible_graph(random.Random(s), max_vertices=4, extra_edges=3))


@settings(max_examples=40, deadline=None)
@given(graphs, graphs)
def test_iso_and_conjugacy_are_symmetric(g, h):
    a, b = d(g), d(h)
    assert borel_iso_free_parts(a, b).conclusion is borel_iso_free_parts(b, a).conclusion
    assert borel_conjugacy(a, b).conclusion is borel_conjugacy(b, a).conclusion
    assert borel_iso_free_parts(a, a).conclusion is Conclusion.YES


@settings(max_examples=25, deadline=None)
@given(graphs, graphs)
def test_verdicts_stable_under_tighter_tolerance(g, h):
    coarse = borel_iso_free_parts(d(g), d(h)).conclusion
    fine = borel_iso_free_parts(d(g, tol=Fraction(1, 2**80)), d(h, tol=Fraction(1, 2**80))).conclusion
    assert coarse is fine


@settings(max_examples=25, deadline=None)
@given(graphs)
def test_reducible_target_is_rejected(g):
    y = d(disjoint_union([g, full_shift(1)]))
    # y is reducible, so it can never serve as a target
    with pytest.raises(HypothesesUnmet):
        embed_verdict_strict(d(golden_mean()), y)
