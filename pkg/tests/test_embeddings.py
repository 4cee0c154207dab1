from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sprshift.embeddings import (
    EntropyFloorError,
    GapTooSmall,
    InjectionModel,
    ShuffleError,
    build_loop_coding,
    certify_padded_entropy,
    choose_truncation,
    decode_point_window,
    disjoint_mixing_subshifts,
    encode_point_window,
    hilbert_shuffle,
    is_injective,
    krieger_check,
)
from sprshift.embeddings.shuffle import ambiguous_models, random_model
from sprshift.graph import cycle, full_shift, golden_mean, intersection_is_empty, is_mixing
from sprshift.loops import PolynomialLoops, RationalLoops, loop_entropy
from sprshift.rational import log_interval

ONES = RationalLoops((0, 1), (1, -1))


@pytest.fixture(scope="module")
def golden_coding():
    plan = choose_truncation(PolynomialLoops((1, 1)), Fraction(2))
    return plan, build_loop_coding(plan)


def test_plan_parameters_sit_between_entropies(golden_coding):
    plan, _ = golden_coding
    assert plan.lambda_source.hi < plan.b < plan.c < plan.lambda_target
    assert plan.rouche_lhs < plan.rouche_rhs
    assert all(plan.f(n) < plan.b**n for n in range(1, 2 * plan.N + 2))
    assert plan.p_coeffs[: plan.N] == plan.f_coeffs[: plan.N]
    for n in range(plan.N + 1, 2 * plan.N + 1):
        assert plan.p_coeffs[n - 1] == plan.f(n) + 2 * plan.g(n)


def test_padded_entropy_below_target(golden_coding):
    plan, _ = golden_coding
    cert = certify_padded_entropy(plan, Fraction(1, 2**30))
    assert cert.bound.lambda_interval.hi < plan.c < plan.lambda_target
    assert cert.p_at_inv_c < 1
    if cert.literal_bound is not None:
        assert cert.literal_bound.lambda_interval.overlaps(cert.bound.lambda_interval)


def test_gap_too_small():
    with pytest.raises(GapTooSmall):
        choose_truncation(PolynomialLoops((2,)), Fraction(2))
    with pytest.raises(GapTooSmall):
        choose_truncation(ONES, Fraction(3, 2))


def test_q_identity_and_injection(golden_coding):
    plan, coding = golden_coding
    assert coding.checks["injective"] and coding.checks["length_preserving"]
    for n in range(1, 2 * plan.N + 1):
        assert coding.source_coeffs[n - 1] <= coding.q_coeffs[n - 1]
        conv = sum(coding.h(a) * coding.tail(n - a) for a in range(1, n + 1))
        assert conv == coding.q_coeffs[n - 1]
    images = [d for _, _, d in coding.injection]
    assert len(set(images)) == len(images)


def test_unrank_matches_literal_enumeration(golden_coding):
    _, coding = golden_coding
    for n in range(1, 2 * coding.N + 1):
        if coding.q_coeffs[n - 1] > 3000:
            continue
        listed = list(coding.compositions(n))
        assert len(listed) == coding.q_coeffs[n - 1]
        assert [coding.unrank(n, r) for r in range(len(listed))] == listed


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_rank_unrank_roundtrip(golden_coding, data):
    _, coding = golden_coding
    n = data.draw(st.integers(1, 2 * coding.N))
    q = coding.q_coeffs[n - 1]
    if q:
        r = data.draw(st.integers(0, q - 1))
        assert coding.rank(coding.unrank(n, r)) == (n, r)


def test_encode_injective_on_random_windows(golden_coding):
    _, coding = golden_coding
    rng = random.Random(0)
    labels = [(n, i) for n, i, _ in coding.injection]
    seen: dict = {}
    for _ in range(10_000):
        w = tuple(rng.choice(labels) for _ in range(rng.randint(1, 5)))
        img = encode_point_window(coding, w)
        assert sum(a for a, _ in img) == sum(n for n, _ in w)
        assert seen.setdefault(img, w) == w
        assert decode_point_window(coding, img) == w


def test_constant_loops_pipeline():
    plan = choose_truncation(ONES, Fraction(9, 4))
    assert plan.padded and plan.lambda_source.hi < plan.b < plan.c < Fraction(9, 4)
    cert = certify_padded_entropy(plan)
    assert cert.bound.lambda_interval.hi < Fraction(9, 4)
    coding = build_loop_coding(plan)
    assert all(f <= q for f, q in zip(coding.source_coeffs, coding.q_coeffs))


def test_krieger_examples():
    ok = krieger_check(golden_mean(), full_shift(2), 20)
    assert ok.status == "hypotheses hold" and ok.holds
    assert ok.trace_differences[:4] == (1, 1, 4, 9)
    assert ok.point_differences[:4] == (1, 0, 3, 8)
    assert ok.divergence() is not None
    assert krieger_check(full_shift(2), golden_mean()).status == "fail (entropy)"
    assert krieger_check(golden_mean(), golden_mean()).status == "fail (entropy)"
    assert krieger_check(cycle(1), cycle(2)).status == "fail (target not mixing)"


def test_krieger_finds_small_count_failure():
    # a 3-cycle has entropy 0 but 3 points of period 3; Y with a fixed point and a long loop lacks them
    from sprshift.graph import DirectedMultigraph

    y = DirectedMultigraph.from_edges([("a", 0, 0), ("b", 0, 1), ("c", 1, 2), ("d", 2, 3), ("e", 3, 0)])
    chk = krieger_check(cycle(3), y, 20)
    assert chk.status == "fail at n=3" and not chk.holds


def test_disjoint_mixing_subshifts():
    fam = disjoint_mixing_subshifts(full_shift(2), 3, Fraction(15, 100))
    floor = log_interval(2).hi - Fraction(15, 100)
    assert len(fam) == 3
    for g, h in zip(fam, fam.entropies):
        assert is_mixing(g) and h.interval.lo > floor
    for i in range(3):
        for j in range(i + 1, 3):
            assert intersection_is_empty(fam[i], fam[j])
    with pytest.raises(EntropyFloorError):
        disjoint_mixing_subshifts(full_shift(2), 3, Fraction(1, 1000), gaps=(8,))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9))
def test_shuffle_injective_on_random_models(seed):
    m = random_model(random.Random(seed))
    psi = hilbert_shuffle(m)
    assert is_injective(psi)
    assert set(psi) == set(m.x0) | set(m.c)
    for x in m.c:
        assert psi[x] == m.gammas[0][x]


def test_shuffle_rejections():
    for bad in ambiguous_models():
        with pytest.raises(ShuffleError):
            hilbert_shuffle(bad)
    short = InjectionModel.build(["x"], ["c"], {"x": 1}, [{"c": 1}])
    with pytest.raises(ShuffleError, match="shuffle chain too short"):
        hilbert_shuffle(short)
    with pytest.raises(ShuffleError, match="Z_i not disjoint"):
        hilbert_shuffle(InjectionModel.build([], ["c"], {}, [{"c": 1}, {"c": 1}]))


def test_loop_entropy_of_padded_system_is_between(golden_coding):
    plan, _ = golden_coding
    lam_p = loop_entropy(plan.p_poly(), Fraction(1, 2**20)).lambda_interval
    assert plan.lambda_source.lo <= lam_p.hi and lam_p.hi < plan.c


def test_two_z_plan():
    plan = choose_truncation(PolynomialLoops((2,)), Fraction(3))
    assert 2 < plan.b < plan.c < 3 and plan.p_coeffs[0] == 2
    assert certify_padded_entropy(plan).bound.lambda_interval.hi < 3


def test_injection_identity_then_canonical():
    plan = choose_truncation(ONES, Fraction(9, 4))
    coding = build_loop_coding(plan)
    table = coding.table()
    for n in range(1, plan.N + 1):
        for i in range(1, coding.source_coeffs[n - 1] + 1):
            assert table[(n, i)] == ((n, i),)
    assert table[(plan.N + 1, 1)] == coding.unrank(plan.N + 1, 0)
