"""The ten acceptance criteria, each at its stated tolerance and time limit.

Each test records one PASS/FAIL line, printed in the pytest terminal summary
(and directly when this file is run as a script).
"""

from __future__ import annotations

import json
import os
import random
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import ACCEPTANCE
from sprshift.embeddings import (
    build_loop_coding,
    certify_padded_entropy,
    choose_truncation,
    disjoint_mixing_subshifts,
    krieger_check,
)
from sprshift.embeddings.shuffle import ShuffleError, ambiguous_models, hilbert_shuffle
from sprshift.graph import (
    DirectedMultigraph,
    avoid_words,
    full_shift,
    golden_mean,
    intersection_is_empty,
    is_mixing,
)
from sprshift.loops import (
    EventuallyGeometricLoops,
    PolynomialLoops,
    RationalLoops,
    Recurrence,
    classify_recurrence,
    first_return_decomposition,
    loop_census,
    loop_entropy,
)
from sprshift.oracles import (
    bisect_root,
    brute_force_least_period,
    brute_force_traces,
    random_graph,
    random_irreducible_graph,
)
from sprshift.rational import RationalInterval, log_interval
from sprshift.spectra import orbit_census, perron_bound
from sprshift.suites import shuffle_suite
from sprshift.verdicts import Conclusion, ShiftDescriptor, borel_conjugacy, borel_iso_free_parts

ONES = RationalLoops((0, 1), (1, -1))


@contextmanager
def criterion(k: int, limit: float | None):
    """Run a criterion body; record PASS only if it returns cleanly within ``limit`` seconds."""
    start = time.perf_counter()
    state = {"ok": False, "note": ""}
    try:
        yield state
        state["ok"] = True
    finally:
        elapsed = time.perf_counter() - start
        within = limit is None or elapsed < limit
        detail = f"{elapsed:.2f}s" + (f" (limit {limit:g}s)" if limit else "") + (f"  {state['note']}" if state["note"] else "")
        ACCEPTANCE[k] = (state["ok"] and within, detail)
    assert within, f"criterion {k} took {elapsed:.2f}s, limit {limit}s"


def test_c01_entropy_certification():
    with criterion(1, 1.0) as st:
        b = perron_bound(golden_mean(), Fraction(1, 10**9))
        oracle_lo, oracle_hi = bisect_root(lambda x: x * x - x - 1, Fraction(1), Fraction(2), Fraction(1, 2**60))
        oracle = log_interval(RationalInterval(oracle_lo, oracle_hi), 60)
        assert b.interval.width <= Fraction(1, 10**9)
        assert b.interval.overlaps(oracle)
        target = Fraction("0.4812118250596")
        assert b.interval.lo - Fraction(1, 10**13) <= target <= b.interval.hi + Fraction(1, 10**13)
        two = perron_bound(full_shift(2))
        assert two.exact_lambda == 2 and two.lambda_poly == (-2, 1)
        assert two.interval.overlaps(log_interval(2)) and two.interval.width <= Fraction(1, 10**9)
        st["note"] = f"log phi in [{float(b.interval.lo):.13f}, {float(b.interval.hi):.13f}]"


def test_c02_census_oracle():
    with criterion(2, 30.0) as st:
        rng = random.Random(2)
        mismatches = 0
        for _ in range(50):
            g = random_graph(rng, max_vertices=4, max_edges=6)
            c = orbit_census(g, 10)
            if c.traces != brute_force_traces(g, 10) or c.least_period_points != brute_force_least_period(g, 10):
                mismatches += 1
        assert mismatches == 0
        st["note"] = "50 graphs, n <= 10, 0 mismatches"


def test_c03_first_return_decomposition():
    with criterion(3, 60.0) as st:
        rng = random.Random(3)
        for _ in range(25):
            g = random_irreducible_graph(rng, max_vertices=5)
            order = list(g.vertices)
            rng.shuffle(order)
            parts = [p for p in first_return_decomposition(g, order, 8) if not p.system.is_zero()]
            total = [sum(loop_census(p.system, 8).points(n) for p in parts) for n in range(1, 9)]
            assert tuple(total) == orbit_census(g, 8).least_period_points
            lam_g = perron_bound(g).lambda_interval
            ivs = [loop_entropy(p.system).lambda_interval for p in parts]
            top = RationalInterval(max(iv.lo for iv in ivs), max(iv.hi for iv in ivs))
            assert top.overlaps(lam_g)
        st["note"] = "25 graphs, n <= 8"


def test_c04_recurrence_ladder():
    with criterion(4, 5.0) as st:
        two_z = classify_recurrence(PolynomialLoops((2,)))
        assert two_z.tag is Recurrence.SPR
        assert two_z.r_interval == RationalInterval.point(Fraction(1, 2)) and two_z.f_at_r == (1, 1)
        ones = classify_recurrence(ONES)
        assert ones.tag is Recurrence.SPR
        assert ones.r_interval.is_point() and ones.r_interval.lo == Fraction(1, 2)
        assert ones.radius == RationalInterval.point(Fraction(1))
        transient = classify_recurrence(EventuallyGeometricLoops((0, 0, 0), Fraction(1), Fraction(2), 3, 2))
        assert transient.tag is Recurrence.TRANSIENT
        lo, hi = transient.f_at_radius
        assert hi is not None and hi < 1
        for x in (*two_z.f_at_r, *ones.f_at_r, lo, hi, transient.radius.lo):
            assert isinstance(x, Fraction | int)
        st["note"] = f"transient f(R-) <= {float(hi):.6f}"


@pytest.mark.parametrize(
    "source,target",
    [(ONES, Fraction(9, 4)), (PolynomialLoops((1, 1)), Fraction(2))],
    ids=["ones-9/4", "golden-2"],
)
def test_c05_truncate_and_pad(source, target):
    limit = 120.0
    start = time.perf_counter()
    ok = False
    try:
        plan = choose_truncation(source, target)
        assert plan.rouche_lhs < plan.rouche_rhs
        cert = certify_padded_entropy(plan)
        assert cert.bound.lambda_interval.hi < target
        coding = build_loop_coding(plan)
        n2 = 2 * plan.N
        assert coding.n_cap == n2 and len(coding.q_coeffs) == n2
        # convolution h * (1 + k + k^2 + ...) against counting q-loops head by head
        for n in range(1, n2 + 1):
            assert coding.q_coeffs[n - 1] == sum(coding.h(a) * coding.tail(n - a) for a in range(1, n + 1))
            assert coding.source_coeffs[n - 1] <= coding.q_coeffs[n - 1]
        assert coding.checks["q_identity_agree_to"] == str(n2)
        for n in range(1, n2 + 1):
            if coding.q_coeffs[n - 1] <= 2000:
                assert sum(1 for _ in coding.compositions(n)) == coding.q_coeffs[n - 1]
        images = [d for _, _, d in coding.injection]
        assert len(set(images)) == len(images)
        assert all(sum(a for a, _ in d) == n for n, _, d in coding.injection)
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        prev = ACCEPTANCE.get(5, (True, ""))
        note = f"{prev[1]}  " if prev[1] else ""
        ACCEPTANCE[5] = (prev[0] and ok and elapsed < limit, f"{note}{target}: {elapsed:.2f}s (limit {limit:g}s)")
    assert elapsed < limit


def test_c06_krieger():
    with criterion(6, 1.0) as st:
        ok = krieger_check(golden_mean(), full_shift(2), 20)
        assert ok.holds and ok.checked_to >= 20 and ok.first_failure is None
        rev = krieger_check(full_shift(2), golden_mean(), 20)
        assert rev.status == "fail (entropy)"
        st["note"] = f"forward: {ok.status}; reverse: {rev.status}"


def test_c07_disjoint_mixing_subshifts():
    with criterion(7, 30.0) as st:
        y = full_shift(2)
        eps = Fraction(15, 100)
        fam = disjoint_mixing_subshifts(y, 3, eps)
        floor = log_interval(2).hi - eps
        for i, (g, h) in enumerate(zip(fam, fam.entropies)):
            assert is_mixing(g)
            assert h.interval.lo > floor
            # derived oracle: S_i lies in the SFT forbidding the other markers (length-5 words)
            others = [[b[0] for b in m] for j, m in enumerate(fam.markers) if j != i]
            oracle = perron_bound(avoid_words(y, others))
            assert h.interval.lo <= oracle.interval.hi
        for i in range(3):
            for j in range(i + 1, 3):
                assert intersection_is_empty(fam[i], fam[j])
        st["note"] = "entropies " + ", ".join(f"{e.interval.approx():.4f}" for e in fam.entropies) + f" > {float(floor):.4f}"


def test_c08_shuffle():
    with criterion(8, 30.0) as st:
        res = shuffle_suite(random.Random(0), max_points=12, random_models=1000)
        assert res.passed, res.counterexample
        for bad in ambiguous_models():
            with pytest.raises(ShuffleError):
                hilbert_shuffle(bad)
        st["note"] = f"{res.cases} models, 0 failures"


def test_c09_verdicts():
    with criterion(9, 5.0) as st:
        a, b = ShiftDescriptor.of(full_shift(2)), ShiftDescriptor.of(ONES)
        iso = borel_iso_free_parts(a, b)
        assert iso.conclusion is Conclusion.YES
        assert "minimal polynomial" in iso.evidence["entropy"]["certificate"]["reason"]
        conj = borel_conjugacy(a, b)
        assert conj.conclusion is Conclusion.NO
        assert (conj.evidence["n"], conj.evidence["a"], conj.evidence["b"]) == ("1", "2", "1")
        p2 = DirectedMultigraph.from_edges([("a", 0, 1), ("b", 0, 1), ("c", 1, 0), ("d", 1, 0)])
        per = borel_iso_free_parts(ShiftDescriptor.of(p2), a)
        assert per.conclusion is Conclusion.NO and per.evidence["reason"] == "period"


def test_c10_determinism(tmp_path: Path):
    with criterion(10, None) as st:
        inputs = {
            "gm": golden_mean().to_json(),
            "two": full_shift(2).to_json(),
            "zz2": {"type": "polynomial", "coeffs": [1, 1]},
            "ones": {"type": "eventually_geometric", "prefix": [], "c": "1", "b": "1", "n0": 0},
        }
        for name, data in inputs.items():
            (tmp_path / f"{name}.json").write_text(json.dumps(data))
        commands = [
            ["classify", "-i", "gm.json"],
            ["classify", "-i", "ones.json"],
            ["embed", "-i", "zz2.json", "--lambda-target", "2"],
            ["iso", "-a", "two.json", "-b", "ones.json"],
            ["verify", "--seed", "0"],
        ]
        for argv in commands:
            outs = []
            for hash_seed in ("0", "12345"):
                env = dict(os.environ, PYTHONHASHSEED=hash_seed)
                proc = subprocess.run(
                    [sys.executable, "-m", "sprshift.cli", *argv], cwd=tmp_path, env=env, capture_output=True
                )
                assert proc.returncode == 0, proc.stderr.decode()
                outs.append(proc.stdout)
            assert outs[0] == outs[1], argv
        st["note"] = f"{len(commands)} commands, two runs each under different hash seeds"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
