"""Invariant suites run by ``sprshift verify``.

Each suite returns a :class:`SuiteResult` with the first counterexample
serialized; all randomness flows from one seeded ``random.Random``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .embeddings import build_loop_coding, choose_truncation, decode_point_window, encode_point_window
from .embeddings.shuffle import canonical_models, hilbert_shuffle, is_injective, random_model
from .loops import PolynomialLoops, first_return_decomposition, loop_census
from .oracles import brute_force_least_period, brute_force_traces, random_graph, random_irreducible_graph
from .spectra import orbit_census


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: int = 0
    counterexample: Any = field(default=None)

    def fail(self, example: Any) -> None:
        self.failures += 1
        if self.counterexample is None:
            self.counterexample = example

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict[str, Any]:
        return {
            "cases": str(self.cases),
            "failures": str(self.failures),
            "passed": self.passed,
            "counterexample": self.counterexample,
        }


def census_suite(rng: random.Random, graphs: int = 50, n_max: int = 10, fault: bool = False) -> SuiteResult:
    res = SuiteResult("census")
    for k in range(graphs):
        g = random_graph(rng)
        c = orbit_census(g, n_max)
        traces = list(c.traces)
        if fault and k == 0:
            traces[0] += 1
        res.cases += 1
        if tuple(traces) != brute_force_traces(g, n_max) or c.least_period_points != brute_force_least_period(g, n_max):
            res.fail({"graph": g.to_json(), "computed": [str(t) for t in traces]})
    return res


def first_return_suite(rng: random.Random, graphs: int = 25, n_max: int = 8) -> SuiteResult:
    res = SuiteResult("first_return")
    for _ in range(graphs):
        g = random_irreducible_graph(rng)
        order = list(g.vertices)
        rng.shuffle(order)
        parts = first_return_decomposition(g, order, n_max)
        total = [0] * n_max
        for part in parts:
            if not part.system.is_zero():
                for n in range(1, n_max + 1):
                    total[n - 1] += loop_census(part.system, n_max).points(n)
        res.cases += 1
        if tuple(total) != orbit_census(g, n_max).least_period_points:
            res.fail({"graph": g.to_json(), "order": order})
    return res


def shuffle_suite(rng: random.Random, max_points: int = 12, random_models: int = 1000) -> SuiteResult:
    res = SuiteResult("shuffle")
    for model in canonical_models(max_points):
        res.cases += 1
        if not is_injective(hilbert_shuffle(model)):
            res.fail(model.to_json())
    for _ in range(random_models):
        model = random_model(rng, max_points)
        res.cases += 1
        if not is_injective(hilbert_shuffle(model)):
            res.fail(model.to_json())
    return res


def coding_suite(rng: random.Random, windows: int = 2000) -> SuiteResult:
    res = SuiteResult("coding")
    plan = choose_truncation(PolynomialLoops((1, 1)), Fraction(2))
    coding = build_loop_coding(plan)
    labels = [(n, i) for n, i, _ in coding.injection]
    seen: dict = {}
    for _ in range(windows):
        w = tuple(rng.choice(labels) for _ in range(rng.randint(0, 4)))
        image = encode_point_window(coding, w)
        res.cases += 1
        back = decode_point_window(coding, image)
        length_ok = sum(a for a, _ in image) == sum(n for n, _ in w)
        if back != w or not length_ok or seen.setdefault(image, w) != w:
            res.fail({"window": [list(x) for x in w]})
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "census": census_suite,
    "first_return": first_return_suite,
    "shuffle": shuffle_suite,
    "coding": coding_suite,
}


def run_all(seed: int = 0, fault: bool = False) -> list[SuiteResult]:
    out = []
    for name, suite in SUITES.items():
        rng = random.Random(f"{seed}:{name}")
        out.append(suite(rng, fault=fault) if name == "census" else suite(rng))
    return out
