"""Decision procedures built on certified invariants.

Classification statements (free-part isomorphism, Borel conjugacy) are
"if and only if", so their verdicts can be ``no``.  Embedding statements only
give sufficient conditions; when their hypotheses fail the verdict is
``hypotheses_fail``, never ``no``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence, Union

from .graph import DirectedMultigraph, essential, is_irreducible, period
from .loops import InsufficientTailInformation, LoopSystem, RecurrenceClass, classify_recurrence, loop_census, loop_entropy
from .spectra import (
    DEFAULT_TOL,
    Comparison,
    ComparisonResult,
    EntropyBound,
    OrbitCensus,
    compare_entropy_detailed,
    orbit_census,
    perron_bound,
)

Presentation = Union[DirectedMultigraph, LoopSystem]


class HypothesesUnmet(ValueError):
    """The theorem behind a verdict does not apply to the inputs."""

    def __init__(self, detail: str):
        super().__init__(f"theorem hypotheses unmet: {detail}")
        self.detail = detail


@dataclass(frozen=True)
class ShiftDescriptor:
    """A presentation together with its certified invariants."""

    presentation: Presentation
    irreducible: bool
    period: int | None
    entropy: EntropyBound
    census: OrbitCensus
    recurrence: RecurrenceClass | None
    spr: bool
    spr_reason: str
    name: str = ""
    tol: Fraction = field(default=DEFAULT_TOL, compare=False)

    @classmethod
    def of(
        cls, pres: Presentation, n_max: int = 10, tol: Fraction = DEFAULT_TOL, name: str = ""
    ) -> ShiftDescriptor:
        if isinstance(pres, DirectedMultigraph):
            irr = is_irreducible(pres)
            per = period(essential(pres)) if irr else None
            ent = perron_bound(pres, tol, allow_empty=True)
            census = orbit_census(pres, n_max)
            reason = "finite irreducible graph" if irr else "graph is not irreducible"
            return cls(pres, irr, per, ent, census, None, irr, reason, name, tol)
        if isinstance(pres, LoopSystem):
            ent = loop_entropy(pres, tol)
            census = loop_census(pres, n_max)
            try:
                rec = classify_recurrence(pres)
                spr = rec.is_spr
                reason = f"recurrence class {rec.tag.value}"
            except InsufficientTailInformation:
                rec, spr, reason = None, False, "recurrence undecided"
            return cls(pres, True, pres.period(), ent, census, rec, spr, reason, name, tol)
        raise TypeError("presentation must be a graph or a loop system")

    @property
    def mixing(self) -> bool:
        return self.irreducible and self.period == 1

    def census_to(self, n: int) -> OrbitCensus:
        if n <= self.census.n_max:
            return OrbitCensus.from_traces(self.census.traces[:n])
        if isinstance(self.presentation, DirectedMultigraph):
            return orbit_census(self.presentation, n)
        return loop_census(self.presentation, n)

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "kind": "graph" if isinstance(self.presentation, DirectedMultigraph) else "loop_system",
            "irreducible": self.irreducible,
            "period": None if self.period is None else str(self.period),
            "mixing": self.mixing,
            "entropy": self.entropy.to_json(),
            "census": self.census.to_json(),
            "recurrence": self.recurrence.to_json() if self.recurrence else None,
            "spr": self.spr,
            "spr_reason": self.spr_reason,
        }


class Conclusion(enum.Enum):
    YES = "yes"
    NO = "no"
    UNDETERMINED = "undetermined"
    HYPOTHESES_FAIL = "hypotheses_fail"


@dataclass(frozen=True)
class Verdict:
    conclusion: Conclusion
    theorem: str
    evidence: dict
    verified_to_n: int | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "conclusion": self.conclusion.value,
            "theorem": self.theorem,
            "evidence": self.evidence,
            "verified_to_n": self.verified_to_n,
        }


ISO = "free parts of irreducible SPR shifts: isomorphic iff equal entropy and period"
CONJ = "Borel conjugacy: free-part isomorphism plus equal periodic orbit counts"
STRICT = "free part embeds into a mixing SPR shift of strictly larger entropy"
EQUAL = "equal-entropy embedding: unique full-entropy component, mixing and SPR"


def _require_spr(d: ShiftDescriptor, role: str) -> None:
    if not d.irreducible:
        raise HypothesesUnmet(f"{role} is not irreducible")
    if not d.spr:
        raise HypothesesUnmet(f"{role} is not SPR ({d.spr_reason})")


def _compare(a: ShiftDescriptor, b: ShiftDescriptor) -> ComparisonResult:
    return compare_entropy_detailed(a.entropy, b.entropy)


def borel_iso_free_parts(a: ShiftDescriptor, b: ShiftDescriptor) -> Verdict:
    _require_spr(a, "a")
    _require_spr(b, "b")
    case = "mixing" if a.mixing and b.mixing else "irreducible"
    periods = {"a": str(a.period), "b": str(b.period)}
    if a.period != b.period:
        return Verdict(Conclusion.NO, ISO, {"case": case, "reason": "period", "periods": periods})
    cmp = _compare(a, b)
    ev = {"case": case, "periods": periods, "entropy": cmp.to_json()}
    if cmp.outcome is Comparison.EQUAL:
        return Verdict(Conclusion.YES, ISO, dict(ev, reason="equal entropy and period"))
    if cmp.outcome is Comparison.UNDETERMINED:
        return Verdict(Conclusion.UNDETERMINED, ISO, dict(ev, reason="entropy comparison undetermined"))
    return Verdict(Conclusion.NO, ISO, dict(ev, reason="entropy"))


def borel_conjugacy(a: ShiftDescriptor, b: ShiftDescriptor, n_check: int = 10) -> Verdict:
    _require_spr(a, "a")
    _require_spr(b, "b")
    ca, cb = a.census_to(n_check), b.census_to(n_check)
    for n in range(1, n_check + 1):
        if ca.points(n) != cb.points(n):
            ev = {"reason": "periodic point count", "n": str(n), "a": str(ca.points(n)), "b": str(cb.points(n))}
            return Verdict(Conclusion.NO, CONJ, ev, n)
    free = borel_iso_free_parts(a, b)
    ev = {"free_part": free.to_json(), "counts_equal_to": str(n_check)}
    if free.conclusion is Conclusion.YES:
        ev["caveat"] = f"periodic orbit counts verified to n = {n_check} only"
        return Verdict(Conclusion.YES, CONJ, ev, n_check)
    return Verdict(free.conclusion, CONJ, ev, n_check)


def _require_mixing_spr(y: ShiftDescriptor) -> None:
    _require_spr(y, "y")
    if not y.mixing:
        raise HypothesesUnmet("y is not mixing")


def embed_verdict_strict(x: ShiftDescriptor, y: ShiftDescriptor) -> Verdict:
    _require_mixing_spr(y)
    cmp = _compare(x, y)
    ev = {"entropy": cmp.to_json()}
    if cmp.outcome is Comparison.LESS:
        return Verdict(Conclusion.YES, STRICT, dict(ev, reason="h(x) < h(y)"))
    if cmp.outcome is Comparison.UNDETERMINED:
        return Verdict(Conclusion.UNDETERMINED, STRICT, dict(ev, reason="entropy comparison undetermined"))
    return Verdict(Conclusion.HYPOTHESES_FAIL, STRICT, dict(ev, failing_clause="h(x) < h(y)"))


def embed_verdict_spr(components: Sequence[ShiftDescriptor], y: ShiftDescriptor) -> Verdict:
    if not components:
        raise ValueError("component list is empty")
    _require_mixing_spr(y)
    results = [_compare(c, y) for c in components]
    ev: dict[str, Any] = {"components": [r.outcome.value for r in results]}
    if any(r.outcome is Comparison.GREATER for r in results):
        return Verdict(Conclusion.HYPOTHESES_FAIL, EQUAL, dict(ev, failing_clause="h(x) = h(y)"))
    if any(r.outcome is Comparison.UNDETERMINED for r in results):
        return Verdict(Conclusion.UNDETERMINED, EQUAL, dict(ev, reason="entropy comparison undetermined"))
    full = [i for i, r in enumerate(results) if r.outcome is Comparison.EQUAL]
    if not full:
        return Verdict(Conclusion.HYPOTHESES_FAIL, EQUAL, dict(ev, failing_clause="h(x) = h(y)"))
    if len(full) > 1:
        return Verdict(
            Conclusion.HYPOTHESES_FAIL, EQUAL, dict(ev, failing_clause="unique full-entropy component")
        )
    top = components[full[0]]
    ev["full_entropy_component"] = str(full[0])
    ev["certificate"] = results[full[0]].certificate
    if not top.mixing:
        return Verdict(Conclusion.HYPOTHESES_FAIL, EQUAL, dict(ev, failing_clause="component is mixing"))
    if not top.spr:
        return Verdict(Conclusion.HYPOTHESES_FAIL, EQUAL, dict(ev, failing_clause="component is SPR"))
    return Verdict(Conclusion.YES, EQUAL, dict(ev, reason="unique mixing SPR component of full entropy"))
