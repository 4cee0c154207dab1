"""The Hilbert-hotel shuffle on finite abstract models.

Given an injection ``psi0: X0 -> Y`` and injections ``gamma_i: C -> Y`` with
pairwise disjoint images ``Z_i``, the shuffle

    psi(x) = gamma_1(x)                     if x in C
    psi(x) = gamma_{i+1}(gamma_i^-1(psi0 x)) if psi0(x) in Z_i
    psi(x) = psi0(x)                        otherwise

makes room for ``C`` by pushing every hit of ``Z_i`` one step down the chain.
In a finite model the chain stops at ``Z_m``, so ``psi0`` must not hit ``Z_m``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Hashable, Iterator, Mapping, Sequence

Point = Hashable


class ShuffleError(ValueError):
    pass


@dataclass(frozen=True)
class InjectionModel:
    x0: frozenset
    c: frozenset
    psi0: Mapping[Point, Point]
    gammas: tuple[Mapping[Point, Point], ...]

    @classmethod
    def build(cls, x0, c, psi0, gammas) -> InjectionModel:
        return cls(frozenset(x0), frozenset(c), dict(psi0), tuple(dict(g) for g in gammas))

    def z(self, i: int) -> frozenset:
        """``Z_i`` (1-based)."""
        return frozenset(self.gammas[i - 1].values())

    def to_json(self) -> dict[str, Any]:
        def enc(m):
            return sorted([repr(k), repr(v)] for k, v in m.items())

        return {
            "x0": sorted(repr(x) for x in self.x0),
            "c": sorted(repr(x) for x in self.c),
            "psi0": enc(self.psi0),
            "gammas": [enc(g) for g in self.gammas],
        }


def _injective(m: Mapping) -> bool:
    return len(set(m.values())) == len(m)


def validate_model(model: InjectionModel) -> None:
    if model.x0 & model.c:
        raise ShuffleError("X0 and C overlap: membership is ambiguous")
    if set(model.psi0) != set(model.x0):
        raise ShuffleError("psi0 must be defined exactly on X0")
    if not _injective(model.psi0):
        raise ShuffleError("psi0 is not injective")
    if model.c and not model.gammas:
        raise ShuffleError("C is nonempty but no gamma maps are given")
    for g in model.gammas:
        if set(g) != set(model.c):
            raise ShuffleError("each gamma_i must be defined exactly on C")
        if not _injective(g):
            raise ShuffleError("gamma_i is not injective")
    seen: set = set()
    for i in range(1, len(model.gammas) + 1):
        zi = model.z(i)
        if seen & zi:
            raise ShuffleError("Z_i not disjoint")
        seen |= zi


def hilbert_shuffle(model: InjectionModel) -> dict[Point, Point]:
    """The composed injection ``psi`` on ``X0 ∪ C``."""
    validate_model(model)
    m = len(model.gammas)
    where: dict[Point, tuple[int, Point]] = {}
    for i, g in enumerate(model.gammas, 1):
        for src, img in g.items():
            where[img] = (i, src)
    psi: dict[Point, Point] = {}
    if model.c:
        for x in model.c:
            psi[x] = model.gammas[0][x]
    for x, y in model.psi0.items():
        if y in where:
            i, src = where[y]
            if i == m:
                raise ShuffleError("shuffle chain too short: psi0 hits the last Z_i")
            psi[x] = model.gammas[i][src]
        else:
            psi[x] = y
    return psi


def is_injective(psi: Mapping) -> bool:
    return _injective(psi)


# --- model generators -------------------------------------------------------------

def canonical_models(max_points: int = 12, max_chain: int = 3) -> Iterator[InjectionModel]:
    """Every valid finite model up to isomorphism with ``|X0 ∪ C| <= max_points``.

    Up to renaming, ``gamma_i(c_j) = ('z', i, j)`` and ``psi0`` is determined by
    the set of ``Z``-points it hits (in ``Z_1..Z_{m-1}``); the remaining points
    of ``X0`` go to distinct free points ``('y', t)``.
    """
    for total in range(0, max_points + 1):
        for nc in range(0, total + 1):
            na = total - nc
            chains = [0] if nc == 0 else range(1, max_chain + 1)
            for m in chains:
                c = [("c", j) for j in range(nc)]
                x0 = [("x", t) for t in range(na)]
                gammas = [{cj: ("z", i, j) for j, cj in enumerate(c)} for i in range(1, m + 1)]
                hit_pool = [("z", i, j) for i in range(1, m) for j in range(nc)]
                for r in range(0, min(na, len(hit_pool)) + 1):
                    for hits in itertools.combinations(hit_pool, r):
                        psi0 = {x0[t]: hits[t] for t in range(r)}
                        psi0.update({x0[t]: ("y", t) for t in range(r, na)})
                        yield InjectionModel.build(x0, c, psi0, gammas)


def random_model(rng: random.Random, max_points: int = 12, max_chain: int = 4) -> InjectionModel:
    """A random valid model inside a shuffled universe of target points."""
    nc = rng.randint(0, max_points // 2)
    na = rng.randint(0, max_points - nc)
    m = rng.randint(1, max_chain) if nc else 0
    universe = list(range(na + nc * m + rng.randint(0, 6)))
    rng.shuffle(universe)
    c = [f"c{j}" for j in range(nc)]
    x0 = [f"x{t}" for t in range(na)]
    gammas = []
    for i in range(m):
        block = universe[i * nc : (i + 1) * nc]
        gammas.append(dict(zip(c, block)))
    last = set(universe[(m - 1) * nc : m * nc]) if m else set()
    allowed = [u for u in universe if u not in last]
    targets = rng.sample(allowed, na)
    return InjectionModel.build(x0, c, dict(zip(x0, targets)), gammas)


def ambiguous_models() -> Sequence[InjectionModel]:
    """Inputs the shuffle must reject."""
    c = ["c0", "c1"]
    overlap = InjectionModel.build(["x0"], c, {"x0": 9}, [{"c0": 1, "c1": 2}, {"c0": 2, "c1": 3}])
    shared = InjectionModel.build(["p"], ["p"], {"p": 5}, [{"p": 1}, {"p": 2}])
    return (overlap, shared)
