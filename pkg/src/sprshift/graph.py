"""Finite directed multigraphs presenting edge shifts.

A :class:`DirectedMultigraph` is the finite presentation of an edge shift:
points are bi-infinite edge sequences in which consecutive edges concatenate.
The functions here analyse component structure (irreducibility, period) and
recode presentations (higher block graphs, forbidden words, bounded gaps).
All of them are pure: inputs are immutable and outputs are fresh graphs.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Iterator, Sequence

import networkx as nx
import numpy as np
from scipy import sparse

Id = Hashable


class GraphError(ValueError):
    pass


def sort_key(x: Any) -> tuple:
    """Total order on the id types we accept (ints, strings, nested tuples)."""
    if isinstance(x, bool):
        raise GraphError("boolean ids are not allowed")
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(sort_key(y) for y in x))
    raise GraphError(f"unsupported id type {type(x).__name__}")


@dataclass(frozen=True)
class Edge:
    id: Id
    source: Id
    target: Id
    name: str | None = None


@dataclass(frozen=True)
class DirectedMultigraph:
    """Vertices plus labelled parallel edges; canonically ordered by id."""

    vertices: tuple[Id, ...]
    edges: tuple[Edge, ...]
    _out: dict = field(default=None, init=False, repr=False, compare=False, hash=False)
    _by_id: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        verts = tuple(sorted(set(self.vertices), key=sort_key))
        if len(verts) != len(tuple(self.vertices)):
            raise GraphError("duplicate vertex ids")
        edges = tuple(sorted(self.edges, key=lambda e: sort_key(e.id)))
        by_id: dict[Id, Edge] = {}
        vset = set(verts)
        out: dict[Id, list[Edge]] = {v: [] for v in verts}
        for e in edges:
            if e.id in by_id:
                raise GraphError(f"duplicate edge id {e.id!r}")
            if e.source not in vset or e.target not in vset:
                raise GraphError(f"edge {e.id!r} has an endpoint outside the vertex set")
            by_id[e.id] = e
            out[e.source].append(e)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_out", {v: tuple(es) for v, es in out.items()})

    @classmethod
    def from_edges(
        cls, triples: Iterable[tuple[Id, Id, Id]], vertices: Iterable[Id] = ()
    ) -> DirectedMultigraph:
        """Build from ``(edge_id, source, target)`` triples."""
        edges = [Edge(i, s, t) for i, s, t in triples]
        verts = set(vertices)
        for e in edges:
            verts.update((e.source, e.target))
        return cls(tuple(verts), tuple(edges))

    @classmethod
    def empty(cls) -> DirectedMultigraph:
        return cls((), ())

    def __len__(self) -> int:
        return len(self.vertices)

    def edge(self, edge_id: Id) -> Edge:
        try:
            return self._by_id[edge_id]
        except KeyError:
            raise GraphError(f"unknown edge {edge_id!r}") from None

    def has_edge(self, edge_id: Id) -> bool:
        return edge_id in self._by_id

    def out_edges(self, v: Id) -> tuple[Edge, ...]:
        return self._out[v]

    def is_empty(self) -> bool:
        return not self.edges

    def label(self, edge_id: Id) -> Any:
        e = self.edge(edge_id)
        return e.name if e.name is not None else e.id

    def index(self) -> dict[Id, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def adjacency(self) -> list[list[int]]:
        """Dense integer adjacency matrix (edge multiplicities) in vertex order."""
        idx = self.index()
        n = len(self.vertices)
        a = [[0] * n for _ in range(n)]
        for e in self.edges:
            a[idx[e.source]][idx[e.target]] += 1
        return a

    def sparse_rows(self) -> list[dict[int, int]]:
        idx = self.index()
        rows: list[dict[int, int]] = [defaultdict(int) for _ in self.vertices]
        for e in self.edges:
            rows[idx[e.source]][idx[e.target]] += 1
        return [dict(r) for r in rows]

    def subgraph(self, keep: Iterable[Id]) -> DirectedMultigraph:
        """Induced subgraph on ``keep`` (edges with both ends kept)."""
        ks = set(keep)
        edges = tuple(e for e in self.edges if e.source in ks and e.target in ks)
        return DirectedMultigraph(tuple(v for v in self.vertices if v in ks), edges)

    def without_edges(self, drop: Iterable[Id]) -> DirectedMultigraph:
        ds = set(drop)
        return DirectedMultigraph(self.vertices, tuple(e for e in self.edges if e.id not in ds))

    # --- JSON --------------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        edges = []
        for e in self.edges:
            item: dict[str, Any] = {"id": _jsonify(e.id), "from": _jsonify(e.source), "to": _jsonify(e.target)}
            if e.name is not None:
                item["name"] = e.name
            edges.append(item)
        return {"vertices": [_jsonify(v) for v in self.vertices], "edges": edges}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> DirectedMultigraph:
        if not isinstance(data, dict) or "vertices" not in data or "edges" not in data:
            raise GraphError("graph JSON needs 'vertices' and 'edges'")
        verts = tuple(_unjsonify(v) for v in data["vertices"])
        edges = []
        for item in data["edges"]:
            try:
                edges.append(
                    Edge(
                        _unjsonify(item["id"]),
                        _unjsonify(item["from"]),
                        _unjsonify(item["to"]),
                        item.get("name"),
                    )
                )
            except (KeyError, TypeError) as exc:
                raise GraphError(f"malformed edge entry {item!r}") from exc
        return cls(verts, tuple(edges))


def _jsonify(x: Id) -> Any:
    if isinstance(x, tuple):
        return [_jsonify(y) for y in x]
    return x


def _unjsonify(x: Any) -> Id:
    if isinstance(x, list):
        return tuple(_unjsonify(y) for y in x)
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise GraphError(f"unsupported id {x!r}")
    return x


# --- words -----------------------------------------------------------------

Word = tuple


def validate_word(g: DirectedMultigraph, word: Sequence[Id]) -> Word:
    """Check that consecutive edges concatenate; returns the word as a tuple."""
    w = tuple(word)
    if not w:
        raise GraphError("empty word")
    for a, b in zip(w, w[1:]):
        if g.edge(a).target != g.edge(b).source:
            raise GraphError(f"word is not concatenable at {a!r} -> {b!r}")
    g.edge(w[-1])
    return w


def paths(g: DirectedMultigraph, length: int, start: Id | None = None) -> Iterator[Word]:
    """All edge paths of the given length (in canonical order)."""
    if length == 0:
        return
    starts = g.vertices if start is None else (start,)

    def extend(v: Id, prefix: tuple) -> Iterator[Word]:
        if len(prefix) == length:
            yield prefix
            return
        for e in g.out_edges(v):
            yield from extend(e.target, prefix + (e.id,))

    for s in starts:
        yield from extend(s, ())


# --- structure -------------------------------------------------------------

def essential(g: DirectedMultigraph) -> DirectedMultigraph:
    """Prune vertices that lie on no bi-infinite path (stranded vertices)."""
    indeg: dict[Id, int] = {v: 0 for v in g.vertices}
    outdeg: dict[Id, int] = {v: 0 for v in g.vertices}
    incoming: dict[Id, list[Edge]] = {v: [] for v in g.vertices}
    for e in g.edges:
        outdeg[e.source] += 1
        indeg[e.target] += 1
        incoming[e.target].append(e)
    alive = set(g.vertices)
    queue = deque(v for v in g.vertices if indeg[v] == 0 or outdeg[v] == 0)
    while queue:
        v = queue.popleft()
        if v not in alive:
            continue
        alive.discard(v)
        for e in g.out_edges(v):
            if e.target in alive and e.target != v:
                indeg[e.target] -= 1
                if indeg[e.target] == 0:
                    queue.append(e.target)
        for e in incoming[v]:
            if e.source in alive and e.source != v:
                outdeg[e.source] -= 1
                if outdeg[e.source] == 0:
                    queue.append(e.source)
    return g.subgraph(alive)


@dataclass(frozen=True)
class ComponentDecomposition:
    components: tuple[frozenset, ...]
    nontrivial: tuple[bool, ...]
    dag_edges: frozenset  # pairs (i, j) of component indices, i != j
    irreducible: bool

    def nontrivial_components(self) -> list[frozenset]:
        return [c for c, nt in zip(self.components, self.nontrivial) if nt]

    def component_of(self, v: Id) -> int:
        for i, c in enumerate(self.components):
            if v in c:
                return i
        raise GraphError(f"unknown vertex {v!r}")


def strongly_connected_components(g: DirectedMultigraph) -> ComponentDecomposition:
    dg = nx.DiGraph()
    dg.add_nodes_from(g.vertices)
    dg.add_edges_from((e.source, e.target) for e in g.edges)
    comps = [frozenset(c) for c in nx.strongly_connected_components(dg)]
    comps.sort(key=lambda c: min(sort_key(v) for v in c))
    where = {v: i for i, c in enumerate(comps) for v in c}
    nontrivial = []
    for c in comps:
        nontrivial.append(len(c) > 1 or any(e.target == e.source for v in c for e in g.out_edges(v)))
    dag = frozenset(
        (where[e.source], where[e.target]) for e in g.edges if where[e.source] != where[e.target]
    )
    core = essential(g)
    irreducible = False
    if core.edges:
        dc = nx.DiGraph()
        dc.add_nodes_from(core.vertices)
        dc.add_edges_from((e.source, e.target) for e in core.edges)
        irreducible = nx.is_strongly_connected(dc)
    return ComponentDecomposition(tuple(comps), tuple(nontrivial), dag, irreducible)


def is_irreducible(g: DirectedMultigraph) -> bool:
    return strongly_connected_components(g).irreducible


def period(g: DirectedMultigraph, component: Iterable[Id] | None = None) -> int:
    """gcd of cycle lengths inside ``component`` (default: the essential core).

    Uses BFS levels: every edge u->v inside the component contributes
    ``level[u] + 1 - level[v]`` to the gcd.
    """
    if component is None:
        core = essential(g)
        if not is_irreducible(core):
            raise GraphError("period of a reducible shift is undefined; pass a component")
        comp = set(core.vertices)
    else:
        comp = set(component)
    if not comp:
        raise GraphError("trivial component has no period")
    root = min(comp, key=sort_key)
    level = {root: 0}
    queue = deque([root])
    d = 0
    while queue:
        u = queue.popleft()
        for e in g.out_edges(u):
            v = e.target
            if v not in comp:
                continue
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                d = math.gcd(d, level[u] + 1 - level[v])
    if len(level) != len(comp):
        raise GraphError("component is not strongly connected")
    if d == 0:
        raise GraphError("trivial component has no period")
    return abs(d)


def is_mixing(g: DirectedMultigraph) -> bool:
    core = essential(g)
    return bool(core.edges) and is_irreducible(core) and period(core) == 1


# --- recodings -------------------------------------------------------------

@dataclass(frozen=True)
class BlockRecoding:
    """Translate words between ``G`` and its ``m``-block presentation."""

    m: int

    def encode(self, word: Sequence[Id]) -> Word:
        w = tuple(word)
        if self.m == 1:
            return w
        if len(w) < self.m:
            raise GraphError(f"word shorter than block length {self.m}")
        return tuple(w[i : i + self.m] for i in range(len(w) - self.m + 1))

    def decode(self, blocks: Sequence[Id]) -> Word:
        b = tuple(blocks)
        if self.m == 1 or not b:
            return b
        for x, y in zip(b, b[1:]):
            if x[1:] != y[:-1]:
                raise GraphError("blocks do not overlap consistently")
        return tuple(blk[0] for blk in b) + tuple(b[-1][1:])


def higher_block(g: DirectedMultigraph, m: int) -> tuple[DirectedMultigraph, BlockRecoding]:
    """The ``m``-block presentation: vertices are paths of length ``m-1``,
    edges are paths of length ``m`` (edge id = tuple of original edge ids)."""
    if m < 1:
        raise GraphError("block length must be positive")
    rec = BlockRecoding(m)
    if m == 1:
        return g, rec
    short = list(paths(g, m - 1))
    edges = []
    for p in short:
        for f in g.out_edges(g.edge(p[-1]).target):
            block = p + (f.id,)
            edges.append(Edge(block, p, block[1:]))
    return DirectedMultigraph(tuple(short), tuple(edges)), rec


def _contains_factor(block: Word, w: Word) -> bool:
    n = len(w)
    return any(block[i : i + n] == w for i in range(len(block) - n + 1))


def avoid_words(g: DirectedMultigraph, words: Iterable[Sequence[Id]]) -> DirectedMultigraph:
    """Presentation of the subshift of points in which no word of ``words`` occurs.

    Works in the ``m``-block presentation with ``m`` the longest word length;
    the result is pruned to its essential part (possibly empty).
    """
    ws = [validate_word(g, w) for w in words]
    if not ws:
        return essential(g)
    m = max(len(w) for w in ws)
    h, _ = higher_block(g, m)
    if m == 1:
        banned = {w[0] for w in ws}
    else:
        banned = {e.id for e in h.edges if any(_contains_factor(e.id, w) for w in ws)}
    return essential(h.without_edges(banned))


def avoid_word(g: DirectedMultigraph, w: Sequence[Id]) -> DirectedMultigraph:
    return avoid_words(g, [w])


def bounded_gap_subshift(g: DirectedMultigraph, w: Sequence[Id], gap: int) -> DirectedMultigraph:
    """Points in which ``w`` occurs in every window of ``gap + |w|`` symbols.

    Equivalently: for every position ``n`` some occurrence of ``w`` starts in
    ``{n, ..., n + gap}``.  Presented as the ``|w|``-block graph times a
    counter recording how many blocks ago ``w`` last occurred; the counter is
    a function of the past, so this is a conjugate presentation.  Edge ids are
    ``(block, counter_before)`` and edge names carry the block label.
    """
    word = validate_word(g, w)
    if gap < 0:
        raise GraphError("gap must be nonnegative")
    m = len(word)
    h, _ = higher_block(g, m)
    target = word if m > 1 else word[0]
    edges = []
    verts = set()
    for e in h.edges:
        hit = e.id == target
        for c in range(gap + 1):
            c2 = 0 if hit else c + 1
            if c2 > gap:
                continue
            s, t = (e.source, c), (e.target, c2)
            verts.update((s, t))
            edges.append(Edge((e.id, c), s, t, block_label(e.id)))
    return essential(DirectedMultigraph(tuple(verts), tuple(edges)))


def block_label(x: Id) -> str:
    """Stable string label for an edge id (used for fiber products)."""
    if isinstance(x, tuple):
        return "(" + ",".join(block_label(y) for y in x) + ")"
    return repr(x)


def fiber_product(a: DirectedMultigraph, b: DirectedMultigraph) -> DirectedMultigraph:
    """Label product: edge pairs carrying equal labels; its shift is the intersection."""
    by_label: dict[Any, list[Edge]] = defaultdict(list)
    for e in b.edges:
        by_label[edge_label(b, e)].append(e)
    edges = []
    verts = set()
    for e in a.edges:
        for f in by_label.get(edge_label(a, e), ()):
            s, t = (e.source, f.source), (e.target, f.target)
            verts.update((s, t))
            edges.append(Edge((e.id, f.id), s, t, e.name))
    return DirectedMultigraph(tuple(verts), tuple(edges))


def intersection_is_empty(a: DirectedMultigraph, b: DirectedMultigraph) -> bool:
    """True iff the labelled shifts of ``a`` and ``b`` share no point.

    Same answer as ``essential(fiber_product(a, b)).is_empty()`` but the
    product adjacency is a sum of sparse Kronecker products (one per shared
    label), pruned in place, so large counter graphs stay cheap.
    """
    ia, ib = a.index(), b.index()
    groups_a: dict[Any, list[Edge]] = defaultdict(list)
    groups_b: dict[Any, list[Edge]] = defaultdict(list)
    for e in a.edges:
        groups_a[edge_label(a, e)].append(e)
    for e in b.edges:
        groups_b[edge_label(b, e)].append(e)
    na, nb = len(a.vertices), len(b.vertices)
    prod = sparse.csr_matrix((na * nb, na * nb), dtype=np.int8)
    for lab, ea in groups_a.items():
        eb = groups_b.get(lab)
        if not eb:
            continue
        ma = _bool_matrix(ea, ia, na)
        mb = _bool_matrix(eb, ib, nb)
        prod = prod + sparse.kron(ma, mb, format="csr")
    prod = (prod > 0).astype(np.int32)
    alive = np.ones(na * nb, dtype=bool)
    prod_t = prod.T.tocsr()
    while True:
        v = alive.astype(np.int32)
        keep = alive & (prod @ v > 0) & (prod_t @ v > 0)
        if keep.sum() == alive.sum():
            return not keep.any()
        alive = keep


def _bool_matrix(edges: Sequence[Edge], index: dict, n: int) -> sparse.csr_matrix:
    rows = [index[e.source] for e in edges]
    cols = [index[e.target] for e in edges]
    m = sparse.csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    m.data[:] = 1
    return m


def edge_label(g: DirectedMultigraph, e: Edge) -> Any:
    return e.name if e.name is not None else block_label(e.id)


def disjoint_union(graphs: Sequence[DirectedMultigraph]) -> DirectedMultigraph:
    verts, edges = [], []
    for i, gr in enumerate(graphs):
        verts.extend((i, v) for v in gr.vertices)
        edges.extend(Edge((i, e.id), (i, e.source), (i, e.target), e.name) for e in gr.edges)
    return DirectedMultigraph(tuple(verts), tuple(edges))


def language(g: DirectedMultigraph, length: int, labels: bool = False) -> set[Word]:
    """Words of the given length occurring in points of ``Σ(g)``."""
    core = essential(g)
    out = set()
    for p in paths(core, length):
        out.add(tuple(edge_label(core, core.edge(x)) for x in p) if labels else p)
    return out


def full_shift(k: int, names: Sequence[str] | None = None) -> DirectedMultigraph:
    names = list(names) if names is not None else [chr(ord("a") + i) for i in range(k)]
    return DirectedMultigraph.from_edges((n, 0, 0) for n in names)


def golden_mean() -> DirectedMultigraph:
    """Vertices {1, 2}; edges 1->1, 1->2, 2->1."""
    return DirectedMultigraph.from_edges([("a", 1, 1), ("b", 1, 2), ("c", 2, 1)])


def cycle(n: int) -> DirectedMultigraph:
    return DirectedMultigraph.from_edges((i, i, (i + 1) % n) for i in range(n))

