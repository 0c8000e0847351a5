"""Finite directed multigraphs with a real edge weight ``F``.

Vertices are plain strings whose declaration order is the canonical total
order used for every tie-break (component labels, canonical loops, the base
vertex of a circular component).  Paths of length zero are represented by
their vertex.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import networkx as nx

from kmsgraph.config import DEFAULT_LIMITS, DEFAULT_TOLERANCES, Limits
from kmsgraph.errors import CycleLimitError, GraphInputError


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    range: str


@dataclass(frozen=True)
class Path:
    """A finite path ``e_1 ... e_n``; ``start``/``end`` are s(e_1) and r(e_n).

    For the empty path ``start == end`` is the vertex it sits at.  Build
    paths through :meth:`Graph.path` so composability is checked.
    """

    edges: tuple[str, ...]
    start: str
    end: str

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def is_empty(self) -> bool:
        return not self.edges

    def is_prefix_of(self, other: Path) -> bool:
        n = len(self.edges)
        return self.start == other.start and other.edges[:n] == self.edges

    def strip_prefix(self, prefix: Path) -> Path:
        """Return the remainder ``r`` with ``self == prefix . r``."""
        if not prefix.is_prefix_of(self):
            raise ValueError("not a prefix")
        return Path(self.edges[len(prefix.edges):], prefix.end, self.end)

    def concat(self, other: Path) -> Path:
        if self.end != other.start:
            raise ValueError(f"cannot compose path ending at {self.end} with path starting at {other.start}")
        return Path(self.edges + other.edges, self.start, other.end)

    def __str__(self) -> str:
        if not self.edges:
            return f"@{self.start}"
        return ",".join(self.edges)


class Graph:
    """Immutable finite directed multigraph with weight function ``F``.

    Parallel edges and self-loops are allowed.  ``weight`` maps every edge id
    to a finite real number.
    """

    def __init__(
        self,
        vertices: Sequence[str],
        edges: Iterable[tuple[str, str, str] | Edge],
        weight: Mapping[str, float] | None = None,
    ):
        verts = tuple(str(v) for v in vertices)
        order: dict[str, int] = {}
        for v in verts:
            if v in order:
                raise GraphInputError(f"duplicate vertex id {v!r}")
            order[v] = len(order)
        edge_list = []
        by_id: dict[str, Edge] = {}
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(*(str(x) for x in e))
            if e.id in by_id:
                raise GraphInputError(f"duplicate edge id {e.id!r}")
            for end in (e.source, e.range):
                if end not in order:
                    raise GraphInputError(f"edge {e.id!r} refers to undeclared vertex {end!r}")
            by_id[e.id] = e
            edge_list.append(e)
        weight = dict(weight or {})
        for eid in weight:
            if eid not in by_id:
                raise GraphInputError(f"weight given for unknown edge {eid!r}")
        w = {}
        for e in edge_list:
            if e.id not in weight:
                raise GraphInputError(f"edge {e.id!r} has no weight")
            value = float(weight[e.id])
            if not math.isfinite(value):
                raise GraphInputError(f"weight of edge {e.id!r} is not finite")
            w[e.id] = value
        self._vertices = verts
        self._order = order
        self._edges = tuple(edge_list)
        self._by_id = by_id
        self._weight = MappingProxyType(w)
        out: dict[str, list[Edge]] = {v: [] for v in verts}
        inc: dict[str, list[Edge]] = {v: [] for v in verts}
        for e in edge_list:
            out[e.source].append(e)
            inc[e.range].append(e)
        self._out = {v: tuple(es) for v, es in out.items()}
        self._in = {v: tuple(es) for v, es in inc.items()}

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def weight(self) -> Mapping[str, float]:
        return self._weight

    def index(self, v: str) -> int:
        try:
            return self._order[v]
        except KeyError:
            raise GraphInputError(f"unknown vertex {v!r}") from None

    def edge(self, eid: str) -> Edge:
        try:
            return self._by_id[eid]
        except KeyError:
            raise GraphInputError(f"unknown edge {eid!r}") from None

    def out_edges(self, v: str) -> tuple[Edge, ...]:
        return self._out[v]

    def in_edges(self, v: str) -> tuple[Edge, ...]:
        return self._in[v]

    def has_vertex(self, v: str) -> bool:
        return v in self._order

    def check_vertices(self, vs: Iterable[str]) -> frozenset[str]:
        vs = frozenset(vs)
        for v in vs:
            self.index(v)
        return vs

    def sorted(self, vs: Iterable[str]) -> tuple[str, ...]:
        """Vertices of ``vs`` in canonical order."""
        return tuple(sorted(vs, key=self.index))

    def vertex_path(self, v: str) -> Path:
        self.index(v)
        return Path((), v, v)

    def path(self, edges: Sequence[str], start: str | None = None) -> Path:
        """Build a path from edge ids; ``start`` is required for the empty path."""
        edges = tuple(edges)
        if not edges:
            if start is None:
                raise GraphInputError("empty path needs a base vertex")
            return self.vertex_path(start)
        es = [self.edge(eid) for eid in edges]
        if start is not None and es[0].source != start:
            raise GraphInputError(f"path does not start at {start!r}")
        for a, b in zip(es, es[1:]):
            if a.range != b.source:
                raise GraphInputError(f"edges {a.id!r} and {b.id!r} are not composable")
        return Path(edges, es[0].source, es[-1].range)

    def path_weight(self, p: Path) -> float:
        return math.fsum(self._weight[e] for e in p.edges)

    def path_vertices(self, p: Path) -> tuple[str, ...]:
        return (p.start,) + tuple(self._by_id[e].range for e in p.edges)

    def with_weights(self, weight: Mapping[str, float]) -> Graph:
        return Graph(self._vertices, self._edges, weight)

    def induced_edges(self, region: Iterable[str]) -> tuple[Edge, ...]:
        region = frozenset(region)
        return tuple(e for e in self._edges if e.source in region and e.range in region)

    @cached_property
    def _digraph(self) -> nx.DiGraph:
        dg = nx.DiGraph()
        dg.add_nodes_from(self._vertices)
        dg.add_edges_from((e.source, e.range) for e in self._edges)
        return dg

    @cached_property
    def _components(self) -> tuple[Component, ...]:
        found = []
        for scc in nx.strongly_connected_components(self._digraph):
            inside = self.induced_edges(scc)
            if not inside:
                continue
            members = self.sorted(scc)
            out_deg = {v: 0 for v in members}
            in_deg = {v: 0 for v in members}
            for e in inside:
                out_deg[e.source] += 1
                in_deg[e.range] += 1
            circular = all(out_deg[v] == 1 and in_deg[v] == 1 for v in members)
            loop = None
            if circular:
                nxt = {e.source: e for e in inside}
                v, seq = members[0], []
                for _ in members:
                    seq.append(nxt[v].id)
                    v = nxt[v].range
                loop = Path(tuple(seq), members[0], members[0])
            found.append((members, circular, loop))
        found.sort(key=lambda t: self.index(t[0][0]))
        return tuple(
            Component(members=m, circular=c, loop=lp, label=f"C{i + 1}")
            for i, (m, c, lp) in enumerate(found)
        )

    def __repr__(self) -> str:
        return f"Graph({len(self._vertices)} vertices, {len(self._edges)} edges)"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._vertices == other._vertices
            and self._edges == other._edges
            and dict(self._weight) == dict(other._weight)
        )

    def __hash__(self) -> int:
        return hash((self._vertices, self._edges, tuple(self._weight.items())))


@dataclass(frozen=True)
class Component:
    """Strong-connectivity class carrying at least one internal edge.

    ``members`` is in canonical order; ``loop`` is the unique cycle of a
    circular component, based at its least member.
    """

    members: tuple[str, ...]
    circular: bool
    loop: Path | None
    label: str = ""
    vertex_set: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertex_set", frozenset(self.members))

    @property
    def base(self) -> str:
        return self.members[0]

    def __contains__(self, v: str) -> bool:
        return v in self.vertex_set

    def __len__(self) -> int:
        return len(self.members)


class ProfileTag(enum.Enum):
    ALL_POSITIVE = "AllPositive"
    ALL_NEGATIVE = "AllNegative"
    HAS_ZERO_LOOP = "HasZeroLoop"
    MIXED = "Mixed"
    NO_LOOPS = "NoLoops"


@dataclass(frozen=True)
class SignProfile:
    tag: ProfileTag
    witness: Path | None = None
    # for MIXED: witness has F > 0 and counter_witness has F < 0
    counter_witness: Path | None = None

    @property
    def positive(self) -> bool:
        """Every loop has F > 0 (vacuously true without loops)."""
        return self.tag in (ProfileTag.ALL_POSITIVE, ProfileTag.NO_LOOPS)

    @property
    def negative(self) -> bool:
        return self.tag in (ProfileTag.ALL_NEGATIVE, ProfileTag.NO_LOOPS)


def components(g: Graph) -> list[Component]:
    """Components of ``g`` ordered by least member vertex."""
    return list(g._components)


def component_by_label(g: Graph, label: str) -> Component:
    for c in g._components:
        if c.label == label:
            return c
    raise GraphInputError(f"no component labelled {label!r}")


def _reach(g: Graph, start: Iterable[str], forward: bool) -> frozenset[str]:
    seen = set(g.check_vertices(start))
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        nbrs = (e.range for e in g.out_edges(v)) if forward else (e.source for e in g.in_edges(v))
        for w in nbrs:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return frozenset(seen)


def closure(g: Graph, s: Iterable[str]) -> frozenset[str]:
    """All vertices with a (possibly empty) path into ``s``."""
    return _reach(g, s, forward=False)


def hereditary_closure(g: Graph, s: Iterable[str]) -> frozenset[str]:
    """All vertices reachable from ``s`` (including ``s``)."""
    return _reach(g, s, forward=True)


def sinks(g: Graph) -> list[str]:
    return [v for v in g.vertices if not g.out_edges(v)]


def components_in(g: Graph, region: Iterable[str]) -> list[Component]:
    """Components of ``g`` lying inside ``region``."""
    region = frozenset(region)
    return [c for c in g._components if c.vertex_set <= region]


def simple_cycles(g: Graph, region: Iterable[str] | None = None, limits: Limits = DEFAULT_LIMITS) -> list[Path]:
    """Edge-level simple cycles of the subgraph induced on ``region``.

    Parallel edges give distinct cycles.  Each cycle starts at its least
    vertex.  Raises :class:`CycleLimitError` past ``limits``.
    """
    region = g.check_vertices(g.vertices if region is None else region)
    if len(region) > limits.max_vertices:
        raise CycleLimitError(f"{len(region)} vertices exceed the limit of {limits.max_vertices}")
    inside = g.induced_edges(region)
    parallel: dict[tuple[str, str], list[str]] = {}
    for e in inside:
        parallel.setdefault((e.source, e.range), []).append(e.id)
    dg = nx.DiGraph()
    dg.add_nodes_from(region)
    dg.add_edges_from(parallel)
    cycles = []
    for nodes in nx.simple_cycles(dg):
        i = min(range(len(nodes)), key=lambda j: g.index(nodes[j]))
        nodes = nodes[i:] + nodes[:i]
        hops = [parallel[(a, b)] for a, b in zip(nodes, nodes[1:] + nodes[:1])]
        for choice in itertools.product(*hops):
            cycles.append(Path(tuple(choice), nodes[0], nodes[0]))
            if len(cycles) > limits.max_simple_cycles:
                raise CycleLimitError(f"more than {limits.max_simple_cycles} simple cycles")
    cycles.sort(key=lambda p: (g.index(p.start), len(p), p.edges))
    return cycles


def sign_profile(g: Graph, region: Iterable[str], limits: Limits = DEFAULT_LIMITS) -> SignProfile:
    """Classify the signs of the F-weights of all loops inside ``region``.

    Loops decompose into simple cycles, so it is enough to inspect those.
    """
    tol = DEFAULT_TOLERANCES.weight_zero
    pos = neg = zero = None
    for cyc in simple_cycles(g, region, limits):
        w = g.path_weight(cyc)
        if w > tol:
            pos = pos or cyc
        elif w < -tol:
            neg = neg or cyc
        else:
            zero = zero or cyc
    if pos is not None and neg is not None:
        return SignProfile(ProfileTag.MIXED, pos, neg)
    if zero is not None:
        return SignProfile(ProfileTag.HAS_ZERO_LOOP, zero)
    if pos is not None:
        return SignProfile(ProfileTag.ALL_POSITIVE)
    if neg is not None:
        return SignProfile(ProfileTag.ALL_NEGATIVE)
    return SignProfile(ProfileTag.NO_LOOPS)
