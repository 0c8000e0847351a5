"""Ground states: minimal-weight potentials, the tight subgraph and a census
of the boundary paths of minimal F-weight.

With ``m(v)`` the least F-weight of a path ending at ``v`` (the empty path
counts, so ``m <= 0``), a boundary path ``x`` has every prefix of minimal
weight iff ``m(s(x)) = 0`` and every edge of ``x`` is tight, meaning
``m(r(e)) = m(s(e)) + F(e)``.  This follows by telescoping the weights of
the prefixes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import networkx as nx

from kmsgraph.config import DEFAULT_TOLERANCES
from kmsgraph.errors import GraphInputError
from kmsgraph.graph import Graph, Path, hereditary_closure


class _MinusInfinity:
    """Marker for vertices reached by a cycle of negative weight."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "-inf"

    def __reduce__(self):
        return (_MinusInfinity, ())


MINUS_INFINITY = _MinusInfinity()


@dataclass(frozen=True)
class Potential:
    values: Mapping[str, float | _MinusInfinity]

    def __getitem__(self, v: str):
        return self.values[v]

    def is_finite(self, v: str) -> bool:
        return self.values[v] is not MINUS_INFINITY

    def as_json(self) -> dict[str, float | str]:
        return {v: ("-inf" if x is MINUS_INFINITY else x) for v, x in self.values.items()}


def potentials(g: Graph) -> Potential:
    """Bellman-Ford relaxation from a virtual source joined to every vertex
    by a weight-zero edge."""
    tol = DEFAULT_TOLERANCES.weight_zero
    m = {v: 0.0 for v in g.vertices}
    for _ in range(len(g.vertices)):
        changed = False
        for e in g.edges:
            cand = m[e.source] + g.weight[e.id]
            if cand < m[e.range] - tol:
                m[e.range] = cand
                changed = True
        if not changed:
            break
    unstable = {e.range for e in g.edges if m[e.source] + g.weight[e.id] < m[e.range] - tol}
    lost = hereditary_closure(g, unstable) if unstable else frozenset()
    return Potential({v: (MINUS_INFINITY if v in lost else m[v]) for v in g.vertices})


@dataclass(frozen=True)
class TightSubgraph:
    start_vertices: frozenset[str]
    tight_edges: tuple[str, ...]

    def edge_set(self) -> frozenset[str]:
        return frozenset(self.tight_edges)


def _is_tight(g: Graph, pot: Potential, eid: str) -> bool:
    e = g.edge(eid)
    if not (pot.is_finite(e.source) and pot.is_finite(e.range)):
        return False
    return abs(pot[e.range] - (pot[e.source] + g.weight[eid])) <= DEFAULT_TOLERANCES.weight_zero


def tight_subgraph(g: Graph, pot: Potential | None = None) -> TightSubgraph:
    pot = pot or potentials(g)
    starts = frozenset(v for v in g.vertices if pot.is_finite(v) and pot[v] == 0.0)
    return TightSubgraph(starts, tuple(e.id for e in g.edges if _is_tight(g, pot, e.id)))


def min_membership(g: Graph, x: Path | tuple[Path, Path], pot: Potential | None = None) -> bool:
    """Whether the boundary path ``x`` has all prefixes of minimal weight.

    ``x`` is a finite path ending at a sink, or ``(prefix, cycle)`` standing
    for ``prefix cycle cycle ...``.
    """
    pot = pot or potentials(g)
    if isinstance(x, Path):
        if g.out_edges(x.end):
            raise GraphInputError(f"finite boundary path must end at a sink, not {x.end!r}")
        start, edges = x.start, x.edges
    else:
        prefix, cycle = x
        if cycle.is_empty or cycle.start != cycle.end:
            raise GraphInputError("cycle part must be a nonempty closed path")
        if prefix.end != cycle.start:
            raise GraphInputError("cycle does not start where the prefix ends")
        start, edges = prefix.start, prefix.edges + cycle.edges
    if not pot.is_finite(start) or pot[start] != 0.0:
        return False
    return all(_is_tight(g, pot, e) for e in edges)


@dataclass(frozen=True)
class SinkOrbit:
    sink: str
    count: int  # dimension of the matrix summand


@dataclass(frozen=True)
class CycleOrbit:
    cycle: Path
    count: int  # matrix size over the circle


@dataclass(frozen=True)
class Census:
    sink_orbits: tuple[SinkOrbit, ...]
    cycle_orbits: tuple[CycleOrbit, ...]
    rich: bool
    tight: TightSubgraph
    potential: Potential
    reason: str | None = None

    def summary(self) -> str:
        if self.rich:
            return f"rich: {self.reason}"
        parts = [f"{o.sink}: M_{o.count}(C)" if o.count > 1 else f"{o.sink}: C" for o in self.sink_orbits]
        for o in self.cycle_orbits:
            ring = "C(T)" if o.count == 1 else f"M_{o.count}(C(T))"
            parts.append(f"({', '.join(o.cycle.edges)}) at {o.cycle.start}: {ring}")
        return "; ".join(parts) if parts else "none"


def census(g: Graph) -> Census:
    """Classify the minimal-weight boundary paths.

    The tight subgraph is cut down to vertices reachable from a start vertex
    that continue to a sink or a tight cycle.  It is classifiable when its
    cyclic parts are disjoint simple cycles with no live edge leaving them;
    otherwise the census is flagged rich.
    """
    pot = potentials(g)
    tight = tight_subgraph(g, pot)
    tg = nx.MultiDiGraph()
    tg.add_nodes_from(g.vertices)
    for eid in tight.tight_edges:
        e = g.edge(eid)
        tg.add_edge(e.source, e.range, key=eid)
    reach = set(tight.start_vertices)
    for v in tight.start_vertices:
        reach |= nx.descendants(tg, v)
    acc = tg.subgraph(reach)
    cyclic = [set(c) for c in nx.strongly_connected_components(acc) if acc.subgraph(c).number_of_edges() > 0]
    on_cycle = set().union(*cyclic) if cyclic else set()
    goals = on_cycle | {v for v in reach if not g.out_edges(v)}
    live = set(goals)
    for v in goals:
        live |= nx.ancestors(acc, v)
    lg = acc.subgraph(live)

    def rich(reason: str) -> Census:
        return Census((), (), True, tight, pot, reason)

    for comp in cyclic:
        sub = lg.subgraph(comp)
        if sub.number_of_edges() != len(comp):
            name = ", ".join(g.sorted(comp))
            return rich(f"tight cycles through {{{name}}} overlap")
        for v in comp:
            for _, w, eid in lg.out_edges(v, keys=True):
                if w not in comp:
                    return rich(f"tight edge {eid} leaves the cycle through {v}")

    dag = lg.subgraph(live - on_cycle)
    count: dict[str, int] = {}
    for v in nx.topological_sort(dag):
        count[v] = int(v in tight.start_vertices) + sum(count[u] for u, _, _ in dag.in_edges(v, keys=True))
    sink_orbits = tuple(
        SinkOrbit(s, count[s]) for s in g.vertices if s in count and not g.out_edges(s) and count[s] > 0
    )
    cycle_orbits = []
    for comp in sorted(cyclic, key=lambda c: min(g.index(v) for v in c)):
        entries = {
            v: int(v in tight.start_vertices)
            + sum(count[u] for u, _, _ in lg.in_edges(v, keys=True) if u not in comp)
            for v in comp
        }
        total = sum(entries.values())
        first = min((v for v, n in entries.items() if n > 0), key=g.index)
        edges, cur = [], first
        while True:
            (_, nxt, eid), = [t for t in lg.out_edges(cur, keys=True) if t[1] in comp]
            edges.append(eid)
            cur = nxt
            if cur == first:
                break
        cycle_orbits.append(CycleOrbit(Path(tuple(edges), first, first), total))
    return Census(sink_orbits, tuple(cycle_orbits), False, tight, pot)
