"""Trace states (``beta = 0``).

Trace states are supported on sinks and circular components whose closure
holds no other component.  Each sink ``s`` contributes a full matrix algebra
of size ``n_s`` and each such circular component ``C`` a matrix algebra of
size ``n_C`` over the continuous functions on the circle.  The isomorphism
is realized concretely by matrices of Laurent polynomials.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from kmsgraph.config import DEFAULT_LIMITS, Limits
from kmsgraph.errors import CycleLimitError, GraphInputError, PreconditionError, RepresentationError
from kmsgraph.graph import Component, Graph, Path, closure, components, components_in, sinks
from kmsgraph.laurent import LaurentMatrix, LaurentPoly
from kmsgraph.states import LEBESGUE, CircleMeasure, StateTerm, Word


@dataclass(frozen=True)
class ZeroSets:
    circulars: tuple[Component, ...]
    sinks: tuple[str, ...]
    null: frozenset[str]  # hereditary saturated set killed by every trace state

    def labels(self) -> list[str]:
        return list(self.sinks) + [c.label for c in self.circulars]


def _isolated(g: Graph, region: frozenset[str], own: frozenset[str]) -> bool:
    return not components_in(g, region - own)


def zero_sets(g: Graph) -> ZeroSets:
    circ = tuple(
        c for c in components(g) if c.circular and _isolated(g, closure(g, c.vertex_set), c.vertex_set)
    )
    snk = tuple(s for s in sinks(g) if _isolated(g, closure(g, {s}), frozenset({s})))
    covered: set[str] = set()
    for c in circ:
        covered |= closure(g, c.vertex_set)
    for s in snk:
        covered |= closure(g, {s})
    return ZeroSets(circ, snk, frozenset(g.vertices) - covered)


class SummandKind(enum.Enum):
    MATRIX = "MatrixAlgebra"
    CIRCLE = "MatrixOverCircle"


@dataclass(frozen=True)
class AlgebraSummand:
    source: str
    dimension: int
    kind: SummandKind
    base: str | None = None

    def __str__(self) -> str:
        ring = "C(T)" if self.kind is SummandKind.CIRCLE else "C"
        return ring if self.dimension == 1 else f"M_{self.dimension}({ring})"


def _resolve(g: Graph, zs: ZeroSets, source) -> tuple[str, Component | None]:
    if isinstance(source, Component):
        source = source.label
    if source in zs.sinks:
        return source, None
    for c in zs.circulars:
        if c.label == source:
            return source, c
    raise PreconditionError(f"{source!r} supports no trace state")


def _paths_into(
    g: Graph, target: str, avoid: str | None, allowed: frozenset[str] | None, limits: Limits
) -> list[Path]:
    """All paths ending at ``target`` using no edge sourced at ``avoid``."""
    out = [g.vertex_path(target)]
    stack = [(target, ())]
    while stack:
        v, suffix = stack.pop()
        for e in g.in_edges(v):
            if e.source == avoid or (allowed is not None and e.id not in allowed):
                continue
            edges = (e.id,) + suffix
            out.append(Path(edges, e.source, target))
            if len(out) > limits.max_simple_cycles:
                raise CycleLimitError(f"more than {limits.max_simple_cycles} paths end at {target}")
            stack.append((e.source, edges))
    out.sort(key=lambda p: (len(p), p.edges))
    return out


def _quotient_edges(g: Graph, zs: ZeroSets) -> frozenset[str]:
    return frozenset(e.id for e in g.edges if e.range not in zs.null)


def _base(c: Component | None, bases: Mapping[str, str] | None) -> str | None:
    if c is None:
        return None
    base = (bases or {}).get(c.label, c.base)
    if base not in c:
        raise PreconditionError(f"{base!r} is not a vertex of {c.label}")
    return base


def multiplicity(g: Graph, source, base: str | None = None, limits: Limits = DEFAULT_LIMITS) -> int:
    """``n_s`` (paths ending at ``s``) or ``n_C`` (paths ending at the base
    of ``C`` with no edge leaving the base).  Counted in the graph and in the
    quotient by the null set; the two counts must agree."""
    zs = zero_sets(g)
    label, comp = _resolve(g, zs, source)
    target = label if comp is None else _base(comp, {label: base} if base else None)
    avoid = None if comp is None else target
    n_graph = len(_paths_into(g, target, avoid, None, limits))
    n_quot = len(_paths_into(g, target, avoid, _quotient_edges(g, zs), limits))
    if n_graph != n_quot:
        raise RepresentationError(f"path counts differ for {label}: {n_graph} in G, {n_quot} in the quotient")
    return n_graph


def algebra_structure(g: Graph, limits: Limits = DEFAULT_LIMITS) -> list[AlgebraSummand]:
    zs = zero_sets(g)
    out = [AlgebraSummand(s, multiplicity(g, s, limits=limits), SummandKind.MATRIX) for s in zs.sinks]
    out += [
        AlgebraSummand(c.label, multiplicity(g, c, limits=limits), SummandKind.CIRCLE, c.base) for c in zs.circulars
    ]
    return out


def format_structure(summands: Iterable[AlgebraSummand]) -> str:
    parts = [str(s) for s in summands]
    return " (+) ".join(parts) if parts else "0"


@dataclass
class TraceRepresentation:
    """Images of ``P_v`` and ``S_e`` as block diagonal Laurent matrices.

    Rows and columns are pairs ``(source label, path)``; the block of a
    source is indexed by the paths counted in its multiplicity.
    """

    graph: Graph
    zero: ZeroSets
    bases: dict[str, str]
    blocks: dict[str, tuple[Path, ...]]
    circle_blocks: frozenset[str]
    projections: dict[str, LaurentMatrix] = field(default_factory=dict)
    isometries: dict[str, LaurentMatrix] = field(default_factory=dict)

    @property
    def index(self) -> tuple:
        return tuple((a, p) for a, paths in self.blocks.items() for p in paths)

    def block_keys(self, label: str) -> list[tuple]:
        return [(label, p) for p in self.blocks[label]]

    def path_matrix(self, p: Path) -> LaurentMatrix:
        m = self.projections[p.start]
        for e in p.edges:
            m = m @ self.isometries[e]
        return m

    def word_matrix(self, w: Word) -> LaurentMatrix:
        return self.path_matrix(w.mu) @ self.path_matrix(w.nu).star()

    def relation_failures(self) -> list[str]:
        """Every violated relation; empty means the family is Cuntz-Krieger."""
        g, bad = self.graph, []
        ident = LaurentMatrix(self.index, {(k, k): LaurentPoly.const(1) for k in self.index})
        total = LaurentMatrix.zero(self.index)
        for v in g.vertices:
            p = self.projections[v]
            total = total + p
            if p @ p != p or p.star() != p:
                bad.append(f"P_{v} is not a projection")
        if total != ident:
            bad.append("projections do not sum to the identity")
        for v in g.vertices:
            for w in g.vertices:
                if v < w and not (self.projections[v] @ self.projections[w]).is_zero():
                    bad.append(f"P_{v} P_{w} != 0")
        for e in g.edges:
            s = self.isometries[e.id]
            if s.star() @ s != self.projections[e.range]:
                bad.append(f"S_{e.id}* S_{e.id} != P_{e.range}")
        for v in g.vertices:
            outs = [e for e in g.out_edges(v) if e.range not in self.zero.null]
            if not outs:
                continue
            acc = LaurentMatrix.zero(self.index)
            for e in outs:
                s = self.isometries[e.id]
                acc = acc + s @ s.star()
            if acc != self.projections[v]:
                bad.append(f"P_{v} != sum of S_e S_e* over edges leaving {v}")
        for v in self.zero.null:
            if not self.projections[v].is_zero():
                bad.append(f"P_{v} survives although {v} is in the null set")
        return bad


def build_representation(
    g: Graph, bases: Mapping[str, str] | None = None, limits: Limits = DEFAULT_LIMITS
) -> TraceRepresentation:
    zs = zero_sets(g)
    blocks: dict[str, tuple[Path, ...]] = {}
    chosen: dict[str, str] = {}
    allowed = _quotient_edges(g, zs)
    for s in zs.sinks:
        blocks[s] = tuple(_paths_into(g, s, None, allowed, limits))
    for c in zs.circulars:
        b = _base(c, bases)
        chosen[c.label] = b
        blocks[c.label] = tuple(_paths_into(g, b, b, allowed, limits))
    rep = TraceRepresentation(g, zs, chosen, blocks, frozenset(c.label for c in zs.circulars))
    index = rep.index
    keys = set(index)
    for v in g.vertices:
        rep.projections[v] = LaurentMatrix(
            index, {(k, k): LaurentPoly.const(1) for k in index if k[1].start == v}
        )
    one, z = LaurentPoly.const(1), LaurentPoly.z()
    for e in g.edges:
        entries = {}
        if e.id in allowed:
            for label, paths in blocks.items():
                b = chosen.get(label)
                for alpha in paths:
                    if alpha.start != e.range:
                        continue
                    if b is not None and e.source == b:
                        # closing the cycle at the base winds once round the circle
                        entries[((label, g.vertex_path(b)), (label, alpha))] = z
                    else:
                        target = (label, g.path((e.id,) + alpha.edges) if alpha.edges else g.path((e.id,)))
                        if target not in keys:
                            raise RepresentationError(f"path {target[1]} missing from block {label}")
                        entries[(target, (label, alpha))] = one
        rep.isometries[e.id] = LaurentMatrix(index, entries)
    bad = rep.relation_failures()
    if bad:
        raise RepresentationError("; ".join(bad))
    return rep


class TraceState:
    """Trace state given by weights on the summands and, for circle
    summands, a probability measure (Lebesgue picks the constant term)."""

    def __init__(self, g: Graph, terms: Iterable[StateTerm], rep: TraceRepresentation | None = None):
        self.graph = g
        self.beta = 0.0
        self.rep = rep or build_representation(g)
        self.terms = tuple(terms)
        if any(t.weight < 0 for t in self.terms) or abs(sum(t.weight for t in self.terms) - 1.0) > 1e-9:
            raise PreconditionError("trace weights must be nonnegative and sum to 1")
        for t in self.terms:
            if t.source not in self.rep.blocks:
                raise GraphInputError(f"{t.source!r} is not a trace summand")

    def _integrate(self, p: LaurentPoly, label: str, measure: CircleMeasure | None) -> complex:
        if label not in self.rep.circle_blocks or measure is None or measure.is_lebesgue:
            return complex(p.constant_term())
        return sum((m * p(lam) for lam, m in measure.atoms), 0j)

    def __call__(self, w: Word | None) -> complex:
        if w is None:
            return 0j
        mat = self.rep.word_matrix(w)
        total = 0j
        for t in self.terms:
            keys = self.rep.block_keys(t.source)
            tr = mat.trace(keys)
            total += t.weight * self._integrate(tr, t.source, t.measure or LEBESGUE) / len(keys)
        return total
