"""Reading and writing graph documents.

Text format, one construct per line, ``#`` starts a comment::

    profile F1
    vertex v1
    edge <id> <source> <range> <weight> [NAME=weight ...]

The weight column is the base profile; ``NAME=value`` overrides it for the
named profile.  A profile named on an edge is declared implicitly.  JSON
documents carry the same data (see :func:`dump_json`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path as FsPath

from kmsgraph.errors import GraphInputError
from kmsgraph.graph import Edge, Graph

BASE_PROFILE = "base"


@dataclass
class GraphDocument:
    vertices: list[str]
    edges: list[Edge]
    weights: dict[str, float]
    profiles: dict[str, dict[str, float]] = field(default_factory=dict)

    def profile_names(self) -> list[str]:
        return [BASE_PROFILE, *self.profiles]

    def weights_for(self, profile: str | None = None) -> dict[str, float]:
        if profile is None or profile == BASE_PROFILE:
            return dict(self.weights)
        try:
            overrides = self.profiles[profile]
        except KeyError:
            known = ", ".join(self.profile_names())
            raise GraphInputError(f"unknown profile {profile!r} (known: {known})") from None
        return {**self.weights, **overrides}

    def graph(self, profile: str | None = None) -> Graph:
        return Graph(self.vertices, self.edges, self.weights_for(profile))


def _number(token: str, line: int, column: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise GraphInputError(f"expected a number, got {token!r}", line, column) from None
    if not math.isfinite(value):
        raise GraphInputError(f"weight {token!r} is not finite", line, column)
    return value


def parse_text(text: str) -> GraphDocument:
    vertices: list[str] = []
    edges: list[Edge] = []
    weights: dict[str, float] = {}
    profiles: dict[str, dict[str, float]] = {}
    seen_v: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        tokens = []
        pos = 0
        for tok in content.split():
            col = content.index(tok, pos)
            pos = col + len(tok)
            tokens.append((tok, col + 1))
        kind, kcol = tokens[0]
        args = tokens[1:]
        if kind == "profile":
            if len(args) != 1:
                raise GraphInputError("usage: profile <name>", lineno, kcol)
            name = args[0][0]
            if name == BASE_PROFILE:
                raise GraphInputError(f"profile name {BASE_PROFILE!r} is reserved", lineno, args[0][1])
            profiles.setdefault(name, {})
        elif kind == "vertex":
            if len(args) != 1:
                raise GraphInputError("usage: vertex <id>", lineno, kcol)
            v, vcol = args[0]
            if v in seen_v:
                raise GraphInputError(f"duplicate vertex id {v!r}", lineno, vcol)
            seen_v.add(v)
            vertices.append(v)
        elif kind == "edge":
            if len(args) < 4:
                raise GraphInputError("usage: edge <id> <source> <range> <weight> [NAME=weight ...]", lineno, kcol)
            (eid, ecol), (src, scol), (dst, dcol), (wt, wcol) = args[:4]
            if eid in weights:
                raise GraphInputError(f"duplicate edge id {eid!r}", lineno, ecol)
            for v, c in ((src, scol), (dst, dcol)):
                if v not in seen_v:
                    raise GraphInputError(f"edge {eid!r} refers to undeclared vertex {v!r}", lineno, c)
            edges.append(Edge(eid, src, dst))
            weights[eid] = _number(wt, lineno, wcol)
            for tok, col in args[4:]:
                name, sep, value = tok.partition("=")
                if not sep or not name:
                    raise GraphInputError(f"expected NAME=weight, got {tok!r}", lineno, col)
                if name == BASE_PROFILE:
                    raise GraphInputError(f"profile name {BASE_PROFILE!r} is reserved", lineno, col)
                profiles.setdefault(name, {})[eid] = _number(value, lineno, col + len(name) + 1)
        else:
            raise GraphInputError(f"unknown directive {kind!r}", lineno, kcol)
    if not vertices:
        raise GraphInputError("document declares no vertices")
    return GraphDocument(vertices, edges, weights, profiles)


def parse_json(text: str) -> GraphDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphInputError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict) or "vertices" not in data:
        raise GraphInputError("JSON graph must be an object with 'vertices' and 'edges'")
    vertices = [str(v) for v in data["vertices"]]
    if not vertices:
        raise GraphInputError("document declares no vertices")
    if len(set(vertices)) != len(vertices):
        raise GraphInputError("duplicate vertex ids")
    edges, weights = [], {}
    profiles: dict[str, dict[str, float]] = {str(p): {} for p in data.get("profiles", [])}
    for item in data.get("edges", []):
        try:
            e = Edge(str(item["id"]), str(item["source"]), str(item["range"]))
            w = float(item["weight"])
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphInputError(f"malformed edge entry {item!r}: {exc}") from None
        if e.id in weights:
            raise GraphInputError(f"duplicate edge id {e.id!r}")
        if not math.isfinite(w):
            raise GraphInputError(f"weight of edge {e.id!r} is not finite")
        edges.append(e)
        weights[e.id] = w
        for name, value in item.get("profiles", {}).items():
            profiles.setdefault(str(name), {})[e.id] = float(value)
    doc = GraphDocument(vertices, edges, weights, profiles)
    doc.graph()  # validates endpoints
    return doc


def parse_graph(document: str) -> GraphDocument:
    """Parse a text or JSON graph document (JSON if it starts with ``{``)."""
    if not document.strip():
        raise GraphInputError("empty document")
    if document.lstrip().startswith("{"):
        return parse_json(document)
    doc = parse_text(document)
    doc.graph()
    return doc


def load_graph(path: str | FsPath) -> GraphDocument:
    return parse_graph(FsPath(path).read_text())


def bundled_example() -> GraphDocument:
    """The bundled eleven-vertex example with profiles gauge, F1 and F2."""
    text = resources.files("kmsgraph").joinpath("data/example.graph").read_text()
    return parse_graph(text)


def dump_json(doc: GraphDocument) -> str:
    edges = []
    for e in doc.edges:
        item = {"id": e.id, "source": e.source, "range": e.range, "weight": doc.weights[e.id]}
        overrides = {name: ov[e.id] for name, ov in doc.profiles.items() if e.id in ov}
        if overrides:
            item["profiles"] = overrides
        edges.append(item)
    payload = {"vertices": list(doc.vertices), "profiles": list(doc.profiles), "edges": edges}
    return json.dumps(payload, indent=2, sort_keys=True)
