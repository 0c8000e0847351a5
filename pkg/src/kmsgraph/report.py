"""JSON-ready summaries of every analysis, shared by the CLI and tests."""

from __future__ import annotations

import json
import math

from kmsgraph.classify import VerdictKind, classify_component, classify_sink, kms_sets, spectrum
from kmsgraph.graph import Graph, closure, components, sign_profile, sinks
from kmsgraph.ground import census
from kmsgraph.harmonic import phi_component, phi_sink
from kmsgraph.render import closed_form, row_json
from kmsgraph.traces import algebra_structure, build_representation, format_structure, zero_sets


def to_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)


def _num(x: float | None):
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def analyze_report(g: Graph) -> dict:
    comps = []
    for c in components(g):
        region = closure(g, c.vertex_set)
        comps.append(
            {
                "label": c.label,
                "members": list(c.members),
                "circular": c.circular,
                "loop": list(c.loop.edges) if c.loop else None,
                "loop_weight": g.path_weight(c.loop) if c.loop else None,
                "closure": list(g.sorted(region)),
                "profile": sign_profile(g, c.vertex_set).tag.value,
                "closure_profile": sign_profile(g, region).tag.value,
            }
        )
    snk = [
        {
            "sink": s,
            "closure": list(g.sorted(closure(g, {s}))),
            "closure_profile": sign_profile(g, closure(g, {s})).tag.value,
        }
        for s in sinks(g)
    ]
    return {"vertices": list(g.vertices), "edges": len(g.edges), "components": comps, "sinks": snk}


def _interval(iv) -> dict | None:
    if iv is None:
        return None
    return {
        "lower": _num(iv.lower),
        "upper": _num(iv.upper),
        "lower_source": iv.lower_source,
        "upper_source": iv.upper_source,
    }


def _vector(ep) -> dict[str, float]:
    return {v: x for v, x in ep.vector.as_dict().items() if x != 0.0}


def classify_report(g: Graph, beta: float) -> dict:
    sets = kms_sets(g, beta)
    verdicts = []
    for c in components(g):
        v = classify_component(g, c)
        verdicts.append(
            {
                "component": c.label,
                "verdict": v.kind.value,
                "beta_c": v.beta_c,
                "beta_c_label": None if v.beta_c is None else closed_form(v.beta_c),
                "types": sorted(v.types),
                "interval": _interval(v.interval) if v.kind is VerdictKind.CIRCULAR else None,
                "reason": v.reason,
                "detail": v.detail or None,
            }
        )
    sink_rows = []
    for s in sinks(g):
        v = classify_sink(g, s)
        sink_rows.append({"sink": s, "types": sorted(v.types), "interval": _interval(v.interval), "reason": v.reason})
    extreme = {}
    for c in sets.noncircular + sets.circular:
        extreme[c.label] = _vector(phi_component(g, beta, c))
    for s in sets.sinks:
        extreme[s] = _vector(phi_sink(g, beta, s))
    return {
        "beta": beta,
        "components": verdicts,
        "sinks": sink_rows,
        "kms_sets": {
            "noncircular": [c.label for c in sets.noncircular],
            "circular": [c.label for c in sets.circular],
            "sinks": list(sets.sinks),
        },
        "extreme_points": extreme,
        "gauge_invariant_count": sets.size,
    }


def spectrum_report(g: Graph) -> dict:
    return {"rows": [row_json(r) for r in spectrum(g)]}


def trace_report(g: Graph) -> dict:
    zs = zero_sets(g)
    summands = algebra_structure(g)
    rep = build_representation(g)
    circle_entries = sorted(
        f"S_{eid}" for eid, m in rep.isometries.items() for p in m.entries.values() if p.degrees() != {0}
    )
    return {
        "structure": format_structure(summands),
        "summands": [
            {"source": s.source, "dimension": s.dimension, "kind": s.kind.value, "base": s.base} for s in summands
        ],
        "blocks": {label: [str(p) for p in paths] for label, paths in rep.blocks.items()},
        "circle_generators": circle_entries,
        "null_set": list(g.sorted(zs.null)),
        "relations_verified": True,
    }


def ground_report(g: Graph) -> dict:
    cen = census(g)
    out = {
        "potential": cen.potential.as_json(),
        "start_vertices": list(g.sorted(cen.tight.start_vertices)),
        "tight_edges": list(cen.tight.tight_edges),
        "rich": cen.rich,
        "reason": cen.reason,
        "summary": cen.summary(),
        "sink_orbits": [{"sink": o.sink, "dimension": o.count} for o in cen.sink_orbits],
        "cycle_orbits": [
            {"cycle": list(o.cycle.edges), "start": o.cycle.start, "dimension": o.count, "family": "circle"}
            for o in cen.cycle_orbits
        ],
    }
    return out
