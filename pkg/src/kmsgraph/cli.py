"""Command line front end.

Exit codes: 0 success, 1 domain error (bad graph, failed precondition,
numerical failure), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path as FsPath

from kmsgraph.classify import kms_sets, spectrum
from kmsgraph.errors import GraphInputError, KmsGraphError, PreconditionError
from kmsgraph.graph import Graph, Path, component_by_label
from kmsgraph.io import GraphDocument, dump_json, load_graph, bundled_example
from kmsgraph.render import render_ascii, render_svg
from kmsgraph.report import (
    analyze_report,
    classify_report,
    ground_report,
    spectrum_report,
    to_json,
    trace_report,
)
from kmsgraph.states import (
    CircleMeasure,
    CircularData,
    KmsState,
    KmsStateSpec,
    OmegaLambdaState,
    StateTerm,
    Word,
    kms_check,
    random_word_pair,
)

DEFAULT_SEED = 20240601


class UsageError(Exception):
    pass


def parse_path(g: Graph, text: str) -> Path | None:
    """``e1,e2`` for a path, ``@v`` for the empty path at ``v``, ``-`` for
    an empty path placed by the other half of the word."""
    text = text.strip()
    if text in ("", "-"):
        return None
    if text.startswith("@"):
        return g.vertex_path(text[1:])
    return g.path([t.strip() for t in text.split(",") if t.strip()])


def parse_word(g: Graph, mu: str, nu: str) -> Word:
    p_mu, p_nu = parse_path(g, mu), parse_path(g, nu)
    if p_mu is None and p_nu is None:
        raise UsageError("at least one of --mu/--nu must name a path or a vertex (@v)")
    if p_mu is None:
        p_mu = g.vertex_path(p_nu.end)
    if p_nu is None:
        p_nu = g.vertex_path(p_mu.end)
    return Word(p_mu, p_nu)


def parse_complex(text: str) -> complex:
    try:
        re, im = (float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected RE,IM, got {text!r}") from None
    return complex(re, im)


def _measure(raw) -> CircleMeasure:
    if raw is None or raw == "lebesgue":
        return CircleMeasure()
    atoms = raw.get("atoms") if isinstance(raw, dict) else None
    if not atoms:
        raise GraphInputError("measure must be 'lebesgue' or {'atoms': [[re, im, mass], ...]}")
    return CircleMeasure(tuple((complex(a[0], a[1]), float(a[2])) for a in atoms))


def load_state_spec(path: str, beta: float) -> KmsStateSpec:
    """JSON file ``{"terms": [{"source": .., "weight": .., "measure": ..}]}``."""
    try:
        raw = json.loads(FsPath(path).read_text())
    except json.JSONDecodeError as exc:
        raise GraphInputError(f"state spec: {exc.msg}", exc.lineno, exc.colno) from None
    try:
        terms = tuple(
            StateTerm(str(t["source"]), float(t.get("weight", 1.0)), _measure(t.get("measure")))
            for t in raw["terms"]
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise GraphInputError(f"state spec: malformed terms ({exc})") from None
    return KmsStateSpec(beta, terms)


def _load(args) -> tuple[GraphDocument, Graph]:
    doc = bundled_example() if args.graph is None else load_graph(args.graph)
    profile = args.profile
    if profile is None and args.graph is None:
        profile = "gauge"
    return doc, doc.graph(profile)


def cmd_analyze(args, g, doc):
    return to_json(analyze_report(g))


def cmd_classify(args, g, doc):
    if abs(args.beta) <= 1e-12:
        raise PreconditionError("beta = 0 describes trace states; run the 'trace' command instead")
    return to_json(classify_report(g, args.beta))


def cmd_spectrum(args, g, doc):
    rows = spectrum(g)
    if args.format == "ascii":
        return render_ascii(rows).rstrip("\n")
    if args.format == "svg":
        return render_svg(rows).rstrip("\n")
    return to_json(spectrum_report(g))


def _value(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def cmd_state_eval(args, g, doc):
    state = KmsState(g, load_state_spec(args.spec, args.beta))
    w = parse_word(g, args.mu, args.nu)
    return to_json({"beta": args.beta, "word": str(w), "value": _value(state(w))})


def cmd_omega(args, g, doc):
    d = CircularData.from_component(g, component_by_label(g, args.component), args.base)
    lam = parse_complex(args.lam)
    state = OmegaLambdaState(g, args.beta, d, lam)
    w = parse_word(g, args.mu, args.nu)
    return to_json(
        {
            "beta": args.beta,
            "component": args.component,
            "base": d.base,
            "lambda": _value(lam),
            "normalizer": state.z,
            "word": str(w),
            "value": _value(state(w)),
        }
    )


def cmd_trace(args, g, doc):
    report = trace_report(g)
    return report["structure"] if args.format == "text" else to_json(report)


def cmd_ground(args, g, doc):
    report = ground_report(g)
    return report["summary"] if args.format == "text" else to_json(report)


def cmd_check(args, g, doc):
    """Random KMS-condition residuals for every extremal state at ``beta``."""
    rng = random.Random(args.seed)
    sets = kms_sets(g, args.beta)
    states = {}
    for c in sets.noncircular + sets.circular:
        states[c.label] = KmsState(g, KmsStateSpec(args.beta, (StateTerm(c.label, 1.0),)))
    for s in sets.sinks:
        states[s] = KmsState(g, KmsStateSpec(args.beta, (StateTerm(s, 1.0),)))
    for c in sets.circular:
        for lam in (1, 1j):
            states[f"{c.label}@{lam}"] = OmegaLambdaState(g, args.beta, CircularData.from_component(g, c), lam)
    worst = {}
    for name, st in states.items():
        pairs = [random_word_pair(g, rng, args.max_len) for _ in range(args.pairs)]
        worst[name] = max((kms_check(st, args.beta, a, b, g) for a, b in pairs), default=0.0)
    return to_json({"beta": args.beta, "seed": args.seed, "pairs": args.pairs, "max_residual": worst})


def cmd_dump(args, g, doc):
    return dump_json(doc)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kmsgraph", description="KMS, trace and ground states of gauge-type actions on graph algebras."
    )
    parser.add_argument("--graph", help="graph document (text or JSON); default: bundled example")
    parser.add_argument("--profile", help="weight profile (default: base column; 'gauge' for the example)")
    parser.add_argument("--output-dir", help="also write the output to a file in this directory")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", help="components, closures and loop-sign profiles").set_defaults(func=cmd_analyze)

    p = sub.add_parser("classify", help="verdicts, KMS index sets and extreme points at beta")
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("spectrum", help="where each sink and component contributes")
    p.add_argument("--format", choices=("ascii", "svg", "json"), default="ascii")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("state-eval", help="evaluate a KMS state on S_mu S_nu*")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--spec", required=True, help="JSON file with the convex data")
    p.add_argument("--mu", default="-")
    p.add_argument("--nu", default="-")
    p.set_defaults(func=cmd_state_eval)

    p = sub.add_parser("omega", help="evaluate the circle-parametrized state of a zero-weight cycle")
    p.add_argument("--component", required=True)
    p.add_argument("--lambda", dest="lam", required=True, help="RE,IM on the unit circle")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--base", help="base vertex on the cycle (default: least member)")
    p.add_argument("--mu", default="-")
    p.add_argument("--nu", default="-")
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("trace", help="structure of the trace states (beta = 0)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("ground", help="ground-state census")
    p.add_argument("--format", choices=("text", "json"), default="json")
    p.set_defaults(func=cmd_ground)

    p = sub.add_parser("check", help="random KMS-condition residuals for the extremal states")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_check)

    sub.add_parser("dump", help="print the graph document as JSON").set_defaults(func=cmd_dump)
    return parser


_SUFFIX = {"ascii": "txt", "svg": "svg", "json": "json", "text": "txt"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc, g = _load(args)
        out = args.func(args, g, doc)
    except UsageError as exc:
        print(f"kmsgraph: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"kmsgraph: {exc}", file=sys.stderr)
        return 2
    except KmsGraphError as exc:
        print(f"kmsgraph: error: {exc}", file=sys.stderr)
        return 1
    print(out)
    if args.output_dir:
        target = FsPath(args.output_dir)
        target.mkdir(parents=True, exist_ok=True)
        fmt = getattr(args, "format", "json")
        name = args.command + (f"-{args.profile}" if args.profile else "")
        path = target / f"{name}.{_SUFFIX.get(fmt, 'json')}"
        path.write_text(out + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
