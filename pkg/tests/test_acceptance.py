"""The ten acceptance criteria, one test each.

The terminal summary prints a PASS/FAIL line per criterion.
"""

import math
import random

import numpy as np
import pytest

from kmsgraph.classify import RowShape, beta_c, classify_component, spectrum
from kmsgraph.errors import CycleLimitError
from kmsgraph.graph import Graph, ProfileTag, closure, component_by_label, components, sign_profile, sinks
from kmsgraph.ground import census
from kmsgraph.harmonic import decompose, extreme_points, recombine
from kmsgraph.states import CircularData, GaugeInvariantState, OmegaLambdaState
from kmsgraph.traces import algebra_structure, build_representation, format_structure, multiplicity
from checks import LAMBDAS, kms_residual, oracle_excess
from graphgen import block_radius, dirichlet, random_circular_setup, random_graph, random_positive_graph

LN2, LN4 = math.log(2), math.log(4)
RANDOM_GRAPHS = 20
BETAS = {
    "gauge": (-1.0, LN2 / 2, 0.5, 1.0, 2.0),
    "F1": (-LN2, -0.5, LN2 / 2, 1.0, 2.0),
    "F2": (-LN4, -2.0, -0.5, 1.0, 5.0),
}


def rows(g):
    return {r.label: r for r in spectrum(g)}


def test_criterion_01_critical_temperatures(gauge):
    for label in ("C2", "C4"):
        assert abs(beta_c(gauge, component_by_label(gauge, label)) - LN2 / 2) <= 1e-9


def test_criterion_02_gauge_extreme_point_counts(gauge):
    counts = {beta: len(extreme_points(gauge, beta)) for beta in (-1.0, LN2 / 2, 1.0)}
    assert counts == {-1.0: 1, LN2 / 2: 3, 1.0: 2}


def test_criterion_03_f1_spectrum(f1):
    r = rows(f1)
    assert r["s1"].shape is RowShape.FULL_LINE
    assert r["s2"].shape is RowShape.OPEN_RAY and r["s2"].direction == "+"
    assert abs(r["s2"].value - LN2 / 2) <= 1e-9
    assert r["C2"].shape is RowShape.POINT and abs(r["C2"].value + LN2) <= 1e-9
    assert r["C3"].shape is RowShape.OPEN_RAY and r["C3"].circle and r["C3"].direction == "+"
    assert abs(r["C3"].value - LN2 / 2) <= 1e-9
    assert r["C4"].shape is RowShape.POINT and abs(r["C4"].value - LN2 / 2) <= 1e-9
    assert r["C1"].shape is RowShape.ABSENT


def test_criterion_04_f2_spectrum(f2):
    r = rows(f2)
    assert r["s1"].shape is RowShape.FULL_LINE
    assert r["s2"].shape is RowShape.OPEN_RAY and r["s2"].direction == "-"
    assert abs(r["s2"].value + LN4) <= 1e-9
    assert r["C1"].shape is RowShape.FULL_LINE and r["C1"].circle
    assert r["C4"].shape is RowShape.POINT and abs(r["C4"].value + LN4) <= 1e-9
    assert r["C2"].shape is RowShape.ABSENT and r["C3"].shape is RowShape.ABSENT


def test_criterion_05_trace_structure(gauge):
    assert format_structure(algebra_structure(gauge)) == "M_2(C) (+) M_3(C(T))"
    assert multiplicity(gauge, "s1") == 2 and multiplicity(gauge, "C1") == 3


def test_criterion_06_ground_census(gauge, f1, f2):
    c = census(gauge)
    assert [o.sink for o in c.sink_orbits] == ["s1", "s2"] and not c.cycle_orbits and not c.rich
    c = census(f1)
    assert [o.sink for o in c.sink_orbits] == ["s1", "s2"]
    assert [o.cycle.edges for o in c.cycle_orbits] == [("c",)]
    c = census(f2)
    assert [o.sink for o in c.sink_orbits] == ["s1"]
    assert [(o.cycle.edges, o.cycle.start) for o in c.cycle_orbits] == [(("a", "e3"), "v4")]
    loops = Graph(["v"], [("x", "v", "v"), ("y", "v", "v"), ("z", "v", "v")], {"x": 0.0, "y": 0.0, "z": 1.0})
    assert census(loops).rich


def test_criterion_07_kms_condition(doc, seed):
    rng = random.Random(seed)
    worst, checked = 0.0, 0
    for profile, betas in BETAS.items():
        g = doc.graph(profile)
        for beta in betas:
            for p in extreme_points(g, beta):
                worst = max(worst, kms_residual(GaugeInvariantState(g, beta, p.vector), g, beta, rng))
                checked += 1
    f1, f2 = doc.graph("F1"), doc.graph("F2")
    for g, label in ((f1, "C3"), (f2, "C1")):
        d = CircularData.from_component(g, component_by_label(g, label))
        for lam in LAMBDAS:
            worst = max(worst, kms_residual(OmegaLambdaState(g, 1.0, d, lam), g, 1.0, rng))
            checked += 1
    print(f"KMS condition: {checked} states, max residual {worst:.3g}")
    assert checked >= 30 and worst <= 1e-9


def test_criterion_08_oracle_equivalence(doc, seed):
    rng = random.Random(seed)
    worst = -math.inf
    for profile, label in (("F1", "C3"), ("F2", "C1")):
        g = doc.graph(profile)
        d = CircularData.from_component(g, component_by_label(g, label))
        worst = max(worst, oracle_excess(g, d, 1.0, rng))
    for _ in range(RANDOM_GRAPHS):
        g, dv, _, beta = random_circular_setup(rng)
        assert len(g.vertices) <= 8 and len(g.edges) <= 16
        d = CircularData.from_component(g, next(c for c in components(g) if dv[0] in c))
        worst = max(worst, oracle_excess(g, d, beta, rng, words=15))
    print(f"oracle equivalence: worst excess over the tail bound {worst:.3g}")
    assert worst <= 0.0


def _grid(rng):
    return sorted({round(rng.uniform(-4, 4), 6) for _ in range(10)} | {-10.0, 10.0})


def test_criterion_09_simplex_and_radius(seed):
    rng = random.Random(seed)
    for _ in range(RANDOM_GRAPHS):
        g = random_positive_graph(rng)
        betas = [rng.uniform(-2, 2)]
        betas += [classify_component(g, c).beta_c for c in components(g)]
        for beta in (b for b in betas if b is not None):
            pts = extreme_points(g, beta)
            for p in pts:
                if p.component is not None:
                    assert p.vector.support() == closure(g, p.component.vertex_set)
                else:
                    assert all(p.vector[s] == 0.0 for s in sinks(g) if s != p.sink)
            if pts:
                coef = dirichlet(rng, len(pts))
                got = decompose(g, beta, recombine(g, pts, list(coef))).coefficients()
                assert max(abs(got[p.label] - c) for p, c in zip(pts, coef)) <= 1e-8
    for _ in range(RANDOM_GRAPHS):
        g = random_graph(rng)
        for c in components(g):
            grid = _grid(rng)
            radii = np.array([block_radius(g, b, c.vertex_set) for b in grid])
            logs = np.log(radii)
            for i in range(len(grid) - 2):
                t = (grid[i + 1] - grid[i]) / (grid[i + 2] - grid[i])
                assert logs[i + 1] <= (1 - t) * logs[i] + t * logs[i + 2] + 1e-9
            if c.circular:
                continue
            tag = sign_profile(g, c.vertex_set).tag
            if tag is ProfileTag.ALL_POSITIVE:
                assert np.all(np.diff(radii) < 0)
            elif tag is ProfileTag.ALL_NEGATIVE:
                assert np.all(np.diff(radii) > 0)
            else:
                assert np.all(radii > 1.0)


def test_criterion_10_cuntz_krieger_relations(gauge, seed):
    assert build_representation(gauge).relation_failures() == []
    rng = random.Random(seed)
    built = 0
    while built < RANDOM_GRAPHS:
        g = random_graph(rng)
        try:
            rep = build_representation(g)
        except CycleLimitError:
            continue
        if not rep.index or not g.edges:
            continue
        assert rep.relation_failures() == []
        built += 1
