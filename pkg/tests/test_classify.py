import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kmsgraph.classify import (
    NEGATIVE,
    POSITIVE,
    RowShape,
    VerdictKind,
    beta_c,
    classify_component,
    classify_sink,
    kms_sets,
    spectrum,
)
from kmsgraph.errors import NoCriticalBetaError, PreconditionError
from kmsgraph.graph import Graph, ProfileTag, component_by_label, components, sign_profile, sinks
from kmsgraph.harmonic import extreme_points, is_harmonic_component, is_summable_sink
from graphgen import block_radius, random_graph

seeds = st.integers(min_value=0, max_value=10**6)
LN2, LN4 = math.log(2), math.log(4)
GRID = [b for b in np.linspace(-3, 3, 25) if abs(b) > 1e-9] + [LN2 / 2, -LN2, -LN4, 0.5 * LN2 + 1e-3]


def C(g, label):
    return component_by_label(g, label)


def test_beta_c_examples(gauge, f1):
    assert beta_c(gauge, C(gauge, "C2")) == pytest.approx(LN2 / 2, abs=1e-12)
    assert beta_c(gauge, C(gauge, "C4")) == pytest.approx(LN2 / 2, abs=1e-12)
    assert beta_c(f1, C(f1, "C2")) == pytest.approx(-LN2, abs=1e-12)
    assert beta_c(f1, C(f1, "C1")) == 0.0


def test_beta_c_zero_cycle_raises(f2):
    with pytest.raises(NoCriticalBetaError):
        beta_c(f2, C(f2, "C1"))


def test_beta_c_mixed_raises():
    g = Graph(["v"], [("p", "v", "v"), ("n", "v", "v")], {"p": 1.0, "n": -1.0})
    with pytest.raises(NoCriticalBetaError):
        beta_c(g, components(g)[0])


def test_verdict_examples(gauge, f2):
    v = classify_component(f2, C(f2, "C4"))
    assert v.kind is VerdictKind.NEGATIVE and v.beta_c == pytest.approx(-LN4, abs=1e-12)
    v = classify_component(f2, C(f2, "C1"))
    assert v.kind is VerdictKind.CIRCULAR and v.types == {POSITIVE, NEGATIVE} and v.interval.is_full_line
    v = classify_component(f2, C(f2, "C2"))
    assert v.kind is VerdictKind.NONE and v.reason == "zero_loop_in_closure"
    v = classify_component(gauge, C(gauge, "C1"))
    assert v.kind is VerdictKind.NONE and v.reason == "circular_loop_nonzero"


def test_order_violation_reason(f1):
    v = classify_component(f1, C(f1, "C4"))
    assert v.kind is VerdictKind.POSITIVE
    loops = [("x1", "a", "a"), ("x2", "a", "a"), ("y", "b", "a")] + [(f"z{i}", "b", "b") for i in range(3)]
    g = Graph(["a", "b"], loops, {e[0]: 1.0 for e in loops})
    ca = next(c for c in components(g) if "a" in c)
    va = classify_component(g, ca)
    assert va.kind is VerdictKind.NONE and va.reason == "order_violation"
    assert va.beta_c == pytest.approx(LN2, abs=1e-12)
    cb = next(c for c in components(g) if "b" in c)
    assert classify_component(g, cb).beta_c == pytest.approx(math.log(3), abs=1e-12)


def test_sink_examples(gauge, f1, f2):
    for g in (gauge, f1, f2):
        assert classify_sink(g, "s1").interval.is_full_line
    v = classify_sink(gauge, "s2")
    assert v.types == {POSITIVE}
    assert v.interval.lower == pytest.approx(LN2 / 2, abs=1e-12) and v.interval.upper == math.inf
    v = classify_sink(f2, "s2")
    assert v.types == {NEGATIVE}
    assert v.interval.upper == pytest.approx(-LN4, abs=1e-12) and v.interval.lower == -math.inf
    with pytest.raises(PreconditionError):
        classify_sink(gauge, "v2")


def _labels(sets):
    return (
        [c.label for c in sets.noncircular],
        [c.label for c in sets.circular],
        list(sets.sinks),
    )


def test_kms_sets_examples(gauge, f1, f2):
    assert _labels(kms_sets(gauge, LN2 / 2)) == (["C2", "C4"], [], ["s1"])
    assert _labels(kms_sets(f1, 1.0)) == ([], ["C3"], ["s1", "s2"])
    assert _labels(kms_sets(f2, 5.0)) == ([], ["C1"], ["s1"])
    with pytest.raises(PreconditionError):
        kms_sets(gauge, 0.0)


def test_interval_endpoint_excluded(gauge):
    assert "s2" not in kms_sets(gauge, LN2 / 2).sinks
    assert "s2" in kms_sets(gauge, LN2 / 2 + 1e-6).sinks


def _rows(g):
    return {r.label: r for r in spectrum(g)}


def test_spectrum_gauge(gauge):
    rows = _rows(gauge)
    assert rows["s1"].shape is RowShape.FULL_LINE
    assert rows["s2"].shape is RowShape.OPEN_RAY and rows["s2"].direction == "+"
    assert rows["C2"].shape is RowShape.POINT and rows["C4"].shape is RowShape.POINT
    assert rows["C1"].shape is RowShape.ABSENT and rows["C3"].shape is RowShape.ABSENT


def test_spectrum_endpoint_sources(f1):
    rows = _rows(f1)
    assert rows["C3"].circle and rows["C3"].source == "C4"
    assert rows["s2"].source == "C4"


def test_membership_matches_harmonic_checks(gauge, f1, f2):
    for g in (gauge, f1, f2):
        for beta in GRID:
            sets = kms_sets(g, beta)
            chosen = {c.label for c in sets.noncircular + sets.circular}
            for c in components(g):
                assert (c.label in chosen) == is_harmonic_component(g, beta, c), (c.label, beta)
            for s in sinks(g):
                assert (s in sets.sinks) == is_summable_sink(g, beta, s), (s, beta)
            assert len(extreme_points(g, beta)) == sets.size


def _betas(rng):
    return sorted({round(rng.uniform(-4, 4), 6) for _ in range(12)} | {-10.0, 10.0})


@given(seeds)
def test_radius_trichotomy(s):
    rng = random.Random(s)
    g = random_graph(rng)
    for c in components(g):
        grid = _betas(rng)
        radii = [block_radius(g, b, c.vertex_set) for b in grid]
        if c.circular:
            w, p = g.path_weight(c.loop), len(c)
            for b, r in zip(grid, radii):
                assert r == pytest.approx(math.exp(-b * w / p), rel=1e-12)
            continue
        tag = sign_profile(g, c.vertex_set).tag
        if tag is ProfileTag.ALL_POSITIVE:
            assert all(x > y for x, y in zip(radii, radii[1:]))
        elif tag is ProfileTag.ALL_NEGATIVE:
            assert all(x < y for x, y in zip(radii, radii[1:]))
        else:
            assert all(r > 1.0 for r in radii)
            continue
        bc = beta_c(g, c)
        assert block_radius(g, bc, c.vertex_set) == pytest.approx(1.0, abs=1e-9)


@given(seeds)
def test_verdict_invariants(s):
    rng = random.Random(s)
    g = random_graph(rng)
    for c in components(g):
        v = classify_component(g, c)
        if v.kind is VerdictKind.POSITIVE:
            assert v.beta_c > 0
        if v.kind is VerdictKind.NEGATIVE:
            assert v.beta_c < 0
        if v.kind is VerdictKind.CIRCULAR:
            assert g.path_weight(c.loop) == 0.0
            assert v.types and v.interval is not None
    for beta in _betas(rng):
        sets = kms_sets(g, beta)
        for c in sets.noncircular:
            assert abs(classify_component(g, c).beta_c - beta) <= 1e-9
        for x in sets.circular:
            assert classify_component(g, x).interval.contains(beta)
