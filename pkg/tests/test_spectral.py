import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kmsgraph.errors import PreconditionError
from kmsgraph.graph import Graph, components
from kmsgraph.spectral import (
    WeightMatrix,
    a_beta,
    neumann_inverse,
    perron_vector,
    restrict,
    riesz_decompose,
    spectral_radius,
)
from graphgen import random_graph, random_positive_graph
from oracles import radius_oracle, submatrix, truncated_neumann

seeds = st.integers(min_value=0, max_value=10**6)
LN2 = math.log(2)


def test_a_beta_at_zero_is_adjacency(gauge):
    m = a_beta(gauge, 0.0)
    assert m.entry("v6", "v5") == 2.0 and m.entry("v5", "v6") == 1.0 and m.entry("v2", "v5") == 0.0


def test_a_beta_parallel_edges(gauge):
    assert a_beta(gauge, LN2).entry("v6", "v5") == pytest.approx(1.0, abs=1e-15)


def test_single_edge_entry():
    g = Graph(["a", "b"], [("e", "a", "b")], {"e": 2.0})
    assert a_beta(g, 1.0).entry("a", "b") == math.exp(-2.0)


def test_restrict_c2(gauge):
    beta = 0.7
    block = restrict(a_beta(gauge, beta), {"v5", "v6"})
    assert block.rows == ("v5", "v6")
    np.testing.assert_allclose(block.entries, [[0, math.exp(-beta)], [2 * math.exp(-beta), 0]])


def test_restrict_trivial(gauge):
    B = a_beta(gauge, 1.0)
    assert restrict(B, {"v2"}).entries.tolist() == [[0.0]]
    empty = restrict(B, set())
    assert empty.entries.shape == (0, 0) and spectral_radius(empty) == 0.0


def test_radius_closed_forms():
    assert spectral_radius(np.array([[0.0, 1.0], [2.0, 0.0]])) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert spectral_radius(np.array([[0.0]])) == 0.0
    w = [0.3, 2.0, 1.7, 0.9]
    cyc = np.zeros((4, 4))
    for i, x in enumerate(w):
        cyc[i, (i + 1) % 4] = x
    assert spectral_radius(cyc) == pytest.approx(np.prod(w) ** 0.25, abs=1e-12)
    assert spectral_radius(cyc) == pytest.approx(radius_oracle(cyc), abs=1e-12)


def test_perron_vectors():
    x = perron_vector(np.array([[0.0, 1 / math.sqrt(2)], [math.sqrt(2), 0.0]]))
    np.testing.assert_allclose(x, [1 / math.sqrt(2), 1.0], atol=1e-12)
    assert perron_vector(np.array([[1.0]])).tolist() == [1.0]
    three = np.roll(np.eye(3), 1, axis=1)
    np.testing.assert_allclose(perron_vector(three), [1, 1, 1])


def test_perron_vector_rejects():
    with pytest.raises(PreconditionError):
        perron_vector(np.array([[0.5]]))
    with pytest.raises(PreconditionError):
        perron_vector(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_neumann_examples():
    assert neumann_inverse(np.array([[0.5]])).tolist() == [[2.0]]
    np.testing.assert_allclose(neumann_inverse(np.array([[0.0, 3.0], [0.0, 0.0]])), [[1, 3], [0, 1]])
    up = np.triu(np.full((4, 4), 0.7), k=1)
    np.testing.assert_allclose(neumann_inverse(up), truncated_neumann(up), atol=1e-13)
    with pytest.raises(PreconditionError):
        neumann_inverse(np.array([[1.0]]))


def test_riesz_examples(gauge):
    beta = 1.0
    B = a_beta(gauge, beta)
    from kmsgraph.harmonic import phi_component, phi_sink

    phi = phi_sink(gauge, beta, "s1").vector.values
    parts = riesz_decompose(B, phi)
    assert np.abs(parts.harmonic).max() < 1e-12
    assert set(np.flatnonzero(parts.defect > 1e-14)) == {gauge.index("s1")}
    h = phi_component(gauge, LN2 / 2, components(gauge)[1]).vector.values
    parts = riesz_decompose(a_beta(gauge, LN2 / 2), h)
    np.testing.assert_allclose(parts.harmonic, h, atol=1e-10)
    assert np.abs(parts.defect).max() < 1e-10


def test_riesz_random_superharmonic(gauge, seed):
    rng = np.random.default_rng(seed)
    B = a_beta(gauge, 1.0).entries
    k = rng.random(len(B))
    psi = truncated_neumann(B) @ k  # B psi = psi - k <= psi
    parts = riesz_decompose(B, psi)
    np.testing.assert_allclose(parts.defect, k, atol=1e-10)
    np.testing.assert_allclose(parts.harmonic + truncated_neumann(B) @ parts.defect, psi, atol=1e-8)
    again = riesz_decompose(B, parts.harmonic + truncated_neumann(B) @ parts.defect)
    np.testing.assert_allclose(again.defect, parts.defect, atol=1e-8)
    np.testing.assert_allclose(again.harmonic, parts.harmonic, atol=1e-8)


def test_riesz_rejects_non_superharmonic():
    with pytest.raises(PreconditionError):
        riesz_decompose(np.array([[2.0]]), np.array([1.0]))


@given(seeds)
def test_radius_matches_dense_eigenvalues(s):
    rng = random.Random(s)
    g = random_graph(rng)
    beta = rng.uniform(-1.5, 1.5)
    B = a_beta(g, beta)
    assert spectral_radius(B) == pytest.approx(radius_oracle(B.entries), abs=1e-9, rel=1e-9)


@given(seeds)
def test_radius_monotone_under_principal_blocks(s):
    rng = random.Random(s)
    g = random_graph(rng)
    B = a_beta(g, rng.uniform(-1, 1))
    sub = {v for v in g.vertices if rng.random() < 0.5}
    assert spectral_radius(restrict(B, sub)) <= spectral_radius(B) + 1e-12


@given(seeds)
def test_log_radius_convex_in_beta(s):
    rng = random.Random(s)
    g = random_graph(rng)
    for c in components(g):
        b1, b2 = sorted(rng.uniform(-3, 3) for _ in range(2))
        f = lambda b: math.log(spectral_radius(restrict(a_beta(g, b), c.vertex_set)))
        assert f(0.5 * (b1 + b2)) <= 0.5 * (f(b1) + f(b2)) + 1e-9


@given(seeds)
def test_neumann_matches_truncated_series(s):
    rng = random.Random(s)
    g = random_positive_graph(rng)
    region = set(g.vertices)
    beta = 0.0
    while radius_oracle(submatrix(g, beta, region)[0]) >= 0.8:
        beta += 0.5
    m, _, _ = submatrix(g, beta, region)
    np.testing.assert_allclose(neumann_inverse(m), truncated_neumann(m), rtol=1e-9, atol=1e-12)


def test_weight_matrix_guards():
    with pytest.raises(ValueError):
        WeightMatrix(("a",), ("a",), np.zeros((2, 2)))
