"""Almost harmonic vectors of ``A(beta)`` and their simplex structure.

The normalized almost harmonic vectors form a finite dimensional simplex.
Its extreme points are ``phi^C`` for the harmonic components ``C`` and
``phi^s`` for the summable sinks ``s``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from kmsgraph.config import DEFAULT_LIMITS, DEFAULT_TOLERANCES, Limits, Tolerances
from kmsgraph.errors import NotSummableError, NumericalError, PreconditionError
from kmsgraph.graph import Component, Graph, closure, components, sinks
from kmsgraph.spectral import (
    WeightMatrix,
    a_beta,
    neumann_inverse,
    perron_vector,
    restrict,
    riesz_decompose,
    spectral_radius,
)


@dataclass(frozen=True, eq=False)
class HarmonicVector:
    index: tuple[str, ...]
    values: np.ndarray
    normalized: bool = False

    @classmethod
    def from_mapping(cls, g: Graph, values: Mapping[str, float], normalized: bool | None = None) -> HarmonicVector:
        arr = np.zeros(len(g.vertices))
        for v, x in values.items():
            arr[g.index(v)] = x
        if normalized is None:
            normalized = abs(arr.sum() - 1.0) <= DEFAULT_TOLERANCES.harmonic
        return cls(g.vertices, arr, normalized)

    def __getitem__(self, v: str) -> float:
        return float(self.values[self.index.index(v)])

    def as_dict(self) -> dict[str, float]:
        return {v: float(x) for v, x in zip(self.index, self.values)}

    def support(self, tol: float = 0.0) -> frozenset[str]:
        return frozenset(v for v, x in zip(self.index, self.values) if x > tol)


class Harmonicity(enum.Enum):
    HARMONIC = "Harmonic"
    ALMOST_HARMONIC = "AlmostHarmonic"
    NEITHER = "Neither"


@dataclass(frozen=True, eq=False)
class ExtremePoint:
    """``phi^C`` (``component`` set) or ``phi^s`` (``sink`` set)."""

    vector: HarmonicVector
    component: Component | None = None
    sink: str | None = None

    @property
    def label(self) -> str:
        return self.component.label if self.component is not None else self.sink

    @property
    def kind(self) -> str:
        return "component" if self.component is not None else "sink"


@dataclass(frozen=True)
class SimplexDecomposition:
    component_terms: tuple[tuple[Component, float], ...]
    sink_terms: tuple[tuple[str, float], ...]
    residual_norm: float

    def coefficients(self) -> dict[str, float]:
        out = {c.label: t for c, t in self.component_terms}
        out.update(self.sink_terms)
        return out


def is_almost_harmonic(B: WeightMatrix, psi: HarmonicVector, g: Graph, tol: float = DEFAULT_TOLERANCES.classify) -> Harmonicity:
    values = np.asarray(psi.values, dtype=float)
    if (values < -tol).any():
        return Harmonicity.NEITHER
    gap = np.abs(B.entries @ values - values)
    sink_mask = np.array([not g.out_edges(v) for v in B.rows])
    if (gap[~sink_mask] > tol).any():
        return Harmonicity.NEITHER
    if (gap[sink_mask] > tol).any():
        return Harmonicity.ALMOST_HARMONIC
    return Harmonicity.HARMONIC


def _radius_below_one(B: WeightMatrix, region, tol: Tolerances) -> bool:
    if not region:
        return True
    return spectral_radius(restrict(B, region), tol) < 1.0 - tol.classify


def is_summable_sink(g: Graph, beta: float, s: str, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """``sum_n A(beta)^n[v, s] < inf`` for all ``v``, decided by radius < 1."""
    if g.out_edges(s):
        raise PreconditionError(f"{s!r} is not a sink")
    B = a_beta(g, beta)
    return _radius_below_one(B, closure(g, {s}) - {s}, tol)


def is_harmonic_component(g: Graph, beta: float, c: Component, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    B = a_beta(g, beta)
    if abs(spectral_radius(restrict(B, c.vertex_set), tol) - 1.0) > tol.classify:
        return False
    return _radius_below_one(B, closure(g, c.vertex_set) - c.vertex_set, tol)


def phi_sink(g: Graph, beta: float, s: str, tol: Tolerances = DEFAULT_TOLERANCES) -> ExtremePoint:
    if g.out_edges(s):
        raise PreconditionError(f"{s!r} is not a sink")
    region = g.sorted(closure(g, {s}))
    B = a_beta(g, beta)
    if not _radius_below_one(B, set(region) - {s}, tol):
        raise NotSummableError(f"sink {s} is not A({beta})-summable")
    inv = neumann_inverse(restrict(B, region).entries, tol)
    col = inv[:, region.index(s)]
    values = np.zeros(len(g.vertices))
    for v, x in zip(region, col):
        values[g.index(v)] = x
    values /= values.sum()
    return ExtremePoint(HarmonicVector(g.vertices, values, True), sink=s)


def phi_component(
    g: Graph, beta: float, c: Component, tol: Tolerances = DEFAULT_TOLERANCES, limits: Limits = DEFAULT_LIMITS
) -> ExtremePoint:
    """The unique normalized harmonic vector supported on ``closure(C)`` whose
    restriction to ``C`` is a Perron vector."""
    B = a_beta(g, beta)
    inner = g.sorted(c.vertex_set)
    outer = g.sorted(closure(g, c.vertex_set) - c.vertex_set)
    bc = restrict(B, inner)
    try:
        x = perron_vector(bc.entries, tol, limits)
    except PreconditionError as exc:
        raise PreconditionError(f"{c.label} is not A({beta})-harmonic: {exc}") from None
    values = np.zeros(len(g.vertices))
    for v, xv in zip(inner, x):
        values[g.index(v)] = xv
    if outer:
        b_out = restrict(B, outer)
        if spectral_radius(b_out, tol) >= 1.0 - tol.classify:
            raise PreconditionError(f"{c.label} is not A({beta})-harmonic: closure has radius >= 1")
        y = neumann_inverse(b_out.entries, tol) @ (restrict(B, outer, inner).entries @ x)
        for v, yv in zip(outer, y):
            values[g.index(v)] = yv
    values /= values.sum()
    return ExtremePoint(HarmonicVector(g.vertices, values, True), component=c)


def harmonic_components(g: Graph, beta: float, tol: Tolerances = DEFAULT_TOLERANCES) -> list[Component]:
    return [c for c in components(g) if is_harmonic_component(g, beta, c, tol)]


def summable_sinks(g: Graph, beta: float, tol: Tolerances = DEFAULT_TOLERANCES) -> list[str]:
    return [s for s in sinks(g) if is_summable_sink(g, beta, s, tol)]


def extreme_points(g: Graph, beta: float, tol: Tolerances = DEFAULT_TOLERANCES) -> list[ExtremePoint]:
    """Extreme points of the normalized ``A(beta)``-almost harmonic vectors:
    components first (canonical order), then sinks."""
    pts = [phi_component(g, beta, c, tol) for c in harmonic_components(g, beta, tol)]
    pts += [phi_sink(g, beta, s, tol) for s in summable_sinks(g, beta, tol)]
    return pts


def recombine(g: Graph, points: list[ExtremePoint], weights: list[float]) -> HarmonicVector:
    values = sum((w * p.vector.values for p, w in zip(points, weights)), np.zeros(len(g.vertices)))
    return HarmonicVector(g.vertices, values, abs(sum(weights) - 1.0) <= 1e-12)


def sink_normalizer(g: Graph, beta: float, s: str, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """``sum_w sum_n A(beta)^n[w, s]``, the mass divided out in ``phi^s``."""
    region = g.sorted(closure(g, {s}))
    B = a_beta(g, beta)
    inv = neumann_inverse(restrict(B, region).entries, tol)
    return float(inv[:, region.index(s)].sum())


def _talks_to(g: Graph, a: Component, b: Component) -> bool:
    return bool(closure(g, b.vertex_set) & a.vertex_set)


def decompose(
    g: Graph, beta: float, psi: HarmonicVector, tol: Tolerances = DEFAULT_TOLERANCES, limits: Limits = DEFAULT_LIMITS
) -> SimplexDecomposition:
    """Write a normalized almost harmonic ``psi`` as a convex combination of
    extreme points.

    Sink weights come from the Riesz defect, ``t_s = k_s * sum_w sum_n
    B^n[w, s]``.  The harmonic remainder is peeled off via the components of
    radius one in its support that no other such component talks to.
    """
    B = a_beta(g, beta)
    status = is_almost_harmonic(B, psi, g, tol.classify)
    if status is Harmonicity.NEITHER:
        raise PreconditionError("vector is not almost harmonic")
    parts = riesz_decompose(B, psi.values, tol, limits)
    sink_terms = []
    rebuilt = np.zeros(len(g.vertices))
    for s in sinks(g):
        k_s = parts.defect[g.index(s)]
        if k_s <= tol.reconstruction * 1e-2:
            continue
        if not is_summable_sink(g, beta, s, tol):
            raise NumericalError(f"defect at non-summable sink {s}", defect=float(k_s))
        t = float(k_s * sink_normalizer(g, beta, s, tol))
        sink_terms.append((s, t))
        rebuilt += t * phi_sink(g, beta, s, tol).vector.values
    h = parts.harmonic
    scale = max(float(h.max(initial=0.0)), 1.0)
    support = {v for v, x in zip(g.vertices, h) if x > tol.reconstruction * 1e-2 * scale}
    candidates = [
        c
        for c in components(g)
        if c.vertex_set <= support
        and abs(spectral_radius(restrict(B, c.vertex_set), tol) - 1.0) <= tol.classify
    ]
    minimal = [c for c in candidates if not any(d is not c and _talks_to(g, d, c) for d in candidates)]
    comp_terms = []
    for c in minimal:
        phi = phi_component(g, beta, c, tol, limits).vector.values
        idx = [g.index(v) for v in c.members]
        t = float(h[idx].sum() / phi[idx].sum())
        comp_terms.append((c, t))
        rebuilt += t * phi
    resid = float(np.abs(rebuilt - psi.values).max(initial=0.0))
    if resid > tol.reconstruction:
        raise NumericalError("decomposition does not reproduce the vector", residual=resid)
    return SimplexDecomposition(tuple(comp_terms), tuple(sink_terms), resid)
