"""Critical inverse temperatures and the KMS classification of components
and sinks for ``beta != 0``."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.optimize import brentq

from kmsgraph.config import DEFAULT_TOLERANCES, Tolerances
from kmsgraph.errors import NoCriticalBetaError, PreconditionError
from kmsgraph.graph import (
    Component,
    Graph,
    ProfileTag,
    SignProfile,
    closure,
    components,
    components_in,
    sign_profile,
    sinks,
)
from kmsgraph.spectral import a_beta, restrict, spectral_radius

POSITIVE = "positive"
NEGATIVE = "negative"


class VerdictKind(enum.Enum):
    POSITIVE = "PositiveKms"
    NEGATIVE = "NegativeKms"
    CIRCULAR = "CircularKms"
    NONE = "NotKms"


@dataclass(frozen=True)
class Interval:
    """Open interval ``]lower, upper[``; an infinite end is unbounded.

    ``lower_source``/``upper_source`` name the component whose critical
    temperature produced a finite endpoint.
    """

    lower: float = -math.inf
    upper: float = math.inf
    lower_source: str | None = None
    upper_source: str | None = None

    @property
    def is_full_line(self) -> bool:
        return self.lower == -math.inf and self.upper == math.inf

    def contains(self, beta: float, margin: float = 0.0) -> bool:
        return self.lower + margin < beta < self.upper - margin


@dataclass(frozen=True)
class ComponentVerdict:
    component: Component
    kind: VerdictKind
    beta_c: float | None = None
    types: frozenset[str] = frozenset()
    interval: Interval | None = None
    reason: str | None = None
    detail: str = ""

    @property
    def is_kms(self) -> bool:
        return self.kind is not VerdictKind.NONE


@dataclass(frozen=True)
class SinkVerdict:
    sink: str
    types: frozenset[str]
    interval: Interval | None
    reason: str | None = None

    @property
    def is_kms(self) -> bool:
        return bool(self.types)


@dataclass(frozen=True)
class KmsSets:
    beta: float
    noncircular: tuple[Component, ...]
    circular: tuple[Component, ...]
    sinks: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.noncircular) + len(self.circular) + len(self.sinks)


class RowShape(enum.Enum):
    FULL_LINE = "FullLine"
    OPEN_RAY = "OpenRay"
    POINT = "Point"
    ABSENT = "Absent"


@dataclass(frozen=True)
class SpectrumRow:
    label: str
    kind: str  # "sink" or "component"
    shape: RowShape
    value: float | None = None
    direction: str | None = None  # "+" ray to +inf, "-" ray to -inf
    circle: bool = False
    source: str | None = None  # component whose beta_C gives the value


def _profile_reason(p: SignProfile) -> str:
    return "zero_loop_in_closure" if p.tag is ProfileTag.HAS_ZERO_LOOP else "mixed_signs"


class KmsAnalysis:
    """Memoized classification data for one weighted graph."""

    def __init__(self, g: Graph, tol: Tolerances = DEFAULT_TOLERANCES):
        self.g = g
        self.tol = tol
        self._profiles: dict[frozenset[str], SignProfile] = {}
        self._betas: dict[str, float] = {}
        self._verdicts: dict[str, ComponentVerdict] = {}

    def profile(self, region) -> SignProfile:
        region = frozenset(region)
        if region not in self._profiles:
            self._profiles[region] = sign_profile(self.g, region)
        return self._profiles[region]

    def radius(self, c: Component, beta: float) -> float:
        return spectral_radius(restrict(a_beta(self.g, beta), c.vertex_set), self.tol)

    def beta_c(self, c: Component) -> float:
        if c.label in self._betas:
            return self._betas[c.label]
        g = self.g
        if c.circular:
            w = g.path_weight(c.loop)
            if abs(w) <= self.tol.weight_zero:
                raise NoCriticalBetaError(f"{c.label} is a zero-weight cycle: radius is 1 for every beta")
            # exp(-beta w / p) = 1 forces beta = 0
            self._betas[c.label] = 0.0
            return 0.0
        prof = self.profile(c.vertex_set)
        if prof.tag not in (ProfileTag.ALL_POSITIVE, ProfileTag.ALL_NEGATIVE):
            raise NoCriticalBetaError(
                f"{c.label} has {prof.tag.value}; its spectral radius exceeds 1 for every beta"
            )
        step = 1.0 if prof.tag is ProfileTag.ALL_POSITIVE else -1.0

        def log_radius(beta: float) -> float:
            return math.log(self.radius(c, beta))

        # log radius is strictly monotone and positive at 0 for a non-circular component
        near, far = 0.0, step
        while log_radius(far) > 0.0:
            near, far = far, 2.0 * far
            if abs(far) > 1e6:
                raise NoCriticalBetaError(f"could not bracket the critical temperature of {c.label}")
        lo, hi = sorted((near, far))
        root = brentq(log_radius, lo, hi, xtol=self.tol.eig * 1e-2, rtol=1e-15, maxiter=500)
        self._betas[c.label] = float(root)
        return float(root)

    def _closure_betas(self, region) -> list[tuple[float, str]]:
        return [(self.beta_c(d), d.label) for d in components_in(self.g, region)]

    def component_verdict(self, c: Component) -> ComponentVerdict:
        if c.label in self._verdicts:
            return self._verdicts[c.label]
        v = self._component_verdict(c)
        self._verdicts[c.label] = v
        return v

    def _component_verdict(self, c: Component) -> ComponentVerdict:
        g, tol = self.g, self.tol
        region = closure(g, c.vertex_set)
        rest = region - c.vertex_set
        if c.circular:
            w = g.path_weight(c.loop)
            if abs(w) > tol.weight_zero:
                return ComponentVerdict(
                    c, VerdictKind.NONE, reason="circular_loop_nonzero", detail=f"loop weight {w:g}"
                )
            prof = self.profile(rest)
            types = frozenset(t for t, ok in ((POSITIVE, prof.positive), (NEGATIVE, prof.negative)) if ok)
            if not types:
                return ComponentVerdict(c, VerdictKind.NONE, reason=_profile_reason(prof))
            return ComponentVerdict(c, VerdictKind.CIRCULAR, types=types, interval=self._interval(rest, types))
        own = self.profile(c.vertex_set)
        if own.tag in (ProfileTag.HAS_ZERO_LOOP, ProfileTag.MIXED):
            return ComponentVerdict(c, VerdictKind.NONE, reason=_profile_reason(own))
        prof = self.profile(region)
        if prof.tag in (ProfileTag.HAS_ZERO_LOOP, ProfileTag.MIXED):
            return ComponentVerdict(c, VerdictKind.NONE, reason=_profile_reason(prof))
        positive = prof.tag is ProfileTag.ALL_POSITIVE
        b = self.beta_c(c)
        for b2, label in self._closure_betas(rest):
            ok = b2 < b - tol.classify if positive else b2 > b + tol.classify
            if not ok:
                return ComponentVerdict(
                    c,
                    VerdictKind.NONE,
                    beta_c=b,
                    reason="order_violation",
                    detail=f"beta_{label} = {b2:.12g} vs beta_{c.label} = {b:.12g}",
                )
        kind = VerdictKind.POSITIVE if positive else VerdictKind.NEGATIVE
        return ComponentVerdict(c, kind, beta_c=b, types=frozenset({POSITIVE if positive else NEGATIVE}))

    def _interval(self, region, types: frozenset[str]) -> Interval:
        betas = self._closure_betas(region)
        if not betas:
            return Interval()
        if types == {POSITIVE}:
            value, label = max(betas)
            return Interval(lower=value, lower_source=label)
        if types == {NEGATIVE}:
            value, label = min(betas)
            return Interval(upper=value, upper_source=label)
        raise AssertionError("loops of both signs cannot coexist with two types")

    def sink_verdict(self, s: str) -> SinkVerdict:
        g = self.g
        if g.out_edges(s):
            raise PreconditionError(f"{s!r} is not a sink")
        region = closure(g, {s})
        prof = self.profile(region)
        types = frozenset(t for t, ok in ((POSITIVE, prof.positive), (NEGATIVE, prof.negative)) if ok)
        if not types:
            return SinkVerdict(s, types, None, reason=_profile_reason(prof))
        return SinkVerdict(s, types, self._interval(region, types))

    def kms_sets(self, beta: float) -> KmsSets:
        if abs(beta) <= self.tol.eig:
            raise PreconditionError("beta = 0 gives the trace states; use the trace_zero module")
        sign = POSITIVE if beta > 0 else NEGATIVE
        margin = self.tol.classify
        nonc, circ, snk = [], [], []
        for c in components(self.g):
            v = self.component_verdict(c)
            if v.kind in (VerdictKind.POSITIVE, VerdictKind.NEGATIVE):
                if sign in v.types and abs(v.beta_c - beta) <= margin:
                    nonc.append(c)
            elif v.kind is VerdictKind.CIRCULAR:
                if sign in v.types and v.interval.contains(beta, margin):
                    circ.append(c)
        for s in sinks(self.g):
            v = self.sink_verdict(s)
            if sign in v.types and v.interval.contains(beta, margin):
                snk.append(s)
        return KmsSets(beta, tuple(nonc), tuple(circ), tuple(snk))

    def _row(self, label: str, kind: str, types, interval: Interval | None, circle: bool) -> SpectrumRow:
        if not types:
            return SpectrumRow(label, kind, RowShape.ABSENT, circle=circle)
        if interval.is_full_line:
            return SpectrumRow(label, kind, RowShape.FULL_LINE, circle=circle)
        if interval.upper == math.inf:
            return SpectrumRow(label, kind, RowShape.OPEN_RAY, interval.lower, "+", circle, interval.lower_source)
        return SpectrumRow(label, kind, RowShape.OPEN_RAY, interval.upper, "-", circle, interval.upper_source)

    def spectrum(self) -> list[SpectrumRow]:
        rows = []
        for s in sinks(self.g):
            v = self.sink_verdict(s)
            rows.append(self._row(s, "sink", v.types, v.interval, False))
        for c in components(self.g):
            v = self.component_verdict(c)
            if v.kind is VerdictKind.CIRCULAR:
                rows.append(self._row(c.label, "component", v.types, v.interval, True))
            elif v.kind is VerdictKind.NONE:
                rows.append(SpectrumRow(c.label, "component", RowShape.ABSENT, circle=c.circular))
            else:
                rows.append(SpectrumRow(c.label, "component", RowShape.POINT, v.beta_c, source=c.label))
        return rows


@lru_cache(maxsize=32)
def analysis(g: Graph) -> KmsAnalysis:
    return KmsAnalysis(g)


def beta_c(g: Graph, c: Component) -> float:
    """The unique ``beta`` with ``rho(A(beta)^C) = 1``."""
    return analysis(g).beta_c(c)


def classify_component(g: Graph, c: Component) -> ComponentVerdict:
    return analysis(g).component_verdict(c)


def classify_sink(g: Graph, s: str) -> SinkVerdict:
    return analysis(g).sink_verdict(s)


def kms_sets(g: Graph, beta: float) -> KmsSets:
    """Index sets of the extremal beta-KMS states for ``beta != 0``."""
    return analysis(g).kms_sets(beta)


def spectrum(g: Graph) -> list[SpectrumRow]:
    """One row per sink and per component describing where it contributes."""
    return analysis(g).spectrum()
