"""Words ``S_mu S_nu^*`` and the KMS states evaluated on them.

Two families of extremal states are covered: the gauge invariant states
``S_mu S_nu^* -> delta_{mu,nu} exp(-beta F(mu)) psi_{r(mu)}`` attached to an
almost harmonic vector ``psi``, and the states ``omega^lambda_D`` attached to
a zero-weight circular component ``D`` and a point ``lambda`` of the circle.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from kmsgraph.classify import kms_sets
from kmsgraph.config import DEFAULT_TOLERANCES, Tolerances
from kmsgraph.errors import GraphInputError, NotSummableError, PreconditionError
from kmsgraph.graph import Component, Graph, Path, closure
from kmsgraph.harmonic import HarmonicVector, phi_component, phi_sink
from kmsgraph.spectral import a_beta, neumann_inverse, restrict, spectral_radius


@dataclass(frozen=True)
class Word:
    """The element ``S_mu S_nu^*``; requires ``r(mu) == r(nu)``.

    The zero element is represented by ``None`` wherever a word may vanish.
    """

    mu: Path
    nu: Path

    def __post_init__(self):
        if self.mu.end != self.nu.end:
            raise GraphInputError(f"S_mu S_nu^* needs r(mu) = r(nu), got {self.mu.end} and {self.nu.end}")

    def adjoint(self) -> Word:
        return Word(self.nu, self.mu)

    @property
    def is_diagonal(self) -> bool:
        return self.mu == self.nu

    def __str__(self) -> str:
        return f"S[{self.mu}] S[{self.nu}]*"


def make_word(g: Graph, mu: Sequence[str], nu: Sequence[str], base: str | None = None) -> Word:
    """Build a word from edge-id lists; ``base`` places a pair of empty paths."""
    if mu and nu:
        return Word(g.path(mu), g.path(nu))
    if mu:
        p = g.path(mu)
        return Word(p, g.path(nu, p.end))
    if nu:
        p = g.path(nu)
        return Word(g.path(mu, p.end), p)
    return Word(g.path(mu, base), g.path(nu, base))


def projection(g: Graph, v: str) -> Word:
    p = g.vertex_path(v)
    return Word(p, p)


def word_multiply(w1: Word, w2: Word) -> Word | None:
    """Product of two words in the span, ``None`` for zero."""
    mu, nu = w1.mu, w1.nu
    gamma, rho = w2.mu, w2.nu
    if nu.is_prefix_of(gamma):
        return Word(mu.concat(gamma.strip_prefix(nu)), rho)
    if gamma.is_prefix_of(nu):
        return Word(mu, rho.concat(nu.strip_prefix(gamma)))
    return None


def eval_gauge_invariant(g: Graph, psi: HarmonicVector, beta: float, w: Word | None) -> complex:
    if w is None or w.mu != w.nu:
        return 0j
    return complex(math.exp(-beta * g.path_weight(w.mu)) * psi[w.mu.end])


class GaugeInvariantState:
    """Evaluation closure of the gauge invariant state given by ``psi``."""

    def __init__(self, g: Graph, beta: float, psi: HarmonicVector):
        self.graph = g
        self.beta = beta
        self.psi = psi

    def __call__(self, w: Word | None) -> complex:
        return eval_gauge_invariant(self.graph, self.psi, self.beta, w)


@dataclass(frozen=True)
class CircularData:
    """A circular component with a chosen base vertex and its loop from there."""

    component: Component
    base: str
    loop: Path

    @property
    def period(self) -> int:
        return len(self.loop)

    @classmethod
    def from_component(cls, g: Graph, c: Component, base: str | None = None) -> CircularData:
        if not c.circular:
            raise PreconditionError(f"{c.label} is not circular")
        base = c.base if base is None else base
        if base not in c:
            raise PreconditionError(f"{base!r} is not on {c.label}")
        verts = g.path_vertices(c.loop)[:-1]
        i = verts.index(base)
        edges = c.loop.edges[i:] + c.loop.edges[:i]
        return cls(c, base, Path(edges, base, base))


def _first_passage(g: Graph, beta: float, d: CircularData, tol: Tolerances) -> dict[str, float]:
    """``Z_w``: total weight of paths from ``w`` to the base that do not visit
    the base before their end (``Z_base = 1``)."""
    if abs(g.path_weight(d.loop)) > tol.weight_zero:
        raise PreconditionError(f"loop of {d.component.label} has nonzero weight")
    region = g.sorted(closure(g, d.component.vertex_set))
    m = restrict(a_beta(g, beta), region).entries
    m[region.index(d.base), :] = 0.0
    rho = spectral_radius(m, tol)
    if rho >= 1.0 - tol.classify:
        raise NotSummableError(
            f"first-passage series into {d.component.label} diverges at beta={beta} (radius {rho:.6g})"
        )
    col = neumann_inverse(m, tol)[:, region.index(d.base)]
    return dict(zip(region, (float(x) for x in col)))


def circular_normalizer(g: Graph, beta: float, d: CircularData, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    return math.fsum(_first_passage(g, beta, d, tol).values())


class OmegaLambdaState:
    """The extremal state ``omega^lambda_D``.

    Non-zero only on words ``S_mu S_nu^*`` with one path a prefix of the other
    and length difference a multiple ``k p`` of the period; the infinite path
    ``nu gamma^infinity`` (``mu = nu gamma``) is matched against
    ``alpha delta^infinity`` for the first-passage prefix ``alpha``.
    """

    def __init__(self, g: Graph, beta: float, d: CircularData, lam: complex, tol: Tolerances = DEFAULT_TOLERANCES):
        lam = complex(lam)
        if abs(abs(lam) - 1.0) > 1e-12:
            raise PreconditionError(f"lambda must lie on the unit circle, got {lam}")
        self.graph = g
        self.beta = beta
        self.data = d
        self.lam = lam
        self.z_w = _first_passage(g, beta, d, tol)
        self.z = math.fsum(self.z_w.values())

    def _weight(self, edges) -> float:
        return math.exp(-self.beta * math.fsum(self.graph.weight[e] for e in edges))

    def _loop_prefix(self, n: int, offset: int = 0) -> tuple[str, ...]:
        loop = self.data.loop.edges
        p = len(loop)
        return tuple(loop[(offset + i) % p] for i in range(n))

    def _diagonal(self, mu: Path) -> float:
        g, base = self.graph, self.data.base
        verts = g.path_vertices(mu)
        first = next((t for t, v in enumerate(verts) if v == base), None)
        total = 0.0
        if first is not None and first < len(mu):
            if mu.edges[first:] == self._loop_prefix(len(mu) - first):
                total += self._weight(mu.edges[:first])
        if first is None or first == len(mu):
            total += self._weight(mu.edges) * self.z_w.get(mu.end, 0.0)
        return total / self.z

    def _off_diagonal(self, nu: Path, gamma: Path, k: int) -> complex:
        g, base = self.graph, self.data.base
        edges = nu.edges + gamma.edges
        verts = g.path_vertices(Path(edges, nu.start, gamma.end))
        first = next((t for t, v in enumerate(verts) if v == base), None)
        if first is None:
            return 0j
        # past max(first, |nu|) both sides repeat with period |gamma|
        stop = max(first, len(nu)) + len(gamma)
        tail = (nu.edges + gamma.edges * 3)[first:stop]
        if tail != self._loop_prefix(stop - first):
            return 0j
        return self.lam**k * self._weight(edges[:first]) / self.z

    def __call__(self, w: Word | None) -> complex:
        if w is None:
            return 0j
        mu, nu = w.mu, w.nu
        if len(mu) < len(nu):
            return self(w.adjoint()).conjugate()
        if not nu.is_prefix_of(mu):
            return 0j
        diff = len(mu) - len(nu)
        if diff == 0:
            return complex(self._diagonal(mu))
        p = self.data.period
        if diff % p:
            return 0j
        return self._off_diagonal(nu, mu.strip_prefix(nu), diff // p)


def eval_omega_lambda(
    g: Graph, beta: float, d: CircularData, lam: complex, w: Word | None, tol: Tolerances = DEFAULT_TOLERANCES
) -> complex:
    return OmegaLambdaState(g, beta, d, lam, tol)(w)


@dataclass(frozen=True)
class CircleMeasure:
    """Probability measure on the circle: Lebesgue if ``atoms`` is None."""

    atoms: tuple[tuple[complex, float], ...] | None = None

    @property
    def is_lebesgue(self) -> bool:
        return self.atoms is None


LEBESGUE = CircleMeasure()


@dataclass(frozen=True)
class StateTerm:
    source: str  # component label or sink vertex
    weight: float
    measure: CircleMeasure | None = None


@dataclass(frozen=True)
class KmsStateSpec:
    beta: float
    terms: tuple[StateTerm, ...]


class KmsState:
    """Convex combination of extremal beta-KMS states, evaluated term by term."""

    def __init__(self, g: Graph, spec: KmsStateSpec, tol: Tolerances = DEFAULT_TOLERANCES):
        self.graph = g
        self.beta = spec.beta
        sets = kms_sets(g, spec.beta)
        nonc = {c.label: c for c in sets.noncircular}
        circ = {c.label: c for c in sets.circular}
        total = math.fsum(t.weight for t in spec.terms)
        if any(t.weight < 0 for t in spec.terms) or abs(total - 1.0) > 1e-9:
            raise PreconditionError("term weights must be nonnegative and sum to 1")
        self.parts: list[tuple[float, Callable[[Word | None], complex]]] = []
        for t in spec.terms:
            if t.source in nonc:
                psi = phi_component(g, spec.beta, nonc[t.source], tol).vector
                self.parts.append((t.weight, GaugeInvariantState(g, spec.beta, psi)))
            elif t.source in sets.sinks:
                psi = phi_sink(g, spec.beta, t.source, tol).vector
                self.parts.append((t.weight, GaugeInvariantState(g, spec.beta, psi)))
            elif t.source in circ:
                c = circ[t.source]
                measure = t.measure or LEBESGUE
                if measure.is_lebesgue:
                    psi = phi_component(g, spec.beta, c, tol).vector
                    self.parts.append((t.weight, GaugeInvariantState(g, spec.beta, psi)))
                    continue
                mass = math.fsum(m for _, m in measure.atoms)
                if any(m < 0 for _, m in measure.atoms) or abs(mass - 1.0) > 1e-9:
                    raise PreconditionError(f"measure for {t.source} is not a probability measure")
                d = CircularData.from_component(g, c)
                for lam, m in measure.atoms:
                    self.parts.append((t.weight * m, OmegaLambdaState(g, spec.beta, d, lam, tol)))
            else:
                raise PreconditionError(f"{t.source!r} contributes no extremal {spec.beta}-KMS state")

    def __call__(self, w: Word | None) -> complex:
        return sum((wt * f(w) for wt, f in self.parts), 0j)


def eval_state(g: Graph, spec: KmsStateSpec, w: Word | None) -> complex:
    return KmsState(g, spec)(w)


def kms_check(state, beta: float, w1: Word, w2: Word, graph: Graph | None = None) -> float:
    """``|omega(w1 w2) - exp(-beta (F(mu1) - F(nu1))) omega(w2 w1)|``."""
    g = graph if graph is not None else state.graph
    shift = math.exp(-beta * (g.path_weight(w1.mu) - g.path_weight(w1.nu)))
    return abs(state(word_multiply(w1, w2)) - shift * state(word_multiply(w2, w1)))


def unit(angle: float) -> complex:
    return cmath.exp(1j * angle)


def _walk(g: Graph, start: str, steps: int, rng: random.Random, forward: bool) -> list[str]:
    edges, cur = [], start
    for _ in range(steps):
        options = g.out_edges(cur) if forward else g.in_edges(cur)
        if not options:
            break
        e = rng.choice(options)
        edges.append(e.id)
        cur = e.range if forward else e.source
    return edges if forward else edges[::-1]


def _backward_path(g: Graph, end: str, max_len: int, rng: random.Random) -> Path:
    edges = _walk(g, end, rng.randint(0, max_len), rng, forward=False)
    return g.path(edges, None if edges else end)


def random_word(g: Graph, rng: random.Random, max_len: int = 6) -> Word:
    """A word whose paths are random walks of length at most ``max_len``."""
    v = rng.choice(g.vertices)
    mu = g.path(_walk(g, v, rng.randint(0, max_len), rng, forward=True), v)
    return Word(mu, _backward_path(g, mu.end, max_len, rng))


def random_word_pair(g: Graph, rng: random.Random, max_len: int = 6) -> tuple[Word, Word]:
    """Two random words, biased so that their products are often nonzero."""
    w1 = random_word(g, rng, max_len)
    mode = rng.randrange(4)
    nu = w1.nu
    if mode == 1:
        room = max_len - len(nu)
        ext = _walk(g, nu.end, rng.randint(0, max(room, 0)), rng, forward=True)
        gamma = nu.concat(g.path(ext, nu.end)) if ext else nu
    elif mode == 2:
        k = rng.randint(0, len(nu))
        gamma = g.path(nu.edges[:k], nu.start)
    elif mode == 3:
        return w1, w1.adjoint()
    else:
        return w1, random_word(g, rng, max_len)
    return w1, Word(gamma, _backward_path(g, gamma.end, max_len, rng))
