"""Nonnegative vertex-indexed matrices: A(beta), restrictions, spectral radii,
Perron vectors, Neumann inverses and the Riesz decomposition of
superharmonic vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse.csgraph import connected_components

from kmsgraph.config import DEFAULT_LIMITS, DEFAULT_TOLERANCES, Limits, Tolerances
from kmsgraph.errors import GraphInputError, NumericalError, PreconditionError
from kmsgraph.graph import Graph


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Dense nonnegative matrix with vertex labels on rows and columns."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.shape != (len(self.rows), len(self.cols)):
            raise ValueError("entries do not match the index")

    @classmethod
    def square(cls, index, entries) -> WeightMatrix:
        index = tuple(index)
        return cls(index, index, np.asarray(entries, dtype=float).reshape(len(index), len(index)))

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def index(self) -> tuple[str, ...]:
        if not self.is_square:
            raise ValueError("rectangular block has no single index")
        return self.rows

    def __len__(self) -> int:
        return len(self.rows)

    def entry(self, v: str, w: str) -> float:
        return float(self.entries[self.rows.index(v), self.cols.index(w)])

    def __matmul__(self, vec):
        return self.entries @ vec


def a_beta(g: Graph, beta: float) -> WeightMatrix:
    """``A(beta)[v, w] = sum over edges v -> w of exp(-beta F(e))``."""
    n = len(g.vertices)
    m = np.zeros((n, n))
    for e in g.edges:
        m[g.index(e.source), g.index(e.range)] += math.exp(-beta * g.weight[e.id])
    return WeightMatrix(g.vertices, g.vertices, m)


def restrict(B: WeightMatrix, rows: Iterable[str], cols: Iterable[str] | None = None) -> WeightMatrix:
    """Sub-block of ``B``; labels keep the order they have in ``B``."""
    rows = frozenset(rows)
    cols = rows if cols is None else frozenset(cols)
    for v in rows | cols:
        if v not in B.rows and v not in B.cols:
            raise GraphInputError(f"unknown vertex {v!r}")
    if not rows <= set(B.rows) or not cols <= set(B.cols):
        raise GraphInputError("restriction outside the matrix index")
    ri = [i for i, v in enumerate(B.rows) if v in rows]
    ci = [j for j, v in enumerate(B.cols) if v in cols]
    return WeightMatrix(
        tuple(B.rows[i] for i in ri),
        tuple(B.cols[j] for j in ci),
        B.entries[np.ix_(ri, ci)].copy(),
    )


def _as_array(B) -> np.ndarray:
    m = B.entries if isinstance(B, WeightMatrix) else np.asarray(B, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise PreconditionError("spectral radius needs a square matrix")
    return m


def _blocks(m: np.ndarray) -> list[np.ndarray]:
    """Index arrays of the strongly connected diagonal blocks carrying an entry."""
    if m.shape[0] == 0:
        return []
    _, labels = connected_components(m > 0, directed=True, connection="strong")
    out = []
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        if m[np.ix_(idx, idx)].any():
            out.append(idx)
    return out


def _cycle_order(block: np.ndarray) -> list[int] | None:
    """Vertex order around the cycle if the irreducible block is a single cycle."""
    pos = block > 0
    if not (pos.sum(axis=1) == 1).all() or not (pos.sum(axis=0) == 1).all():
        return None
    order, i = [], 0
    for _ in range(len(block)):
        order.append(i)
        i = int(np.flatnonzero(pos[i])[0])
    return order


def _irreducible_radius(block: np.ndarray, tol: Tolerances, limits: Limits) -> tuple[float, np.ndarray]:
    n = len(block)
    if n == 1:
        return float(block[0, 0]), np.ones(1)
    order = _cycle_order(block)
    if order is not None:
        weights = [block[i, j] for i, j in zip(order, order[1:] + order[:1])]
        rho = math.exp(math.fsum(math.log(w) for w in weights) / n)
        # B x = rho x along the cycle: x_next = rho x_cur / w
        x = np.empty(n)
        val = 1.0
        for i, w in zip(order, weights):
            x[i] = val
            val = val * rho / w
        return rho, x / x.max()
    # Collatz-Wielandt bounds bracket rho for any positive x; power steps on
    # block + I (primitive) and repeated squaring drive the bracket shut.
    shifted = block + np.eye(n)
    power = shifted / shifted.max()
    x = np.ones(n)
    for it in range(limits.max_iterations):
        ratios = (block @ x) / x
        lo, hi = ratios.min(), ratios.max()
        if hi - lo <= max(tol.eig, 8 * np.finfo(float).eps * hi):
            return float(0.5 * (lo + hi)), x / x.max()
        if it < 60:
            x = power @ x
            power = power @ power
            power /= power.max()
        else:
            x = shifted @ x
        x = x / x.max()
        if not (x > 0).all():
            raise NumericalError("Perron iteration lost positivity", iteration=it)
    raise NumericalError("power iteration did not converge", iterations=limits.max_iterations, gap=float(hi - lo))


def spectral_radius(B, tol: Tolerances = DEFAULT_TOLERANCES, limits: Limits = DEFAULT_LIMITS) -> float:
    """Spectral radius of a square nonnegative matrix; 0 for an empty one.

    Computed as the maximum over strongly connected diagonal blocks, with
    closed forms for 1x1 and single-cycle blocks.
    """
    m = _as_array(B)
    rho = 0.0
    for idx in _blocks(m):
        r, _ = _irreducible_radius(m[np.ix_(idx, idx)], tol, limits)
        rho = max(rho, r)
    return rho


def is_irreducible(B) -> bool:
    m = _as_array(B)
    blocks = _blocks(m)
    return len(blocks) == 1 and len(blocks[0]) == len(m)


def perron_vector(B, tol: Tolerances = DEFAULT_TOLERANCES, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    """Strictly positive fixed vector of an irreducible matrix with radius 1,
    scaled so that its largest entry is 1."""
    m = _as_array(B)
    if not is_irreducible(m):
        raise PreconditionError("Perron vector requested for a reducible matrix")
    rho, x = _irreducible_radius(m, tol, limits)
    if abs(rho - 1.0) > tol.classify:
        raise PreconditionError(f"spectral radius is {rho!r}, not 1")
    resid = float(np.abs(m @ x - rho * x).max())
    if resid > tol.residual:
        raise NumericalError("Perron vector residual too large", residual=resid)
    return x


def neumann_inverse(B, tol: Tolerances = DEFAULT_TOLERANCES, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    """``(I - B)^{-1} = sum_n B^n`` for a nonnegative ``B`` with radius < 1."""
    m = _as_array(B)
    n = len(m)
    if n == 0:
        return np.zeros((0, 0))
    rho = spectral_radius(m, tol, limits)
    if rho >= 1.0 - tol.classify:
        raise PreconditionError(f"spectral radius {rho!r} is not below 1")
    eye = np.eye(n)
    x = np.linalg.solve(eye - m, eye)
    if x.min() < -tol.residual * max(1.0, np.abs(x).max()):
        raise NumericalError("Neumann inverse has a negative entry", min_entry=float(x.min()))
    x = np.maximum(x, 0.0)
    resid = float(np.abs((eye - m) @ x - eye).max())
    if resid > tol.residual * max(1.0, np.abs(x).max()):
        raise NumericalError("Neumann inverse residual too large", residual=resid)
    return x


@dataclass(frozen=True, eq=False)
class RieszParts:
    harmonic: np.ndarray
    defect: np.ndarray
    iterations: int


def _limit(m: np.ndarray, start: np.ndarray, tol: float, window: int, cap: int) -> tuple[np.ndarray, int]:
    x = start.copy()
    calm = 0
    for it in range(1, cap + 1):
        y = m @ x
        step = float(np.abs(y - x).max()) if len(x) else 0.0
        x = y
        calm = calm + 1 if step < tol else 0
        if calm >= window:
            return x, it
    raise NumericalError("iteration did not settle", iterations=cap, last_step=step)


def _series(m: np.ndarray, k: np.ndarray, tol: float, cap: int) -> np.ndarray:
    total = k.copy()
    term = k.copy()
    calm = 0
    for _ in range(cap):
        term = m @ term
        total += term
        calm = calm + 1 if float(np.abs(term).max(initial=0.0)) < tol else 0
        if calm >= 5:
            return total
    raise NumericalError("potential series did not converge", iterations=cap)


def riesz_decompose(
    B, psi, tol: Tolerances = DEFAULT_TOLERANCES, limits: Limits = DEFAULT_LIMITS
) -> RieszParts:
    """Split a superharmonic ``psi`` (``B psi <= psi``) into a harmonic part
    ``h = lim B^n psi`` and a defect ``k = psi - B psi`` with
    ``psi = h + sum_n B^n k``."""
    m = _as_array(B)
    psi = np.asarray(psi, dtype=float)
    if (psi < -tol.harmonic).any():
        raise PreconditionError("vector has negative entries")
    bpsi = m @ psi
    excess = float((bpsi - psi).max(initial=0.0))
    if excess > tol.harmonic:
        raise PreconditionError(f"vector is not superharmonic (excess {excess:.3g})")
    k = psi - bpsi
    k[k < tol.harmonic] = 0.0  # roundoff, not a genuine defect
    h, its = _limit(m, psi, tol.riesz, 5, limits.max_iterations)
    h = np.maximum(h, 0.0)
    potential = _series(m, k, tol.riesz * 1e-3, limits.max_iterations)
    resid = float(np.abs(psi - h - potential).max(initial=0.0))
    if resid > tol.reconstruction:
        raise NumericalError("Riesz reconstruction failed", residual=resid)
    return RieszParts(h, k, its)
