"""Sparse Laurent polynomials in one circle variable ``z`` and matrices of them.

Coefficients are Python integers so that equality is exact.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping


class LaurentPoly:
    """``sum_k c_k z^k`` stored as a degree -> nonzero coefficient map."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, int] | None = None):
        self._terms = {int(k): c for k, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, c: int) -> LaurentPoly:
        return cls({0: c})

    @classmethod
    def z(cls, power: int = 1) -> LaurentPoly:
        return cls({power: 1})

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degrees(self) -> set[int]:
        return set(self._terms)

    def constant_term(self) -> int:
        return self._terms.get(0, 0)

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentPoly(out)

    def __mul__(self, other: LaurentPoly) -> LaurentPoly:
        out: dict[int, int] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return LaurentPoly(out)

    def star(self) -> LaurentPoly:
        """Adjoint on the circle: ``z -> z^{-1}`` (coefficients are real)."""
        return LaurentPoly({-k: c for k, c in self._terms.items()})

    def __call__(self, z: complex) -> complex:
        return sum((c * z**k for k, c in self._terms.items()), 0j)

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{c}z^{k}" if k else str(c) for k, c in sorted(self._terms.items()))


class LaurentMatrix:
    """Sparse square matrix with Laurent polynomial entries over a fixed index."""

    def __init__(self, index: Iterable[Hashable], entries: Mapping[tuple, LaurentPoly] | None = None):
        self.index = tuple(index)
        self._pos = {a: i for i, a in enumerate(self.index)}
        self._entries: dict[tuple, LaurentPoly] = {}
        for (a, b), p in (entries or {}).items():
            if a not in self._pos or b not in self._pos:
                raise KeyError(f"entry ({a}, {b}) outside the index")
            if not p.is_zero():
                self._entries[(a, b)] = p

    @classmethod
    def zero(cls, index) -> LaurentMatrix:
        return cls(index)

    @classmethod
    def unit(cls, index, a, b, p: LaurentPoly | None = None) -> LaurentMatrix:
        return cls(index, {(a, b): p if p is not None else LaurentPoly.const(1)})

    @property
    def entries(self) -> dict[tuple, LaurentPoly]:
        return dict(self._entries)

    def __getitem__(self, key) -> LaurentPoly:
        return self._entries.get(key, LaurentPoly())

    def _check(self, other: LaurentMatrix):
        if self.index != other.index:
            raise ValueError("matrices live on different index sets")

    def __add__(self, other: LaurentMatrix) -> LaurentMatrix:
        self._check(other)
        out = dict(self._entries)
        for k, p in other._entries.items():
            out[k] = out[k] + p if k in out else p
        return LaurentMatrix(self.index, out)

    def __matmul__(self, other: LaurentMatrix) -> LaurentMatrix:
        self._check(other)
        rows: dict = {}
        for (b, c), p in other._entries.items():
            rows.setdefault(b, []).append((c, p))
        out: dict[tuple, LaurentPoly] = {}
        for (a, b), p in self._entries.items():
            for c, q in rows.get(b, ()):
                prod = p * q
                out[(a, c)] = out[(a, c)] + prod if (a, c) in out else prod
        return LaurentMatrix(self.index, out)

    def star(self) -> LaurentMatrix:
        return LaurentMatrix(self.index, {(b, a): p.star() for (a, b), p in self._entries.items()})

    def trace(self, keys: Iterable[Hashable] | None = None) -> LaurentPoly:
        keys = self.index if keys is None else keys
        total = LaurentPoly()
        for a in keys:
            total = total + self[(a, a)]
        return total

    def is_zero(self) -> bool:
        return not self._entries

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentMatrix) and self.index == other.index and self._entries == other._entries

    __hash__ = None

    def __repr__(self) -> str:
        return f"LaurentMatrix({len(self.index)}x{len(self.index)}, {len(self._entries)} nonzero)"
