"""Sparse multivariate polynomials with exact coefficients.

A monomial is a sorted tuple of variable indices, repeated according to
multiplicity, so ``(0, 0, 3)`` is ``z0**2 * z3`` and ``()`` is the constant 1.
"""

from __future__ import annotations

from collections import Counter
from heapq import merge
from typing import Dict, Iterable, Mapping, Sequence, Tuple

Monomial = Tuple[int, ...]


class PolyFn:
    """Immutable polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Monomial, object] | None = None):
        self.nvars = nvars
        clean: Dict[Monomial, object] = {}
        for m, c in (terms or {}).items():
            if c:
                m = tuple(sorted(m))
                if m and m[-1] >= nvars:
                    raise ValueError(f"variable {m[-1]} out of range for {nvars} variables")
                clean[m] = clean.get(m, 0) + c
        self._terms = {m: c for m, c in clean.items() if c}
        self._hash = None

    # construction
    @classmethod
    def zero(cls, nvars: int) -> "PolyFn":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, c) -> "PolyFn":
        return cls(nvars, {(): c})

    @classmethod
    def var(cls, nvars: int, i: int, c=1) -> "PolyFn":
        return cls(nvars, {(i,): c})

    @classmethod
    def linear(cls, nvars: int, coeffs: Sequence, offset: int = 0) -> "PolyFn":
        """sum_k coeffs[k] * z_{offset+k}."""
        return cls(nvars, {(offset + k,): c for k, c in enumerate(coeffs) if c})

    # access
    @property
    def terms(self) -> Dict[Monomial, object]:
        return dict(self._terms)

    def items(self) -> Iterable[Tuple[Monomial, object]]:
        return self._terms.items()

    def coeff(self, m: Monomial):
        return self._terms.get(tuple(sorted(m)), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((len(m) for m in self._terms), default=-1)

    def variables(self) -> set:
        return {i for m in self._terms for i in m}

    # arithmetic
    def _check(self, other: "PolyFn"):
        if other.nvars != self.nvars:
            raise ValueError("polynomials live in different coordinate rings")

    def _coerce(self, other):
        if isinstance(other, PolyFn):
            self._check(other)
            return other
        return PolyFn.const(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return PolyFn(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return PolyFn(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, PolyFn):
            if not other:
                return PolyFn(self.nvars)
            return PolyFn(self.nvars, {m: c * other for m, c in self._terms.items()})
        self._check(other)
        out: Dict[Monomial, object] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(merge(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return PolyFn(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = PolyFn.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, PolyFn):
            return self.nvars == other.nvars and self._terms == other._terms
        return self == PolyFn.const(self.nvars, other)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # calculus
    def diff(self, i: int) -> "PolyFn":
        out: Dict[Monomial, object] = {}
        for m, c in self._terms.items():
            k = m.count(i)
            if k:
                j = m.index(i)
                mm = m[:j] + m[j + 1:]
                out[mm] = out.get(mm, 0) + k * c
        return PolyFn(self.nvars, out)

    def __call__(self, point: Sequence):
        """Evaluate at a point; exact for exact inputs, float/complex otherwise."""
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates, got {len(point)}")
        total = 0
        for m, c in self._terms.items():
            t = c
            for i in m:
                t = t * point[i]
            total = total + t
        return total

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms):
            c = self._terms[m]
            mono = "*".join(f"z{i}" + (f"^{k}" if k > 1 else "")
                            for i, k in sorted(Counter(m).items()))
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)

