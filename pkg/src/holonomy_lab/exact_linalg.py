"""Exact linear algebra over the rationals and the Gaussian rationals.

Vectors and matrix rows are handled in two shapes: dense sequences of
scalars, or sparse ``{column: scalar}`` dicts.  All elimination is done on
sparse rows with exact pivoting; there is no tolerance anywhere in this
module.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

SparseRow = Dict[int, object]


class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return GaussianRational(other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational((self.re * o.re + self.im * o.im) / den,
                                (self.im * o.re - self.re * o.im) / den)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"{self.re}+{self.im}i" if self.im > 0 else f"{self.re}{self.im}i"


I = GaussianRational(0, 1)


def to_scalar(x):
    """Normalize ints/Fractions/GaussianRationals into an exact scalar."""
    if isinstance(x, GaussianRational):
        return x.re if x.im == 0 else x
    if isinstance(x, float):
        raise TypeError("floating point values are not exact scalars")
    return Fraction(x)


def format_scalar(x) -> str:
    """Serialize an exact scalar as ``num/den`` (``re|im`` pair for complex)."""
    if isinstance(x, GaussianRational):
        if x.im == 0:
            return format_scalar(x.re)
        return f"{format_scalar(x.re)}|{format_scalar(x.im)}i"
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# conversions

VectorLike = Union[Sequence, Mapping[int, object]]


def sparse(v: VectorLike) -> SparseRow:
    if isinstance(v, Mapping):
        return {k: x for k, x in v.items() if x}
    return {k: x for k, x in enumerate(v) if x}


def dense(v: Mapping[int, object], length: int) -> List:
    out = [Fraction(0)] * length
    for k, x in v.items():
        out[k] = x
    return out


def _as_rows(m) -> Tuple[List[SparseRow], int]:
    """Accept a dense list of rows or ``(sparse_rows, ncols)``."""
    if isinstance(m, tuple) and len(m) == 2 and isinstance(m[1], int):
        return [dict(r) for r in m[0]], m[1]
    rows = [list(r) for r in m]
    ncols = len(rows[0]) if rows else 0
    for r in rows:
        if len(r) != ncols:
            raise ValueError("ragged matrix")
        if any(isinstance(x, float) for x in r):
            raise TypeError("floating point entries; convert to Fraction first")
    return [sparse(r) for r in rows], ncols


# ---------------------------------------------------------------------------
# elimination


class Echelon:
    """Incrementally maintained reduced row echelon form.

    ``pivots`` maps pivot column -> row whose pivot entry is 1 and which
    contains no other pivot column.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: Dict[int, SparseRow] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: SparseRow) -> SparseRow:
        row = dict(row)
        for col in [c for c in row if c in self.pivots]:
            coef = row.get(col)
            if not coef:
                continue
            for c, x in self.pivots[col].items():
                y = row.get(c, 0) - coef * x
                if y:
                    row[c] = y
                else:
                    row.pop(c, None)
        return row

    def add(self, row: SparseRow) -> bool:
        """Insert a row; returns True iff it increased the rank."""
        row = self.reduce(row)
        if not row:
            return False
        col = min(row)
        inv = Fraction(1) / row[col]
        row = {c: x * inv for c, x in row.items()}
        for prow in self.pivots.values():
            coef = prow.get(col)
            if coef:
                for c, x in row.items():
                    y = prow.get(c, 0) - coef * x
                    if y:
                        prow[c] = y
                    else:
                        prow.pop(c, None)
        self.pivots[col] = row
        return True

    def contains(self, row: SparseRow) -> bool:
        return not self.reduce(row)

    def nullspace(self) -> List[SparseRow]:
        free = [c for c in range(self.ncols) if c not in self.pivots]
        # column -> [(pivot col, entry)] for the free columns
        by_col: Dict[int, List[Tuple[int, object]]] = {}
        for p, prow in self.pivots.items():
            for c, x in prow.items():
                if c != p:
                    by_col.setdefault(c, []).append((p, x))
        basis = []
        for f in free:
            v: SparseRow = {f: Fraction(1)}
            for p, x in by_col.get(f, ()):
                v[p] = -x
            basis.append(v)
        return basis


def echelon(m) -> Echelon:
    rows, ncols = _as_rows(m)
    e = Echelon(ncols)
    for r in rows:
        e.add(r)
    return e


def rank(m) -> int:
    """Exact rank of a dense matrix or ``(sparse_rows, ncols)`` pair."""
    return echelon(m).rank


def nullspace(m, as_dense: bool = True):
    """Basis of ``{v : m v = 0}``; one vector per free column of the RREF."""
    rows, ncols = _as_rows(m)
    e = Echelon(ncols)
    for r in rows:
        e.add(r)
    basis = e.nullspace()
    if as_dense:
        return [dense(v, ncols) for v in basis]
    return basis


def _check_lengths(vectors: Iterable[VectorLike], length: int):
    for v in vectors:
        if not isinstance(v, Mapping) and len(v) != length:
            raise ValueError(f"dimension mismatch: expected {length}, got {len(v)}")


def span_contains(basis: Sequence[VectorLike], v: VectorLike, length: int | None = None) -> bool:
    """True iff ``v`` is an exact linear combination of ``basis``."""
    if length is None:
        if not isinstance(v, Mapping):
            length = len(v)
        elif basis and not isinstance(basis[0], Mapping):
            length = len(basis[0])
        else:
            length = 1 + max([max(b, default=-1) for b in basis] + [max(v, default=-1)])
    _check_lengths(basis, length)
    _check_lengths([v], length)
    e = Echelon(length)
    for b in basis:
        e.add(sparse(b))
    return e.contains(sparse(v))


def span_basis(vectors: Sequence[VectorLike], length: int) -> List[SparseRow]:
    """An independent subset-free basis (RREF rows) of the span."""
    e = Echelon(length)
    for v in vectors:
        e.add(sparse(v))
    return [e.pivots[c] for c in sorted(e.pivots)]


def intersect_subspaces(b1: Sequence[VectorLike], b2: Sequence[VectorLike],
                        length: int | None = None, as_dense: bool = True):
    """Basis of ``span(b1) ∩ span(b2)``.

    Solves ``sum_i s_i b1_i - sum_j t_j b2_j = 0`` and maps the kernel
    through ``b1``; the result is reduced to an echelon basis.
    """
    if length is None:
        probe = next((v for v in list(b1) + list(b2) if not isinstance(v, Mapping)), None)
        if probe is None:
            raise ValueError("ambient dimension required for sparse input")
        length = len(probe)
    _check_lengths(b1, length)
    _check_lengths(b2, length)
    s1 = [sparse(v) for v in b1]
    s2 = [sparse(v) for v in b2]
    k1 = len(s1)
    # transpose: one row per ambient coordinate
    rows: List[SparseRow] = [dict() for _ in range(length)]
    for j, v in enumerate(s1):
        for c, x in v.items():
            rows[c][j] = x
    for j, v in enumerate(s2):
        for c, x in v.items():
            rows[c][k1 + j] = -x
    kernel = nullspace(([r for r in rows if r], k1 + len(s2)), as_dense=False)
    images = []
    for kv in kernel:
        w: SparseRow = {}
        for j, coef in kv.items():
            if j < k1:
                for c, x in s1[j].items():
                    y = w.get(c, 0) + coef * x
                    if y:
                        w[c] = y
                    else:
                        w.pop(c, None)
        images.append(w)
    out = span_basis(images, length)
    if as_dense:
        return [dense(v, length) for v in out]
    return out


def matvec(m: Sequence[Sequence], v: Sequence) -> List:
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in m]


def transpose(m: Sequence[Sequence]) -> List[List]:
    return [list(col) for col in zip(*m)]


def solve(m, b: Sequence) -> List | None:
    """One exact solution of ``m x = b`` or ``None`` if inconsistent."""
    rows, ncols = _as_rows(m)
    aug = []
    for r, rhs in zip(rows, b):
        r = dict(r)
        if rhs:
            r[ncols] = rhs
        aug.append(r)
    e = Echelon(ncols + 1)
    for r in aug:
        e.add(r)
    if ncols in e.pivots:
        return None
    x = [Fraction(0)] * ncols
    for p, prow in e.pivots.items():
        x[p] = prow.get(ncols, Fraction(0))
    return x
