"""Representations g = sl(W2) + so(Wn) on V = W2 (x) Wn, and sl(2) on binary forms.

Conventions (fixed once, used everywhere):

* ``W2`` has basis ``e1, e2`` with area form ``<e1, e2> = 1``.
* ``Wn`` has an orthonormal basis ``x_1..x_n`` with ``(x_i, x_j) = delta_ij eps_i``;
  for signature ``(p, q)`` the first ``p`` signs are ``+1``.
* ``sl(W2)`` is stored in the ``S^2 W2`` basis ``(e1^2, e1e2, e2^2)`` acting by
  ``(uv).w = <u,w> v + <v,w> u``; ``so(Wn)`` in the ``Lambda^2 Wn`` basis
  ``x_i^x_j`` (i < j, lexicographic) acting by ``(x^y).z = (x,z) y - (y,z) x``.
* ``V`` has basis ``e_a (x) x_i`` ordered ``a``-major (index ``a*n + i``).
* Binary forms of degree ``d`` use the monomial basis ``e1^(d-k) e2^k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial, gcd
from typing import List, Sequence, Tuple

import numpy as np

from . import exact_linalg as xl

TENSOR_REAL = "tensor-real"
TENSOR_COMPLEX = "tensor-complex"
BINARY_CUBIC = "binary-cubic"
SYM_POWER = "sym-power"
FAMILIES = (TENSOR_REAL, TENSOR_COMPLEX, BINARY_CUBIC, SYM_POWER)

ZERO = Fraction(0)
ONE = Fraction(1)


class SpecMismatch(ValueError):
    """Elements from different representations were combined."""


@dataclass(frozen=True)
class RepSpec:
    """Which representation to build.

    ``sym-power`` (sl(2) on binary forms of a given degree) exists only as a
    control for the invariant-form lemma; ``binary-cubic`` is its degree-3 case
    with the full set of downstream computations.
    """

    family: str
    p: int = 0
    q: int = 0
    center: bool = False
    field: str = "R"
    degree: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == TENSOR_REAL:
            if self.p < 0 or self.q < 0 or self.p + self.q < 2:
                raise ValueError("TensorReal requires p + q >= 2")
            if self.field != "R":
                raise ValueError("TensorReal is defined over R")
        elif self.family == TENSOR_COMPLEX:
            if self.p < 2 or self.q != 0:
                raise ValueError("TensorComplex requires n >= 2")
            if self.field != "C":
                raise ValueError("TensorComplex is defined over C")
        else:
            if self.center:
                raise ValueError("binary forms carry no center option")
            if self.family == BINARY_CUBIC and self.degree != 3:
                raise ValueError("BinaryCubic fixes degree 3")
            if self.family == SYM_POWER and self.degree < 1:
                raise ValueError("symmetric power degree must be >= 1")
            if self.field not in ("R", "C"):
                raise ValueError("field must be R or C")

    @classmethod
    def tensor_real(cls, p: int, q: int = 0, center: bool = False) -> "RepSpec":
        return cls(TENSOR_REAL, p, q, center, "R")

    @classmethod
    def tensor_complex(cls, n: int, center: bool = False) -> "RepSpec":
        return cls(TENSOR_COMPLEX, n, 0, center, "C")

    @classmethod
    def binary_cubic(cls, field: str = "R") -> "RepSpec":
        return cls(BINARY_CUBIC, field=field, degree=3)

    @classmethod
    def sym_power(cls, degree: int, field: str = "R") -> "RepSpec":
        return cls(SYM_POWER, field=field, degree=degree)

    @property
    def is_tensor(self) -> bool:
        return self.family in (TENSOR_REAL, TENSOR_COMPLEX)

    @property
    def n(self) -> int:
        return self.p + self.q if self.is_tensor else 2

    @property
    def is_complex(self) -> bool:
        return self.field == "C"

    @property
    def label(self) -> str:
        c = "+center" if self.center else ""
        if self.family == TENSOR_REAL:
            return f"TensorReal({self.p},{self.q}){c}"
        if self.family == TENSOR_COMPLEX:
            return f"TensorComplex({self.p}){c}"
        if self.family == BINARY_CUBIC:
            return f"BinaryCubic({self.field})"
        return f"SymPower({self.degree},{self.field})"

    def as_dict(self) -> dict:
        return {"family": self.family, "p": self.p, "q": self.q, "center": self.center,
                "field": self.field, "degree": self.degree, "label": self.label}


@dataclass(frozen=True)
class Metric:
    eps: Tuple[int, ...]

    def __post_init__(self):
        if any(e not in (1, -1) for e in self.eps):
            raise ValueError("metric signs must be +-1")

    def inner(self, x: Sequence, y: Sequence):
        return sum((e * a * b for e, a, b in zip(self.eps, x, y)), ZERO)


def area(e: Sequence, f: Sequence):
    """The area form ``<e, f>`` on W2 with ``<e1, e2> = 1``."""
    return e[0] * f[1] - e[1] * f[0]


@dataclass(frozen=True)
class AlgElem:
    spec: RepSpec
    coeffs: tuple

    def _check(self, other):
        if not isinstance(other, AlgElem) or other.spec != self.spec:
            raise SpecMismatch("Lie algebra elements from different representations")

    def __add__(self, other):
        self._check(other)
        return AlgElem(self.spec, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        return AlgElem(self.spec, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return AlgElem(self.spec, tuple(-a for a in self.coeffs))

    def __rmul__(self, s):
        return AlgElem(self.spec, tuple(s * a for a in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class VecElem:
    spec: RepSpec
    coeffs: tuple

    def _check(self, other):
        if not isinstance(other, VecElem) or other.spec != self.spec:
            raise SpecMismatch("vectors from different representations")

    def __add__(self, other):
        self._check(other)
        return VecElem(self.spec, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        return VecElem(self.spec, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return VecElem(self.spec, tuple(-a for a in self.coeffs))

    def __rmul__(self, s):
        return VecElem(self.spec, tuple(s * a for a in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)


def _matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), ZERO)
             for j in range(len(b[0]))] for i in range(len(a))]


def _sl2_endo(u, v):
    """Matrix of ``uv`` in S^2 W2 acting on W2 (columns are images of e1, e2)."""
    basis = ((ONE, ZERO), (ZERO, ONE))
    cols = []
    for w in basis:
        img = [area(u, w) * v[k] + area(v, w) * u[k] for k in range(2)]
        cols.append(img)
    return [[cols[j][i] for j in range(2)] for i in range(2)]


@dataclass
class Representation:
    """All exact structure of one RepSpec.  Build through :func:`get_rep`."""

    spec: RepSpec
    g_labels: List[str]
    v_labels: List[str]
    act_mats: List[List[List[Fraction]]]     # act_mats[a][i][j]: coeff of u_i in g_a . u_j
    metric: Metric | None
    sl2_slice: slice
    so_pairs: List[Tuple[int, int]]
    center_index: int | None
    struct: List[List[tuple]] = field(default_factory=list)
    gram_B: List[List[Fraction]] = field(default_factory=list)
    gram_B_inv: List[List[Fraction]] = field(default_factory=list)
    gram_sigma: List[List[Fraction]] = field(default_factory=list)

    @property
    def dim_g(self) -> int:
        return len(self.g_labels)

    @property
    def dim_V(self) -> int:
        return len(self.v_labels)

    @property
    def n(self) -> int:
        return self.spec.n

    # -- element constructors ------------------------------------------------
    def alg(self, coeffs) -> AlgElem:
        coeffs = tuple(xl.to_scalar(c) for c in coeffs)
        if len(coeffs) != self.dim_g:
            raise ValueError(f"expected {self.dim_g} coefficients")
        return AlgElem(self.spec, coeffs)

    def vec(self, coeffs) -> VecElem:
        coeffs = tuple(xl.to_scalar(c) for c in coeffs)
        if len(coeffs) != self.dim_V:
            raise ValueError(f"expected {self.dim_V} coefficients")
        return VecElem(self.spec, coeffs)

    def g_basis(self) -> List[AlgElem]:
        return [self.alg([ONE if i == k else ZERO for i in range(self.dim_g)])
                for k in range(self.dim_g)]

    def v_basis(self) -> List[VecElem]:
        return [self.vec([ONE if i == k else ZERO for i in range(self.dim_V)])
                for k in range(self.dim_V)]

    def zero_alg(self) -> AlgElem:
        return self.alg([ZERO] * self.dim_g)

    def sym2(self, u: Sequence, v: Sequence) -> AlgElem:
        """The element ``uv`` of S^2 W2 = sl(W2)."""
        c = [ZERO] * self.dim_g
        s = self.sl2_slice.start
        c[s] = u[0] * v[0]
        c[s + 1] = u[0] * v[1] + u[1] * v[0]
        c[s + 2] = u[1] * v[1]
        return self.alg(c)

    def wedge(self, x: Sequence, y: Sequence) -> AlgElem:
        """The element ``x ^ y`` of Lambda^2 Wn = so(Wn)."""
        self._need_tensor()
        c = [ZERO] * self.dim_g
        for k, (i, j) in enumerate(self.so_pairs):
            c[self.sl2_slice.stop + k] = x[i] * y[j] - x[j] * y[i]
        return self.alg(c)

    def center_elem(self) -> AlgElem:
        if self.center_index is None:
            raise ValueError("representation has no center")
        c = [ZERO] * self.dim_g
        c[self.center_index] = ONE
        return self.alg(c)

    def tensor(self, e: Sequence, x: Sequence) -> VecElem:
        """The pure tensor ``e (x) x`` in V = W2 (x) Wn."""
        self._need_tensor()
        n = self.n
        return self.vec([e[a] * x[i] for a in range(2) for i in range(n)])

    def _need_tensor(self):
        if not self.spec.is_tensor:
            raise ValueError(f"{self.spec.label} is not a tensor representation")

    # -- parts ---------------------------------------------------------------
    def sl2_part(self, a: AlgElem) -> AlgElem:
        c = [ZERO] * self.dim_g
        c[self.sl2_slice] = a.coeffs[self.sl2_slice]
        return self.alg(c)

    def so_part(self, a: AlgElem) -> AlgElem:
        c = [ZERO] * self.dim_g
        lo = self.sl2_slice.stop
        for k in range(len(self.so_pairs)):
            c[lo + k] = a.coeffs[lo + k]
        return self.alg(c)

    def sl2_matrix(self, a: AlgElem):
        s = self.sl2_slice.start
        out = [[ZERO, ZERO], [ZERO, ZERO]]
        for k, (u, v) in enumerate((((ONE, ZERO), (ONE, ZERO)),
                                    ((ONE, ZERO), (ZERO, ONE)),
                                    ((ZERO, ONE), (ZERO, ONE)))):
            m = _sl2_endo(u, v)
            for i in range(2):
                for j in range(2):
                    out[i][j] += a.coeffs[s + k] * m[i][j]
        return out

    def so_matrix(self, a: AlgElem):
        self._need_tensor()
        n = self.n
        eps = self.metric.eps
        out = [[ZERO] * n for _ in range(n)]
        lo = self.sl2_slice.stop
        for k, (i, j) in enumerate(self.so_pairs):
            c = a.coeffs[lo + k]
            if c:
                out[j][i] += c * eps[i]
                out[i][j] -= c * eps[j]
        return out

    def apply_sl2(self, a: AlgElem, e: Sequence):
        m = self.sl2_matrix(a)
        return [m[0][0] * e[0] + m[0][1] * e[1], m[1][0] * e[0] + m[1][1] * e[1]]

    def apply_so(self, a: AlgElem, x: Sequence):
        m = self.so_matrix(a)
        return [sum((m[i][j] * x[j] for j in range(self.n)), ZERO) for i in range(self.n)]

    def inner(self, x: Sequence, y: Sequence):
        return self.metric.inner(x, y)

    # -- float views ---------------------------------------------------------
    def float_arrays(self) -> dict:
        return _float_arrays(self.spec)


# ---------------------------------------------------------------------------
# construction


def _tensor_rep(spec: RepSpec) -> Representation:
    n = spec.n
    eps = tuple([1] * spec.p + [-1] * spec.q) if spec.family == TENSOR_REAL else (1,) * n
    metric = Metric(eps)
    pairs = list(combinations(range(n), 2))
    labels = ["e1^2", "e1e2", "e2^2"] + [f"x{i + 1}^x{j + 1}" for i, j in pairs]
    if spec.center:
        labels.append("id")
    vlabels = [f"e{a + 1}(x)x{i + 1}" for a in range(2) for i in range(n)]

    ident2 = [[ONE if i == j else ZERO for j in range(2)] for i in range(2)]
    identn = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]

    def kron(A, B):
        ra, rb = len(A), len(B)
        return [[A[i // rb][j // rb] * B[i % rb][j % rb] for j in range(ra * rb)]
                for i in range(ra * rb)]

    mats = []
    e = ((ONE, ZERO), (ZERO, ONE))
    for u, v in ((e[0], e[0]), (e[0], e[1]), (e[1], e[1])):
        mats.append(kron(_sl2_endo(u, v), identn))
    for i, j in pairs:
        m = [[ZERO] * n for _ in range(n)]
        m[j][i] += eps[i]
        m[i][j] -= eps[j]
        mats.append(kron(ident2, m))
    if spec.center:
        mats.append([[ONE if i == j else ZERO for j in range(2 * n)] for i in range(2 * n)])
    rep = Representation(spec, labels, vlabels, mats, metric, slice(0, 3), pairs,
                         len(labels) - 1 if spec.center else None)
    return rep


def _binary_form_rep(spec: RepSpec) -> Representation:
    d = spec.degree
    labels = ["e1^2", "e1e2", "e2^2"]
    vlabels = []
    for k in range(d + 1):
        parts = []
        if d - k:
            parts.append("e1" if d - k == 1 else f"e1^{d - k}")
        if k:
            parts.append("e2" if k == 1 else f"e2^{k}")
        vlabels.append("".join(parts))
    e = ((ONE, ZERO), (ZERO, ONE))
    mats = []
    for u, v in ((e[0], e[0]), (e[0], e[1]), (e[1], e[1])):
        A = _sl2_endo(u, v)
        m = [[ZERO] * (d + 1) for _ in range(d + 1)]
        # derivation on e1^(d-k) e2^k
        for k in range(d + 1):
            a, b = d - k, k
            m[k][k] += a * A[0][0] + b * A[1][1]
            if a and k + 1 <= d:
                m[k + 1][k] += a * A[1][0]
            if b and k - 1 >= 0:
                m[k - 1][k] += b * A[0][1]
        mats.append(m)
    return Representation(spec, labels, vlabels, mats, None, slice(0, 3), [], None)


def _decompose(rep: Representation, mat) -> tuple:
    """Coefficients of an endomorphism in the span of the basis actions."""
    dv = rep.dim_V
    cols = [[m[i][j] for i in range(dv) for j in range(dv)] for m in rep.act_mats]
    target = [mat[i][j] for i in range(dv) for j in range(dv)]
    sol = xl.solve(xl.transpose(cols), target)
    if sol is None:
        raise ArithmeticError("commutator left the Lie algebra")
    return tuple(sol)


def _gram_B(rep: Representation):
    spec = rep.spec
    dg = rep.dim_g
    if not spec.is_tensor:
        # trace form of the action on V, divided by -gcd so that it agrees with
        # the sl(W2) block of the tensor pairing
        T = [[sum((rep.act_mats[a][i][k] * rep.act_mats[b][k][i]
                   for i in range(rep.dim_V) for k in range(rep.dim_V)), ZERO)
              for b in range(dg)] for a in range(dg)]
        g = 0
        for row in T:
            for x in row:
                g = gcd(g, x.numerator)
        return [[x / -g for x in row] for row in T]
    basis = rep.g_basis()
    e = ((ONE, ZERO), (ZERO, ONE))
    sl2_args = ((e[0], e[0]), (e[0], e[1]), (e[1], e[1]))
    n = rep.n
    xs = [[ONE if i == k else ZERO for i in range(n)] for k in range(n)]
    G = [[ZERO] * dg for _ in range(dg)]
    for a in range(dg):
        A = basis[a]
        for k, (u, v) in enumerate(sl2_args):
            # B(A, uv) = <A u, v>
            G[a][k] = area(rep.apply_sl2(A, u), v)
        for k, (i, j) in enumerate(rep.so_pairs):
            # B(M, x_i ^ x_j) = (M x_i, x_j)
            G[a][3 + k] = rep.inner(rep.apply_so(A, xs[i]), xs[j])
    if spec.center:
        G[rep.center_index][rep.center_index] = ONE
    return G


def _gram_sigma(rep: Representation):
    spec = rep.spec
    dv = rep.dim_V
    if spec.is_tensor:
        n = rep.n
        S = [[ZERO] * dv for _ in range(dv)]
        e = ((ONE, ZERO), (ZERO, ONE))
        for a in range(2):
            for b in range(2):
                w = area(e[a], e[b])
                if not w:
                    continue
                for i in range(n):
                    S[a * n + i][b * n + i] = w * rep.metric.eps[i]
        return S
    d = spec.degree
    S = [[ZERO] * dv for _ in range(dv)]
    if d % 2 == 1:
        vals = [(-1) ** k * factorial(k) * factorial(d - k) for k in range(d + 1)]
        g = 0
        for v in vals:
            g = gcd(g, v)
        for k in range(d + 1):
            S[k][d - k] = Fraction(vals[k], g)
    return S


def _inverse(G):
    n = len(G)
    cols = []
    for k in range(n):
        e = [ONE if i == k else ZERO for i in range(n)]
        x = xl.solve(G, e)
        if x is None:
            raise ArithmeticError("singular Gram matrix")
        cols.append(x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


@lru_cache(maxsize=None)
def get_rep(spec: RepSpec) -> Representation:
    rep = _tensor_rep(spec) if spec.is_tensor else _binary_form_rep(spec)
    mats = rep.act_mats
    dg = rep.dim_g
    struct = [[None] * dg for _ in range(dg)]
    for a in range(dg):
        for b in range(dg):
            if b < a:
                struct[a][b] = tuple(-c for c in struct[b][a])
                continue
            ab = _matmul(mats[a], mats[b])
            ba = _matmul(mats[b], mats[a])
            comm = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(ab, ba)]
            struct[a][b] = _decompose(rep, comm)
    rep.struct = struct
    rep.gram_B = _gram_B(rep)
    rep.gram_B_inv = _inverse(rep.gram_B)
    rep.gram_sigma = _gram_sigma(rep)
    return rep


@lru_cache(maxsize=None)
def _float_arrays(spec: RepSpec) -> dict:
    rep = get_rep(spec)
    f = np.vectorize(float, otypes=[float])
    act = f(np.array(rep.act_mats, dtype=object))
    struct = f(np.array(rep.struct, dtype=object))     # struct[a, b, c]: coeff of g_c in [g_a, g_b]
    out = {
        "act": act,
        "struct": struct,
        "B": f(np.array(rep.gram_B, dtype=object)),
        "B_inv": f(np.array(rep.gram_B_inv, dtype=object)),
        "sigma": f(np.array(rep.gram_sigma, dtype=object)),
    }
    for v in out.values():
        v.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# operations


def _rep_of(*elems) -> Representation:
    spec = elems[0].spec
    for e in elems[1:]:
        if e.spec != spec:
            raise SpecMismatch(f"{e.spec.label} vs {spec.label}")
    return get_rep(spec)


def act(a: AlgElem, v: VecElem) -> VecElem:
    rep = _rep_of(a, v)
    out = [ZERO] * rep.dim_V
    for k, c in enumerate(a.coeffs):
        if not c:
            continue
        m = rep.act_mats[k]
        for j, x in enumerate(v.coeffs):
            if not x:
                continue
            for i in range(rep.dim_V):
                if m[i][j]:
                    out[i] += c * x * m[i][j]
    return VecElem(rep.spec, tuple(out))


def bracket(a: AlgElem, b: AlgElem) -> AlgElem:
    rep = _rep_of(a, b)
    out = [ZERO] * rep.dim_g
    for i, x in enumerate(a.coeffs):
        if not x:
            continue
        for j, y in enumerate(b.coeffs):
            if not y:
                continue
            for k, s in enumerate(rep.struct[i][j]):
                if s:
                    out[k] += x * y * s
    return AlgElem(rep.spec, tuple(out))


def _bilinear(G, u, v):
    total = ZERO
    for i, x in enumerate(u):
        if not x:
            continue
        row = G[i]
        for j, y in enumerate(v):
            if y and row[j]:
                total += x * row[j] * y
    return total


def pair_B(a: AlgElem, b: AlgElem):
    """The invariant pairing B on g (for binary forms: trace form on V)."""
    rep = _rep_of(a, b)
    return _bilinear(rep.gram_B, a.coeffs, b.coeffs)


def sigma(u: VecElem, v: VecElem):
    """The invariant symplectic form on V."""
    rep = _rep_of(u, v)
    return _bilinear(rep.gram_sigma, u.coeffs, v.coeffs)


def B_flat(a: AlgElem) -> tuple:
    """Covector ``B(a, .)`` in coordinates against the basis of g."""
    rep = get_rep(a.spec)
    return tuple(_bilinear(rep.gram_B, a.coeffs, [ONE if i == k else ZERO for i in range(rep.dim_g)])
                 for k in range(rep.dim_g))


def B_sharp(spec: RepSpec, covector: Sequence) -> AlgElem:
    """The element ``a`` of g with ``B(a, .) = covector``."""
    rep = get_rep(spec)
    Binv = rep.gram_B_inv
    return rep.alg([sum((Binv[i][j] * covector[j] for j in range(rep.dim_g)), ZERO)
                    for i in range(rep.dim_g)])


@dataclass(frozen=True)
class Bases:
    g: List[str]
    V: List[str]
    L2: List[Tuple[int, int]]
    L3: List[Tuple[int, int, int]]
    S2g: List[Tuple[int, int]]


def enumerate_bases(spec: RepSpec) -> Bases:
    rep = get_rep(spec)
    dv, dg = rep.dim_V, rep.dim_g
    return Bases(
        g=list(rep.g_labels),
        V=list(rep.v_labels),
        L2=list(combinations(range(dv), 2)),
        L3=list(combinations(range(dv), 3)),
        S2g=[(a, b) for a in range(dg) for b in range(a, dg)],
    )


def dims(spec: RepSpec) -> dict:
    rep = get_rep(spec)
    return {"dim_g": rep.dim_g, "dim_V": rep.dim_V,
            "dim_L2": comb(rep.dim_V, 2), "dim_L3": comb(rep.dim_V, 3),
            "dim_S2g": comb(rep.dim_g + 1, 2)}
