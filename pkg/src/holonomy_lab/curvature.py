"""Curvature space K(g), second curvature space K^1(g) and the jet space J_2(g).

Coordinates:

* ``Lambda^2 V* (x) g``: index ``pair * dim_g + a`` where ``pair`` enumerates
  ``(i, j), i < j`` lexicographically and ``a`` a basis element of g.  The
  entry is the ``g_a``-coefficient of ``R(u_i, u_j)``.
* ``g (x) g (x) Lambda^2 V*``: index ``(a * dim_g + b) * npairs + pair``.
* ``V* (x) Lambda^2 V* (x) g``: index ``k * (npairs * dim_g) + pair * dim_g + a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import Dict, List, Sequence, Tuple

from . import exact_linalg as xl
from .rep_core import (ONE, ZERO, AlgElem, RepSpec, SpecMismatch, VecElem, area, get_rep,
                       pair_B, sigma)

#: phi2'(B_flat(a)) == RHO_PROPORTIONALITY * rho_a for every tensor representation.
RHO_PROPORTIONALITY = Fraction(1)


@lru_cache(maxsize=None)
def pair_index(dim_V: int) -> Tuple[List[Tuple[int, int]], Dict[Tuple[int, int], int]]:
    pairs = list(combinations(range(dim_V), 2))
    return pairs, {p: k for k, p in enumerate(pairs)}


def _pair_sign(i: int, j: int, index: Dict[Tuple[int, int], int]):
    """(position, sign) of u_i ^ u_j in the pair basis, or None if i == j."""
    if i < j:
        return index[(i, j)], 1
    if i > j:
        return index[(j, i)], -1
    return None


# ---------------------------------------------------------------------------
# element types


@dataclass(frozen=True)
class CurvatureElem:
    """Element of Lambda^2 V* (x) g."""

    spec: RepSpec
    coeffs: tuple

    def value(self, i: int, j: int) -> tuple:
        """Coordinates of R(u_i, u_j) in g."""
        rep = get_rep(self.spec)
        dg = rep.dim_g
        _, index = pair_index(rep.dim_V)
        ps = _pair_sign(i, j, index)
        if ps is None:
            return (ZERO,) * dg
        k, s = ps
        vals = self.coeffs[k * dg:(k + 1) * dg]
        return vals if s > 0 else tuple(-x for x in vals)

    def __call__(self, u: VecElem, v: VecElem) -> AlgElem:
        if u.spec != self.spec or v.spec != self.spec:
            raise SpecMismatch("curvature evaluated on foreign vectors")
        rep = get_rep(self.spec)
        dg = rep.dim_g
        pairs, _ = pair_index(rep.dim_V)
        out = [ZERO] * dg
        for k, (i, j) in enumerate(pairs):
            w = u.coeffs[i] * v.coeffs[j] - u.coeffs[j] * v.coeffs[i]
            if w:
                for a in range(dg):
                    x = self.coeffs[k * dg + a]
                    if x:
                        out[a] += w * x
        return AlgElem(self.spec, tuple(out))

    def __add__(self, other):
        return CurvatureElem(self.spec, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __rmul__(self, s):
        return CurvatureElem(self.spec, tuple(s * a for a in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class Curvature2Elem:
    """Element of V* (x) K(g), coefficients against (V dual basis) x (K basis)."""

    spec: RepSpec
    coeffs: tuple

    def __call__(self, x: VecElem) -> CurvatureElem:
        rep = get_rep(self.spec)
        kb = compute_K(self.spec)
        dk = len(kb)
        out = [ZERO] * len(kb[0].coeffs) if kb else []
        for j, xj in enumerate(x.coeffs):
            if not xj:
                continue
            for kk in range(dk):
                c = self.coeffs[j * dk + kk]
                if c:
                    for t, y in enumerate(kb[kk].coeffs):
                        if y:
                            out[t] += xj * c * y
        return CurvatureElem(rep.spec, tuple(out))

    def ambient(self) -> tuple:
        """Coordinates in V* (x) Lambda^2 V* (x) g."""
        rep = get_rep(self.spec)
        out = []
        for j in range(rep.dim_V):
            e = rep.vec([ONE if i == j else ZERO for i in range(rep.dim_V)])
            out.extend(self(e).coeffs)
        return tuple(out)


@dataclass(frozen=True)
class JetElem:
    """Element of g (x) g (x) Lambda^2 V*, read as a quadratic map g* -> Lambda^2 V*."""

    spec: RepSpec
    coeffs: tuple

    def entry(self, a: int, b: int, i: int, j: int):
        rep = get_rep(self.spec)
        pairs, index = pair_index(rep.dim_V)
        ps = _pair_sign(i, j, index)
        if ps is None:
            return ZERO
        k, s = ps
        x = self.coeffs[(a * rep.dim_g + b) * len(pairs) + k]
        return x if s > 0 else -x

    def __call__(self, p1: Sequence, p2: Sequence, u: VecElem, v: VecElem):
        """Evaluate on covectors p1, p2 in g* (coordinates against the g basis)."""
        rep = get_rep(self.spec)
        dg = rep.dim_g
        pairs, _ = pair_index(rep.dim_V)
        np_ = len(pairs)
        w = [u.coeffs[i] * v.coeffs[j] - u.coeffs[j] * v.coeffs[i] for i, j in pairs]
        total = ZERO
        for a in range(dg):
            if not p1[a]:
                continue
            for b in range(dg):
                if not p2[b]:
                    continue
                base = (a * dg + b) * np_
                s = ZERO
                for k in range(np_):
                    if w[k]:
                        x = self.coeffs[base + k]
                        if x:
                            s += w[k] * x
                if s:
                    total += p1[a] * p2[b] * s
        return total

    def sym_coeffs(self) -> Dict[Tuple[int, int, int], object]:
        """Nonzero coefficients over the S^2 g (x) Lambda^2 V* basis (a <= b)."""
        rep = get_rep(self.spec)
        dg = rep.dim_g
        np_ = len(pair_index(rep.dim_V)[0])
        out = {}
        for a in range(dg):
            for b in range(a, dg):
                for k in range(np_):
                    x = self.coeffs[(a * dg + b) * np_ + k]
                    if x:
                        out[(a, b, k)] = x
        return out

    def __rmul__(self, s):
        return JetElem(self.spec, tuple(s * a for a in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)


def _primitive(v: Sequence) -> tuple:
    """Scale a rational vector to coprime integers with a positive leading entry."""
    nz = [Fraction(x) for x in v if x]
    if not nz:
        return tuple(v)
    den = 1
    for x in nz:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    lead = next(x for x in ints if x)
    s = g if lead > 0 else -g
    return tuple(Fraction(x, s) for x in ints)


# ---------------------------------------------------------------------------
# K(g)


def bianchi1_rows(spec: RepSpec) -> Tuple[List[dict], int]:
    """Sparse matrix of Lambda^2 V* (x) g -> Lambda^3 V* (x) V."""
    rep = get_rep(spec)
    dv, dg = rep.dim_V, rep.dim_g
    _, index = pair_index(dv)
    mats = rep.act_mats
    rows = []
    for i, j, k in combinations(range(dv), 3):
        # R(u_i,u_j).u_k + R(u_j,u_k).u_i + R(u_k,u_i).u_j
        terms = ((index[(i, j)], k, 1), (index[(j, k)], i, 1), (index[(i, k)], j, -1))
        for m in range(dv):
            row: dict = {}
            for pk, w, s in terms:
                for a in range(dg):
                    x = mats[a][m][w]
                    if x:
                        col = pk * dg + a
                        y = row.get(col, 0) + s * x
                        if y:
                            row[col] = y
                        else:
                            row.pop(col, None)
            if row:
                rows.append(row)
    return rows, len(index) * dg


def bianchi1_residual(r: CurvatureElem) -> Dict[int, object]:
    """Nonzero entries of the skew-symmetrization of r into Lambda^3 V* (x) V."""
    rows, _ = bianchi1_rows(r.spec)
    out = {}
    for t, row in enumerate(rows):
        s = sum((x * r.coeffs[c] for c, x in row.items()), ZERO)
        if s:
            out[t] = s
    return out


@lru_cache(maxsize=None)
def compute_K(spec: RepSpec) -> Tuple[CurvatureElem, ...]:
    """Basis of the formal curvature space K(g) (exact kernel of the Bianchi map)."""
    rows, ncols = bianchi1_rows(spec)
    basis = xl.nullspace((rows, ncols), as_dense=True)
    return tuple(CurvatureElem(spec, _primitive(v)) for v in basis)


@lru_cache(maxsize=None)
def k_echelon(spec: RepSpec) -> xl.Echelon:
    kb = compute_K(spec)
    e = xl.Echelon(len(pair_index(get_rep(spec).dim_V)[0]) * get_rep(spec).dim_g)
    for r in kb:
        e.add(xl.sparse(r.coeffs))
    return e


def in_K(spec: RepSpec, coeffs: Sequence) -> bool:
    return k_echelon(spec).contains(xl.sparse(coeffs))


# ---------------------------------------------------------------------------
# K^1(g)


def bianchi2_residual(spec: RepSpec, ambient: Sequence) -> Dict[Tuple[int, int, int, int], object]:
    """Second Bianchi sum for an element of V* (x) Lambda^2 V* (x) g."""
    rep = get_rep(spec)
    dv, dg = rep.dim_V, rep.dim_g
    _, index = pair_index(dv)
    block = len(index) * dg
    out = {}
    for i, j, k in combinations(range(dv), 3):
        for a in range(dg):
            s = (ambient[i * block + index[(j, k)] * dg + a]
                 - ambient[j * block + index[(i, k)] * dg + a]
                 + ambient[k * block + index[(i, j)] * dg + a])
            if s:
                out[(i, j, k, a)] = s
    return out


@lru_cache(maxsize=None)
def compute_K1(spec: RepSpec) -> Tuple[Curvature2Elem, ...]:
    """Basis of K^1(g): maps V -> K(g) obeying the second Bianchi identity."""
    rep = get_rep(spec)
    dv, dg = rep.dim_V, rep.dim_g
    _, index = pair_index(dv)
    kb = compute_K(spec)
    dk = len(kb)
    rows = []
    for i, j, k in combinations(range(dv), 3):
        terms = ((i, index[(j, k)], 1), (j, index[(i, k)], -1), (k, index[(i, j)], 1))
        for a in range(dg):
            row = {}
            for w, pk, s in terms:
                for kk in range(dk):
                    x = kb[kk].coeffs[pk * dg + a]
                    if x:
                        col = w * dk + kk
                        y = row.get(col, 0) + s * x
                        if y:
                            row[col] = y
                        else:
                            row.pop(col, None)
            if row:
                rows.append(row)
    basis = xl.nullspace((rows, dv * dk), as_dense=True)
    return tuple(Curvature2Elem(spec, _primitive(v)) for v in basis)


# ---------------------------------------------------------------------------
# J_2(g)


def jet_action(jet: JetElem, c: int) -> tuple:
    """Infinitesimal action of the basis element g_c on g (x) g (x) Lambda^2 V*."""
    rep = get_rep(jet.spec)
    dv, dg = rep.dim_V, rep.dim_g
    pairs, index = pair_index(dv)
    np_ = len(pairs)
    T = jet.coeffs
    st = rep.struct[c]           # st[d][a]: coeff of g_a in [g_c, g_d]
    A = rep.act_mats[c]
    out = [ZERO] * len(T)
    for a in range(dg):
        for b in range(dg):
            base = (a * dg + b) * np_
            for d in range(dg):
                x = st[d][a]
                if x:
                    src = (d * dg + b) * np_
                    for k in range(np_):
                        if T[src + k]:
                            out[base + k] += x * T[src + k]
                y = st[d][b]
                if y:
                    src = (a * dg + d) * np_
                    for k in range(np_):
                        if T[src + k]:
                            out[base + k] += y * T[src + k]
            for k, (i, j) in enumerate(pairs):
                s = ZERO
                for m in range(dv):
                    if A[m][i]:
                        ps = _pair_sign(m, j, index)
                        if ps:
                            s += A[m][i] * ps[1] * T[base + ps[0]]
                    if A[m][j]:
                        ps = _pair_sign(i, m, index)
                        if ps:
                            s += A[m][j] * ps[1] * T[base + ps[0]]
                if s:
                    out[base + k] -= s
    return tuple(out)


@dataclass(frozen=True)
class J2Result:
    basis: Tuple[JetElem, ...]
    invariant: bool
    residuals: Dict[Tuple[int, int], int]   # (basis index, g index) -> count of nonzero entries


def _jets_from_gK(spec: RepSpec, cvecs) -> List[tuple]:
    rep = get_rep(spec)
    dv, dg = rep.dim_V, rep.dim_g
    np_ = len(pair_index(dv)[0])
    kb = compute_K(spec)
    dk = len(kb)
    out = []
    for cv in cvecs:
        T = [ZERO] * (dg * dg * np_)
        for a in range(dg):
            for kk in range(dk):
                c = cv[a * dk + kk]
                if not c:
                    continue
                kc = kb[kk].coeffs
                for k in range(np_):
                    for b in range(dg):
                        x = kc[k * dg + b]
                        if x:
                            T[(a * dg + b) * np_ + k] += c * x
        out.append(tuple(T))
    return out


@lru_cache(maxsize=None)
def compute_J2(spec: RepSpec) -> J2Result:
    """J_2(g) = (S^2 g (x) Lambda^2 V*) ∩ (g (x) K(g)), plus a g-invariance report.

    Parametrizes g (x) K(g) by its ``dim_g * dim_K`` coordinates and imposes the
    symmetry in the two g slots.
    """
    rep = get_rep(spec)
    dv, dg = rep.dim_V, rep.dim_g
    np_ = len(pair_index(dv)[0])
    kb = compute_K(spec)
    dk = len(kb)
    rows = []
    for a in range(dg):
        for b in range(a + 1, dg):
            for k in range(np_):
                row = {}
                for kk in range(dk):
                    x = kb[kk].coeffs[k * dg + b]
                    if x:
                        row[a * dk + kk] = row.get(a * dk + kk, 0) + x
                    y = kb[kk].coeffs[k * dg + a]
                    if y:
                        row[b * dk + kk] = row.get(b * dk + kk, 0) - y
                row = {c: x for c, x in row.items() if x}
                if row:
                    rows.append(row)
    cvecs = xl.nullspace((rows, dg * dk), as_dense=True)
    jets = tuple(JetElem(spec, _primitive(T)) for T in _jets_from_gK(spec, cvecs))
    residuals = {}
    for t, jet in enumerate(jets):
        for c in range(dg):
            nz = sum(1 for x in jet_action(jet, c) if x)
            if nz:
                residuals[(t, c)] = nz
    return J2Result(jets, not residuals, residuals)


# ---------------------------------------------------------------------------
# explicit formulas (tensor families)


def _require_tensor(spec: RepSpec, what: str):
    if not spec.is_tensor:
        raise ValueError(f"{what} is only defined for tensor representations, not {spec.label}")


def _unit(k: int, n: int):
    return [ONE if i == k else ZERO for i in range(n)]


def _pure_factors(rep, i: int):
    n = rep.n
    return _unit(i // n, 2), _unit(i % n, n)


def rho_pure(a: AlgElem, e1, x1, e2, x2) -> AlgElem:
    """rho_{A+M}(e1 (x) x1, e2 (x) x2) for arbitrary factors."""
    rep = get_rep(a.spec)
    A = rep.sl2_part(a)
    M = rep.so_part(a)
    Mx1 = rep.apply_so(M, x1)
    Mx2 = rep.apply_so(M, x2)
    w = area(e1, e2)
    out = rep.zero_alg()
    if w:
        out = out + w * (rep.inner(x1, x2) * (A + M) + rep.wedge(x1, Mx2) + rep.wedge(x2, Mx1))
    out = out + rep.inner(x1, Mx2) * rep.sym2(e1, e2)
    out = out - area(rep.apply_sl2(A, e1), e2) * rep.wedge(x1, x2)
    return out


def rho_elem(a: AlgElem) -> CurvatureElem:
    """rho_a as an element of Lambda^2 V* (x) g."""
    spec = a.spec
    _require_tensor(spec, "rho")
    rep = get_rep(spec)
    if rep.center_index is not None and a.coeffs[rep.center_index]:
        raise ValueError("rho is defined on sl(2) + so(n) only")
    pairs, _ = pair_index(rep.dim_V)
    out = []
    for i, j in pairs:
        e1, x1 = _pure_factors(rep, i)
        e2, x2 = _pure_factors(rep, j)
        out.extend(rho_pure(a, e1, x1, e2, x2).coeffs)
    return CurvatureElem(spec, tuple(out))


def rho_eval(a: AlgElem, u: VecElem, v: VecElem) -> AlgElem:
    _require_tensor(a.spec, "rho")
    return rho_elem(a)(u, v)


def phi2_pure(a1: AlgElem, a2: AlgElem, e1, x1, e2, x2):
    rep = get_rep(a1.spec)
    A1, M1 = rep.sl2_part(a1), rep.so_part(a1)
    A2, M2 = rep.sl2_part(a2), rep.so_part(a2)
    u = rep.tensor(e1, x1)
    v = rep.tensor(e2, x2)
    e12 = rep.sym2(e1, e2)
    x12 = rep.wedge(x1, x2)
    val = sigma(u, v) * pair_B(a1, a2)
    val -= pair_B(A1, e12) * pair_B(M2, x12) + pair_B(A2, e12) * pair_B(M1, x12)
    w = area(e1, e2)
    if w:
        val += w * (rep.inner(rep.apply_so(M1, x1), rep.apply_so(M2, x2))
                    + rep.inner(rep.apply_so(M1, x2), rep.apply_so(M2, x1)))
    return val


def phi2_eval(a1: AlgElem, a2: AlgElem, u: VecElem, v: VecElem):
    """The quadratic jet generator evaluated on g-elements a1, a2 and vectors u, v."""
    if a1.spec != a2.spec or u.spec != a1.spec or v.spec != a1.spec:
        raise SpecMismatch("phi2 arguments from different representations")
    _require_tensor(a1.spec, "the closed-form phi2")
    rep = get_rep(a1.spec)
    pairs, _ = pair_index(rep.dim_V)
    total = ZERO
    for i, j in pairs:
        w = u.coeffs[i] * v.coeffs[j] - u.coeffs[j] * v.coeffs[i]
        if w:
            e1, x1 = _pure_factors(rep, i)
            e2, x2 = _pure_factors(rep, j)
            total += w * phi2_pure(a1, a2, e1, x1, e2, x2)
    return total


def _phi2_gram(rep, pairs) -> list:
    """Q[c][d][pair] = phi2(g_c, g_d, u_i, u_j), assembled from precomputed pairings.

    Same expansion as :func:`phi2_pure`, with every factor tabulated once.
    """
    from .rep_core import B_flat
    dg, n = rep.dim_g, rep.n
    basis = rep.g_basis()
    eps = rep.metric.eps
    S, B = rep.gram_sigma, rep.gram_B
    # M_c x_k for every basis element and every x_k
    MX = []
    for c in range(dg):
        m = rep.so_matrix(basis[c])
        MX.append([[m[i][k] for i in range(n)] for k in range(n)])
    G = {}

    def inner_MM(c, d, k, l):
        key = (c, d, k, l)
        if key not in G:
            G[key] = sum((eps[m] * MX[c][k][m] * MX[d][l][m] for m in range(n)
                          if MX[c][k][m] and MX[d][l][m]), ZERO)
        return G[key]

    rows = []
    for i, j in pairs:
        (e1, x1), (e2, x2) = _pure_factors(rep, i), _pure_factors(rep, j)
        k, l = i % n, j % n
        rows.append((i, j, k, l, area(e1, e2), B_flat(rep.sym2(e1, e2)), B_flat(rep.wedge(x1, x2))))
    Q = [[[ZERO] * len(pairs) for _ in range(dg)] for _ in range(dg)]
    for c in range(dg):
        for d in range(c, dg):
            for t, (i, j, k, l, w, bsl, bso) in enumerate(rows):
                val = S[i][j] * B[c][d] - (bsl[c] * bso[d] + bsl[d] * bso[c])
                if w:
                    val += w * (inner_MM(c, d, k, l) + inner_MM(c, d, l, k))
                Q[c][d][t] = val
                Q[d][c][t] = val
    return Q


@lru_cache(maxsize=None)
def phi2_jet(spec: RepSpec) -> JetElem:
    """The closed-form phi2 as an element of S^2 g (x) Lambda^2 V* (both slots raised by B)."""
    _require_tensor(spec, "the closed-form phi2")
    rep = get_rep(spec)
    if rep.center_index is not None:
        raise ValueError("phi2 is defined without the center")
    dg = rep.dim_g
    pairs, _ = pair_index(rep.dim_V)
    np_ = len(pairs)
    Q = _phi2_gram(rep, pairs)
    Binv = rep.gram_B_inv
    # T^{ab} = Binv^{ac} Binv^{bd} Q_{cd}
    tmp = [[[sum((Binv[a][c] * Q[c][d][k] for c in range(dg) if Binv[a][c]), ZERO)
             for k in range(np_)] for d in range(dg)] for a in range(dg)]
    T = [ZERO] * (dg * dg * np_)
    for a in range(dg):
        for b in range(dg):
            for k in range(np_):
                T[(a * dg + b) * np_ + k] = sum(
                    (Binv[b][d] * tmp[a][d][k] for d in range(dg) if Binv[b][d]), ZERO)
    return JetElem(spec, tuple(T))


def j2_generator(spec: RepSpec) -> JetElem:
    """The closed form for tensor families, the computed generator otherwise."""
    if spec.is_tensor:
        return phi2_jet(spec)
    res = compute_J2(spec)
    if len(res.basis) != 1:
        raise ArithmeticError(f"J2 of {spec.label} is {len(res.basis)}-dimensional")
    return res.basis[0]


# ---------------------------------------------------------------------------
# induced maps


@dataclass(frozen=True)
class InducedMaps:
    phi2_prime: List[List]     # columns: images of the dual basis of g*, rows: Lambda^2 V* (x) g
    phi2_dprime: List[List]    # columns: images of the dual basis of V*, rows: V* (x) Lambda^2 V* (x) g
    rank_prime: int
    rank_dprime: int


def phi2_prime_column(jet: JetElem, p: Sequence) -> tuple:
    """phi2'(p) in Lambda^2 V* (x) g coordinates for a covector p in g*."""
    rep = get_rep(jet.spec)
    dg = rep.dim_g
    np_ = len(pair_index(rep.dim_V)[0])
    out = [ZERO] * (np_ * dg)
    for a in range(dg):
        if not p[a]:
            continue
        for b in range(dg):
            base = (a * dg + b) * np_
            for k in range(np_):
                x = jet.coeffs[base + k]
                if x:
                    out[k * dg + b] += p[a] * x
    return tuple(out)


def induced_maps(jet: JetElem) -> InducedMaps:
    rep = get_rep(jet.spec)
    dg, dv = rep.dim_g, rep.dim_V
    cols = [phi2_prime_column(jet, _unit(a, dg)) for a in range(dg)]
    prime = xl.transpose(cols)
    dcols = []
    for i in range(dv):
        col = []
        for j in range(dv):
            # j(q (x) u_j)(g_a) = q(g_a . u_j) with q = u_i^*
            p = [rep.act_mats[a][i][j] for a in range(dg)]
            col.extend(phi2_prime_column(jet, p))
        dcols.append(tuple(col))
    dprime = xl.transpose(dcols)
    return InducedMaps(prime, dprime, xl.rank(cols) if cols else 0, xl.rank(dcols) if dcols else 0)


def rho_proportionality(spec: RepSpec):
    """The constant c with phi2'(B_flat(a)) = c rho_a for all basis a, or None."""
    from .rep_core import B_flat
    rep = get_rep(spec)
    jet = phi2_jet(spec)
    const = None
    for a in rep.g_basis():
        lhs = phi2_prime_column(jet, B_flat(a))
        rhs = rho_elem(a).coeffs
        for x, y in zip(lhs, rhs):
            if y:
                c = x / y
                if const is None:
                    const = c
                elif c != const:
                    return None
            elif x:
                return None
    return const


# ---------------------------------------------------------------------------
# Berger's first criterion and full curvature


def curvature_values(elems: Sequence[CurvatureElem]) -> List[tuple]:
    if not elems:
        return []
    rep = get_rep(elems[0].spec)
    dg = rep.dim_g
    out = []
    for r in elems:
        for k in range(len(r.coeffs) // dg):
            v = r.coeffs[k * dg:(k + 1) * dg]
            if any(v):
                out.append(v)
    return out


def berger_check(k_basis: Sequence[CurvatureElem]) -> Tuple[int, bool]:
    """(dim span of all curvature values, True iff that span is a proper subspace of g)."""
    if not k_basis:
        return 0, True
    dg = get_rep(k_basis[0].spec).dim_g
    vals = curvature_values(k_basis)
    d = xl.rank(vals) if vals else 0
    return d, d < dg


def full_curvature_check(r: CurvatureElem) -> bool:
    d, proper = berger_check([r])
    return not proper


def random_full_element(spec: RepSpec, rng) -> AlgElem:
    """Random rational element of sl(2) + so(n) with both parts nonzero.

    ``rng`` is a numpy Generator; coefficients are small fractions (Gaussian
    rationals over C) and the center coefficient, if any, is zero.
    """
    rep = get_rep(spec)

    def draw():
        return Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5)))

    while True:
        coeffs = []
        for k in range(rep.dim_g):
            if k == rep.center_index:
                coeffs.append(ZERO)
            elif spec.is_complex:
                coeffs.append(xl.to_scalar(xl.GaussianRational(draw(), draw())))
            else:
                coeffs.append(draw())
        a = rep.alg(coeffs)
        if not rep.sl2_part(a).is_zero() and not rep.so_part(a).is_zero():
            return a
