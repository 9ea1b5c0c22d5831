"""The perturbed Lie-Poisson structure on W* = g* + V*.

Phase coordinates: the first ``dim_g`` variables are ``a_k = p(g_k)``, the
remaining ``dim_V`` are ``b_i = p(u_i)``.  The bivector is

    Pi(a_k, a_l) = a([g_k, g_l])
    Pi(a_k, b_j) = b(g_k . u_j)
    Pi(b_i, b_j) = phi(a)(u_i, u_j)

with ``phi(a) = phi2(a, a) + c * sigma``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import exact_linalg as xl
from .curvature import JetElem, in_K, j2_generator, pair_index
from .polynomial import PolyFn
from .rep_core import ZERO, RepSpec, get_rep

#: relative singular-value threshold for floating bivector ranks
RANK_RTOL = 1e-9
#: default number of random rational points in a generic-rank scan
DEFAULT_RANK_POINTS = 64


def dim_W(spec: RepSpec) -> int:
    rep = get_rep(spec)
    return rep.dim_g + rep.dim_V


def coord_labels(spec: RepSpec) -> List[str]:
    rep = get_rep(spec)
    return [f"a[{s}]" for s in rep.g_labels] + [f"b[{s}]" for s in rep.v_labels]


def _jet_tensor(jet: JetElem) -> list:
    """Nested T[a][b][i][j], antisymmetric in (i, j)."""
    rep = get_rep(jet.spec)
    dg, dv = rep.dim_g, rep.dim_V
    pairs, _ = pair_index(dv)
    np_ = len(pairs)
    T = [[[[ZERO] * dv for _ in range(dv)] for _ in range(dg)] for _ in range(dg)]
    for a in range(dg):
        for b in range(dg):
            base = (a * dg + b) * np_
            for k, (i, j) in enumerate(pairs):
                x = jet.coeffs[base + k]
                if x:
                    T[a][b][i][j] = x
                    T[a][b][j][i] = -x
    return T


# ---------------------------------------------------------------------------
# admissible maps


@dataclass(frozen=True)
class AdmissibleMap:
    """phi = (quadratic part from ``jet``) + c * sigma."""

    spec: RepSpec
    jet: Optional[JetElem]
    c: object = ZERO
    label: str = "phi2 + c*sigma"

    @cached_property
    def tensor(self) -> list:
        rep = get_rep(self.spec)
        if self.jet is None:
            dg, dv = rep.dim_g, rep.dim_V
            return [[[[ZERO] * dv for _ in range(dv)] for _ in range(dg)] for _ in range(dg)]
        return _jet_tensor(self.jet)

    @cached_property
    def tensor_float(self) -> np.ndarray:
        f = np.vectorize(float, otypes=[float])
        arr = f(np.array(self.tensor, dtype=object))
        arr.setflags(write=False)
        return arr

    @cached_property
    def polys(self) -> Dict[Tuple[int, int], PolyFn]:
        """phi(a)(u_i, u_j) for i < j as polynomials on W*."""
        rep = get_rep(self.spec)
        dg, dv = rep.dim_g, rep.dim_V
        nw = dg + dv
        T = self.tensor
        S = rep.gram_sigma
        out = {}
        for i, j in combinations(range(dv), 2):
            terms = {}
            for a in range(dg):
                for b in range(a, dg):
                    x = T[a][b][i][j] if a == b else T[a][b][i][j] + T[b][a][i][j]
                    if x:
                        terms[(a, b)] = x
            if self.c and S[i][j]:
                terms[()] = self.c * S[i][j]
            out[(i, j)] = PolyFn(nw, terms)
        return out

    def poly(self, i: int, j: int) -> PolyFn:
        if i < j:
            return self.polys[(i, j)]
        if i > j:
            return -self.polys[(j, i)]
        return PolyFn.zero(dim_W(self.spec))

    def evaluate(self, a: Sequence) -> List[List]:
        """Exact 2-form phi(a) as a skew dim_V x dim_V matrix."""
        rep = get_rep(self.spec)
        dv, dg = rep.dim_V, rep.dim_g
        point = list(a) + [ZERO] * dv
        if len(a) != dg:
            raise ValueError(f"expected {dg} a-coordinates")
        m = [[ZERO] * dv for _ in range(dv)]
        for (i, j), p in self.polys.items():
            v = p(point)
            m[i][j] = v
            m[j][i] = -v
        return m

    def evaluate_float(self, a: np.ndarray) -> np.ndarray:
        sig = get_rep(self.spec).float_arrays()["sigma"]
        return np.einsum("abij,a,b->ij", self.tensor_float, a, a) + float(self.c) * sig

    def d_float(self, a: np.ndarray) -> np.ndarray:
        """dphi(a): array D[k, i, j] = d phi(a)(u_i, u_j) / d a_k."""
        T = self.tensor_float
        return np.einsum("kbij,b->kij", T, a) + np.einsum("bkij,b->kij", T, a)


def exact_scalar(c):
    # floats are taken at their exact binary value
    return Fraction(c) if isinstance(c, float) else xl.to_scalar(c)


def make_phi(spec: RepSpec, c=0) -> AdmissibleMap:
    """phi2 + c * sigma, with the jet generator of the representation."""
    return AdmissibleMap(spec, j2_generator(spec), exact_scalar(c))


def sigma_only(spec: RepSpec, c=1) -> AdmissibleMap:
    return AdmissibleMap(spec, None, exact_scalar(c), label="c*sigma")


def random_quadratic_map(spec: RepSpec, seed: int = 0, c=0) -> AdmissibleMap:
    """A random symmetric quadratic map g* -> Lambda^2 V* (negative control)."""
    rep = get_rep(spec)
    dg = rep.dim_g
    pairs, _ = pair_index(rep.dim_V)
    np_ = len(pairs)
    rng = np.random.default_rng(seed)
    coeffs = [ZERO] * (dg * dg * np_)
    for a in range(dg):
        for b in range(a, dg):
            for k in range(np_):
                x = Fraction(int(rng.integers(-3, 4)))
                coeffs[(a * dg + b) * np_ + k] = x
                coeffs[(b * dg + a) * np_ + k] = x
    return AdmissibleMap(spec, JetElem(spec, tuple(coeffs)), exact_scalar(c), label="random quadratic")


@dataclass(frozen=True)
class AdmissibilityReport:
    equivariant: bool
    dphi_in_K: bool
    failures: Tuple[dict, ...] = ()

    @property
    def passed(self) -> bool:
        return self.equivariant and self.dphi_in_K


def _coadjoint(spec: RepSpec, c: int) -> List[PolyFn]:
    """Components of g_c . p on the a-coordinates: -p([g_c, g_k])."""
    rep = get_rep(spec)
    dg = rep.dim_g
    nw = dim_W(spec)
    return [PolyFn.linear(nw, [-x for x in rep.struct[c][k]]) for k in range(dg)]


def _equivariance_failure(phi: AdmissibleMap, labels) -> Optional[dict]:
    spec = phi.spec
    rep = get_rep(spec)
    dg, dv = rep.dim_g, rep.dim_V
    for c in range(dg):
        co = _coadjoint(spec, c)
        A = rep.act_mats[c]
        for i, j in combinations(range(dv), 2):
            lhs = PolyFn.zero(dg + dv)
            p = phi.poly(i, j)
            for k in range(dg):
                dk = p.diff(k)
                if not dk.is_zero():
                    lhs = lhs + dk * co[k]
            rhs = PolyFn.zero(dg + dv)
            for m in range(dv):
                if A[m][i]:
                    rhs = rhs - A[m][i] * phi.poly(m, j)
                if A[m][j]:
                    rhs = rhs - A[m][j] * phi.poly(i, m)
            diff = lhs - rhs
            if not diff.is_zero():
                mono = min(m for m, _ in diff.items())
                return {"condition": "equivariance", "g_index": c, "pair": [i, j],
                        "monomial": "*".join(labels[t] for t in mono) or "1",
                        "coefficient": xl.format_scalar(diff.coeff(mono))}
    return None


def _dphi_failure(phi: AdmissibleMap, labels) -> Optional[dict]:
    # dphi is linear in a, so it suffices to test the coefficient of each a_b
    spec = phi.spec
    rep = get_rep(spec)
    dg = rep.dim_g
    pairs, _ = pair_index(rep.dim_V)
    for b in range(dg):
        vec = [ZERO] * (len(pairs) * dg)
        for k, (i, j) in enumerate(pairs):
            p = phi.poly(i, j)
            for a in range(dg):
                vec[k * dg + a] = p.diff(a).coeff((b,))
        if any(vec) and not in_K(spec, vec):
            return {"condition": "dphi in K", "monomial": labels[b]}
    return None


def admissibility_check(phi: AdmissibleMap) -> AdmissibilityReport:
    """Check equivariance and dphi(p) in K(g) as exact polynomial identities."""
    labels = coord_labels(phi.spec)
    f1 = _equivariance_failure(phi, labels)
    f2 = _dphi_failure(phi, labels)
    return AdmissibilityReport(f1 is None, f2 is None, tuple(f for f in (f1, f2) if f))


# ---------------------------------------------------------------------------
# bracket


class PoissonStructure:
    """Polynomial bivector on W* determined by an admissible map."""

    def __init__(self, phi: AdmissibleMap):
        self.phi = phi
        self.spec = phi.spec
        rep = get_rep(self.spec)
        dg, dv = rep.dim_g, rep.dim_V
        self.dim_g, self.dim_V = dg, dv
        self.n = n = dg + dv
        Pi = [[PolyFn.zero(n) for _ in range(n)] for _ in range(n)]
        for k in range(dg):
            for l in range(k + 1, dg):
                p = PolyFn.linear(n, rep.struct[k][l])
                Pi[k][l], Pi[l][k] = p, -p
            for j in range(dv):
                p = PolyFn.linear(n, [rep.act_mats[k][i][j] for i in range(dv)], offset=dg)
                Pi[k][dg + j], Pi[dg + j][k] = p, -p
        for i in range(dv):
            for j in range(i + 1, dv):
                p = phi.poly(i, j)
                Pi[dg + i][dg + j], Pi[dg + j][dg + i] = p, -p
        self.Pi = Pi

    def coord(self, k: int) -> PolyFn:
        return PolyFn.var(self.n, k)

    def linear_a(self, coeffs: Sequence) -> PolyFn:
        """l_A(p) = p(A) for A with the given coordinates in g."""
        return PolyFn.linear(self.n, coeffs)

    def linear_b(self, coeffs: Sequence) -> PolyFn:
        """l_x(p) = p(x) for x with the given coordinates in V."""
        return PolyFn.linear(self.n, coeffs, offset=self.dim_g)

    def bracket(self, f: PolyFn, g: PolyFn) -> PolyFn:
        df = {k: f.diff(k) for k in f.variables()}
        dg_ = {k: g.diff(k) for k in g.variables()}
        out = PolyFn.zero(self.n)
        for k, fk in df.items():
            for l, gl in dg_.items():
                pi = self.Pi[k][l]
                if not pi.is_zero():
                    out = out + fk * gl * pi
        return out

    def jacobiator(self, f: PolyFn, g: PolyFn, h: PolyFn) -> PolyFn:
        return (self.bracket(f, self.bracket(g, h)) + self.bracket(g, self.bracket(h, f))
                + self.bracket(h, self.bracket(f, g)))

    @cached_property
    def _dPi(self):
        return [[{m: self.Pi[j][k].diff(m) for m in self.Pi[j][k].variables()}
                 for k in range(self.n)] for j in range(self.n)]

    def coordinate_jacobiator(self, i: int, j: int, k: int) -> PolyFn:
        """Jacobiator of the coordinate functions z_i, z_j, z_k."""
        out = PolyFn.zero(self.n)
        for x, y, z in ((i, j, k), (j, k, i), (k, i, j)):
            for m, d in self._dPi[y][z].items():
                pi = self.Pi[x][m]
                if not pi.is_zero():
                    out = out + pi * d
        return out

    def jacobi_scan(self, stop_at_first: bool = False) -> dict:
        """Jacobiator over all coordinate triples; reports the nonzero ones."""
        bad = []
        total = 0
        for t in combinations(range(self.n), 3):
            total += 1
            J = self.coordinate_jacobiator(*t)
            if not J.is_zero():
                bad.append(t)
                if stop_at_first:
                    break
        return {"triples": total, "nonzero": len(bad), "witnesses": bad[:5]}

    # pointwise bivector
    def bivector_at(self, p: Sequence) -> List[List]:
        return [[self.Pi[k][l](p) for l in range(self.n)] for k in range(self.n)]

    def rank_at(self, p: Sequence) -> int:
        return xl.rank(self.bivector_at(p))


def bivector_float(phi: AdmissibleMap, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pi at (a, b) as a dense float (or complex) matrix."""
    rep = get_rep(phi.spec)
    arr = rep.float_arrays()
    dg, dv = rep.dim_g, rep.dim_V
    dtype = np.result_type(a, b, float)
    out = np.zeros((dg + dv, dg + dv), dtype=dtype)
    out[:dg, :dg] = np.einsum("klm,m->kl", arr["struct"], a)
    ab = np.einsum("kij,i->kj", arr["act"], b)
    out[:dg, dg:] = ab
    out[dg:, :dg] = -ab.T
    out[dg:, dg:] = phi.evaluate_float(a)
    return out


def float_rank(m: np.ndarray, rtol: float = RANK_RTOL) -> int:
    scale = np.max(np.abs(m)) if m.size else 0.0
    if scale == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > rtol * scale))


def rank_float(phi: AdmissibleMap, a: np.ndarray, b: np.ndarray) -> int:
    return float_rank(bivector_float(phi, a, b))


# ---------------------------------------------------------------------------
# symmetry dimension


def symmetry_dimension(spec: RepSpec, k: int) -> int:
    """dim of the infinitesimal symmetry algebra at half-rank k."""
    n = dim_W(spec)
    if k < 0 or 2 * k > n:
        raise ValueError(f"half-rank {k} incompatible with dim W* = {n}")
    return n - 2 * k


def random_rational_point(spec: RepSpec, rng: np.random.Generator) -> List[Fraction]:
    return [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6))) for _ in range(dim_W(spec))]


@dataclass(frozen=True)
class RankScan:
    spec: RepSpec
    c: object
    points: int
    seed: int
    ranks: Tuple[int, ...]
    half_rank: int
    symmetry_dim: int

    def as_dict(self) -> dict:
        return {"spec": self.spec.as_dict(), "c": xl.format_scalar(self.c), "points": self.points,
                "seed": self.seed, "dim_W": dim_W(self.spec), "max_rank": 2 * self.half_rank,
                "half_rank": self.half_rank, "symmetry_dim": self.symmetry_dim,
                "rank_histogram": {str(r): self.ranks.count(r) for r in sorted(set(self.ranks))}}


def generic_rank_scan(spec: RepSpec, c=1, points: int = DEFAULT_RANK_POINTS, seed: int = 0) -> RankScan:
    """Maximum exact bivector rank over random rational points."""
    ps = PoissonStructure(make_phi(spec, c))
    rng = np.random.default_rng(seed)
    ranks = tuple(ps.rank_at(random_rational_point(spec, rng)) for _ in range(points))
    k = max(ranks) // 2
    return RankScan(spec, exact_scalar(c), points, seed, ranks, k, symmetry_dimension(spec, k))


# ---------------------------------------------------------------------------
# the bilinear-form lemma


@dataclass(frozen=True)
class LemmaRepsResult:
    spec: RepSpec
    basis: Tuple[Tuple[Tuple, ...], ...]
    antisymmetric: bool
    spanned_by_sigma: bool

    @property
    def dim(self) -> int:
        return len(self.basis)


@lru_cache(maxsize=None)
def lemma_reps_solution_space(spec: RepSpec) -> LemmaRepsResult:
    """All tau in V* (x) V* with tau(x, a.y) = tau(y, a.x) for basis a, x, y."""
    rep = get_rep(spec)
    dg, dv = rep.dim_g, rep.dim_V
    rows = []
    for c in range(dg):
        A = rep.act_mats[c]
        for k in range(dv):
            for l in range(dv):
                row = {}
                for m in range(dv):
                    if A[m][l]:
                        row[k * dv + m] = row.get(k * dv + m, 0) + A[m][l]
                    if A[m][k]:
                        row[l * dv + m] = row.get(l * dv + m, 0) - A[m][k]
                row = {i: x for i, x in row.items() if x}
                if row:
                    rows.append(row)
    sols = xl.nullspace((rows, dv * dv), as_dense=True)
    basis = tuple(tuple(tuple(v[i * dv:(i + 1) * dv]) for i in range(dv)) for v in sols)
    anti = all(t[i][j] == -t[j][i] for t in basis for i in range(dv) for j in range(dv))
    sig = [x for row in rep.gram_sigma for x in row]
    spanned = (len(basis) == 1 and any(sig) and xl.span_contains(sols, sig)) or (not basis and not any(sig))
    return LemmaRepsResult(spec, basis, anti, bool(spanned))
