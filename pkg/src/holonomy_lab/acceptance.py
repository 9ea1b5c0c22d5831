"""The acceptance suite: one function per criterion, shared by the CLI and pytest.

Each check returns a :class:`CriterionResult`; ``passed`` includes the
runtime budget where one is stated.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import curvature as cv
from . import dynamics as dyn
from . import exact_linalg as xl
from . import poisson as ps
from .rep_core import RepSpec, get_rep

IDENTITY_TOL = 1e-6
DRIFT_TOL = 1e-6
ODE_RESIDUAL_TOL = 1e-5
ODE_DRIFT_TOL = 1e-8
COMMUTATOR_TOL = 1e-4


def tensor_specs(ns: Sequence[int] = (3, 4, 5)) -> List[RepSpec]:
    """Every real signature with p + q in ``ns``."""
    return [RepSpec.tensor_real(p, n - p) for n in ns for p in range(n, -1, -1)]


def main_specs() -> List[RepSpec]:
    return tensor_specs() + [RepSpec.tensor_complex(3), RepSpec.tensor_complex(4)]


def low_rank_specs() -> List[RepSpec]:
    return [RepSpec.tensor_real(2, 0), RepSpec.tensor_real(1, 1)]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    elapsed: float
    limit: Optional[float] = None
    details: Dict = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        budget = f" / {self.limit:.0f}s" if self.limit else ""
        extra = f" :: {'; '.join(self.failures[:3])}" if self.failures else ""
        return f"[{tag}] {self.number:>2}. {self.title} ({self.elapsed:.1f}s{budget}){extra}"

    def as_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "elapsed_s": round(self.elapsed, 3), "limit_s": self.limit,
                "details": self.details, "failures": self.failures}


def _finish(number, title, t0, failures, details, limit=None) -> CriterionResult:
    elapsed = time.perf_counter() - t0
    if limit is not None and elapsed >= limit:
        failures = failures + [f"runtime {elapsed:.1f}s over budget {limit:.0f}s"]
    return CriterionResult(number, title, not failures, elapsed, limit, details, failures)


# ---------------------------------------------------------------------------


def check_curvature_dims(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    fails, dims = [], {}
    for spec in main_specs():
        dk, dg = len(cv.compute_K(spec)), get_rep(spec).dim_g
        dims[spec.label] = dk
        if dk != dg or dg != 3 + spec.n * (spec.n - 1) // 2:
            fails.append(f"{spec.label}: dim K = {dk}, dim g = {dg}")
    for spec in low_rank_specs():
        dk = len(cv.compute_K(spec))
        dims[spec.label] = dk
        if dk != 9:
            fails.append(f"{spec.label}: dim K = {dk}, expected 9")
    return _finish(1, "dim K = dim g (n = 3,4,5), dim K = 9 (n = 2)", t0, fails, {"dim_K": dims}, 60)


def check_j2(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    fails, dims, info = [], {}, {}
    for spec in main_specs() + [RepSpec.binary_cubic()]:
        res = cv.compute_J2(spec)
        dims[spec.label] = {"dim_J2": len(res.basis), "invariant": res.invariant}
        if len(res.basis) != 1 or not res.invariant:
            fails.append(f"{spec.label}: dim J2 = {len(res.basis)}, invariant = {res.invariant}")
    # n = 2 is outside the classified range; reported only
    for spec in low_rank_specs():
        res = cv.compute_J2(spec)
        info[spec.label] = {"dim_J2": len(res.basis), "invariant": res.invariant}
    return _finish(2, "dim J2 = 1, g acts trivially", t0, fails,
                   {"J2": dims, "n2_informational": info}, 120)


def check_rho(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    fails, consts = [], {}
    for spec in main_specs():
        rep = get_rep(spec)
        kdim = len(cv.compute_K(spec))
        rhos = [cv.rho_elem(a) for a in rep.g_basis()]
        outside = [k for k, r in enumerate(rhos) if not cv.in_K(spec, r.coeffs)]
        r = xl.rank([r.coeffs for r in rhos])
        c = cv.rho_proportionality(spec)
        consts[spec.label] = None if c is None else xl.format_scalar(c)
        if outside:
            fails.append(f"{spec.label}: rho outside K for basis {outside[:3]}")
        if r != kdim:
            fails.append(f"{spec.label}: rank rho = {r}, dim K = {kdim}")
        if c != cv.RHO_PROPORTIONALITY:
            fails.append(f"{spec.label}: phi2' B_flat vs rho constant {c}")
    return _finish(3, "rho spans K and phi2' B_flat = c rho", t0, fails,
                   {"constants": consts, "frozen_constant": xl.format_scalar(cv.RHO_PROPORTIONALITY)})


def check_induced(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    fails, out = [], {}
    for spec in main_specs() + [RepSpec.binary_cubic()]:
        rep = get_rep(spec)
        jet = cv.j2_generator(spec)
        im = cv.induced_maps(jet)
        dk1 = len(cv.compute_K1(spec))
        cols = cv.xl.transpose(im.phi2_dprime)
        bad = [i for i, col in enumerate(cols) if cv.bianchi2_residual(spec, col)]
        out[spec.label] = {"rank_prime": im.rank_prime, "rank_dprime": im.rank_dprime,
                           "dim_K1": dk1, "dim_V": rep.dim_V}
        if not (im.rank_dprime == rep.dim_V == dk1) or bad:
            fails.append(f"{spec.label}: rank phi2'' = {im.rank_dprime}, dim V = {rep.dim_V}, "
                         f"dim K1 = {dk1}, off-K1 columns {bad[:3]}")
        if im.rank_prime != rep.dim_g:
            fails.append(f"{spec.label}: rank phi2' = {im.rank_prime}")
    return _finish(4, "phi2'': V* -> K^1 is a bijection", t0, fails, {"maps": out})


def check_center(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    fails, out = [], {}
    for n in (3, 4):
        spec = RepSpec.tensor_complex(n, center=True)
        rep = get_rep(spec)
        ci = rep.center_index
        kb = cv.compute_K(spec)
        nz = [t for t, r in enumerate(kb)
              if any(r.coeffs[k * rep.dim_g + ci] for k in range(len(r.coeffs) // rep.dim_g))]
        out[spec.label] = {"dim_K": len(kb), "center_nonzero": len(nz)}
        if nz:
            fails.append(f"{spec.label}: center component in K basis {nz[:3]}")
    return _finish(5, "K has no center component", t0, fails, out)


JACOBI_SPECS = (RepSpec.tensor_real(2, 1), RepSpec.tensor_real(3, 0), RepSpec.tensor_real(2, 2),
                RepSpec.binary_cubic())


def check_jacobi(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    fails, out = [], {}
    for spec in JACOBI_SPECS:
        for c in (0, 1, -2):
            scan = ps.PoissonStructure(ps.make_phi(spec, c)).jacobi_scan()
            out[f"{spec.label} c={c}"] = scan["nonzero"]
            if scan["nonzero"]:
                fails.append(f"{spec.label} c={c}: {scan['nonzero']} nonzero triples, e.g. {scan['witnesses'][0]}")
        neg = ps.PoissonStructure(ps.random_quadratic_map(spec, seed)).jacobi_scan(stop_at_first=True)
        out[f"{spec.label} control"] = neg["nonzero"]
        if not neg["nonzero"]:
            fails.append(f"{spec.label}: negative control has zero Jacobiator")
    return _finish(6, "Jacobi identity as a polynomial identity", t0, fails, {"nonzero_triples": out})


def check_berger(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    fails, out = [], {}
    for spec in main_specs() + low_rank_specs() + [RepSpec.binary_cubic()]:
        d, proper = cv.berger_check(cv.compute_K(spec))
        out[spec.label] = d
        if proper:
            fails.append(f"{spec.label}: curvature span {d} < dim g")
    rng = np.random.default_rng(seed)
    full = {}
    for spec in (RepSpec.tensor_real(3, 0), RepSpec.tensor_real(2, 1), RepSpec.tensor_real(2, 2),
                 RepSpec.tensor_complex(3)):
        hits = sum(cv.full_curvature_check(cv.rho_elem(cv.random_full_element(spec, rng))) for _ in range(20))
        full[spec.label] = f"{hits}/20"
        if hits != 20:
            fails.append(f"{spec.label}: full curvature {hits}/20")
    return _finish(7, "Berger's first criterion and full curvature", t0, fails,
                   {"span_dim": out, "full_curvature": full})


def check_lemma_reps(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    fails, out = [], {}
    for spec in (RepSpec.tensor_real(3, 0), RepSpec.tensor_real(2, 1), RepSpec.tensor_real(2, 2),
                 RepSpec.tensor_real(3, 2), RepSpec.tensor_complex(3), RepSpec.tensor_complex(4),
                 RepSpec.binary_cubic()):
        r = ps.lemma_reps_solution_space(spec)
        out[spec.label] = r.dim
        if r.dim != 1 or not r.antisymmetric or not r.spanned_by_sigma:
            fails.append(f"{spec.label}: dim {r.dim}, antisymmetric {r.antisymmetric}")
    ctrl = ps.lemma_reps_solution_space(RepSpec.sym_power(2))
    out["SymPower(2) control"] = ctrl.dim
    if ctrl.dim != 0:
        fails.append(f"even symmetric power: dim {ctrl.dim}")
    return _finish(8, "bilinear-form lemma: solutions = span(sigma)", t0, fails, {"dims": out})


def check_symmetry_dim(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    fails, out = [], {}
    for spec, bound in ((RepSpec.tensor_real(3, 0), 2), (RepSpec.tensor_real(2, 1), 2),
                        (RepSpec.tensor_real(4, 0), 1), (RepSpec.tensor_real(2, 2), 1),
                        (RepSpec.tensor_real(5, 0), 1), (RepSpec.tensor_real(3, 2), 1)):
        scan = ps.generic_rank_scan(spec, c=1, seed=seed)
        out[spec.label] = {"dim_W": ps.dim_W(spec), "half_rank": scan.half_rank,
                           "symmetry_dim": scan.symmetry_dim, "bound": bound}
        if scan.symmetry_dim < bound:
            fails.append(f"{spec.label}: dim s = {scan.symmetry_dim} < {bound}")
    return _finish(9, "symmetry dimension from the generic rank", t0, fails, {"scans": out}, 60)


def check_witness(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    fails, out = [], {}
    for spec in (RepSpec.tensor_real(2, 1), RepSpec.tensor_complex(3)):
        frame = dyn.build_witness_frame(spec)
        p0, c1, c2 = dyn.arranged_initial_point(spec, frame, seed=seed)
        rep = dyn.incompleteness_witness(spec, p0, frame.with_constants(c1, c2))
        d = rep.as_dict()
        out[spec.label] = d
        worst = max(rep.identity_residuals.values())
        if worst >= IDENTITY_TOL:
            fails.append(f"{spec.label}: identity residual {worst:.2e}")
        if rep.conserved_drift >= DRIFT_TOL:
            fails.append(f"{spec.label}: conserved drift {rep.conserved_drift:.2e}")
        if rep.ode_residual >= ODE_RESIDUAL_TOL:
            fails.append(f"{spec.label}: f'' residual {rep.ode_residual:.2e}")
        if rep.blowup_time is None:
            fails.append(f"{spec.label}: no blow-up ({rep.reason})")
    return _finish(10, "incompleteness witness", t0, fails, {"witness": out}, 120)


def check_ode_scan(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    fails, out = [], {}
    y0s, yp0s = dyn.default_ode_grid()
    for C in (-1.0, 0.0, 1.0):
        rows = dyn.ode_lemma_scan(C, y0s, yp0s)
        asserted = [r for r in rows if r.in_assertion]
        missing = [(r.y0, r.yp0) for r in asserted if not r.blows_up]
        drift = max(r.drift_rate for r in rows)
        out[str(C)] = {"grid": len(rows), "asserted": len(asserted), "no_blowup": len(missing),
                       "max_drift_rate": drift}
        if missing:
            fails.append(f"C={C}: {len(missing)} asserted points without blow-up, e.g. {missing[0]}")
        if drift >= ODE_DRIFT_TOL:
            fails.append(f"C={C}: first-integral drift {drift:.2e} per unit time")
    return _finish(11, "ODE lemma scan", t0, fails, {"scan": out}, 60)


def check_commutator(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    fails, errs = [], []
    spec = RepSpec.tensor_real(2, 1)
    phi = ps.make_phi(spec, 1)
    rep = get_rep(spec)
    rng = np.random.default_rng(seed)
    for k in range(10):
        z = rng.normal(size=rep.dim_g + rep.dim_V)
        x, y = rng.normal(size=rep.dim_V), rng.normal(size=rep.dim_V)
        r = dyn.commutator_check(dyn.PhasePoint.from_vector(spec, z), x, y, phi)
        errs.append(r.rel_error)
        if r.rel_error >= COMMUTATOR_TOL:
            fails.append(f"configuration {k}: relative error {r.rel_error:.2e}")
    return _finish(12, "flow commutator matches eta_{dPhi(x,y)}", t0, fails,
                   {"rel_errors": errs, "max_rel_error": max(errs)}, 30)


CRITERIA: Dict[int, Callable[[int], CriterionResult]] = {
    1: check_curvature_dims,
    2: check_j2,
    3: check_rho,
    4: check_induced,
    5: check_center,
    6: check_jacobi,
    7: check_berger,
    8: check_lemma_reps,
    9: check_symmetry_dim,
    10: check_witness,
    11: check_ode_scan,
    12: check_commutator,
}


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    return CRITERIA[number](seed)


def _run_job(args):
    number, seed = args
    return run_criterion(number, seed)


def run_all(numbers: Optional[Sequence[int]] = None, seed: int = 0, workers: int = 1) -> List[CriterionResult]:
    """Run the selected criteria; with ``workers > 1`` they run in separate processes."""
    numbers = list(numbers or CRITERIA)
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_run_job, [(n, seed) for n in numbers]))
    return [run_criterion(n, seed) for n in numbers]
