"""Floating-point flows on W*.

Two families of vector fields appear here.

* ``X_x`` (the geodesic flow in reduced form) for a direction ``x`` in V:
  ``a'(B) = b(B.x)`` and ``b'(y) = phi(a)(x, y)``.
* ``eta_w`` (Hamiltonian fields of linear functions) for ``w`` in W = g + V:
  ``eta_w(p) = w . Pi(p)``.  For ``x`` in V, ``eta_x`` differs from ``X_x``
  by the sign of the a-component.

Bracket relations are checked for the ``eta`` fields. Geodesics and the
incompleteness witness use ``X``.  Along ``X`` flows the preserved bivector
rank is that of ``Pi`` at the reflected point ``(-a, b)``.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import exact_linalg as xl
from .integrator import (BLOW_UP, BLOWUP_THRESHOLD, DEFAULT_H0, DEFAULT_RTOL,
                         IntegrationResult, flow_map, integrate, integrate_batch)
from .poisson import AdmissibleMap, bivector_float, float_rank, make_phi
from .rep_core import (TENSOR_COMPLEX, TENSOR_REAL, AlgElem, RepSpec, get_rep)

#: finite-difference step, relative to the state norm
FD_REL_STEP = 1e-4
#: default scan horizon for the scalar ODE
ODE_HORIZON = 50.0
#: SVD threshold for monitored leaf ranks, relative to the largest singular value
LEAF_RANK_RTOL = 1e-12
#: leaf ranks are recorded as -1 above this max-norm (the spectrum spreads as |a|^2)
LEAF_RANK_CAP = 1e3


# ---------------------------------------------------------------------------
# phase points and flow settings


@dataclass(frozen=True)
class PhasePoint:
    a: np.ndarray
    b: np.ndarray

    @classmethod
    def from_vector(cls, spec: RepSpec, z: np.ndarray) -> "PhasePoint":
        dg = get_rep(spec).dim_g
        return cls(np.array(z[:dg]), np.array(z[dg:]))

    def vector(self) -> np.ndarray:
        return np.concatenate([self.a, self.b])

    def norm(self) -> float:
        return float(np.max(np.abs(self.vector())))

    def escaped(self, threshold: float = BLOWUP_THRESHOLD) -> bool:
        return not np.all(np.isfinite(self.vector())) or self.norm() > threshold


@dataclass(frozen=True)
class FlowSpec:
    spec: RepSpec
    x: np.ndarray
    c: float = 1.0
    h0: float = DEFAULT_H0
    rtol: float = DEFAULT_RTOL
    t_max: float = 1.0
    blowup: float = BLOWUP_THRESHOLD

    def __post_init__(self):
        if self.rtol <= 0 or self.blowup <= 0 or self.h0 <= 0:
            raise ValueError("tolerance, initial step and threshold must be positive")
        if len(self.x) != get_rep(self.spec).dim_V:
            raise ValueError("direction has the wrong dimension")


@dataclass
class Trajectory:
    spec: RepSpec
    times: np.ndarray
    states: np.ndarray
    steps: np.ndarray
    reason: str
    monitored: Dict[str, np.ndarray] = field(default_factory=dict)
    blowup_bracket: Optional[tuple] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if len(self.times) > 1 and not np.all(np.diff(np.abs(self.times)) > 0):
            raise ValueError("sample times must be strictly monotone")
        for k, v in self.monitored.items():
            if len(v) != len(self.times):
                raise ValueError(f"monitored series {k!r} has the wrong length")

    def __len__(self):
        return len(self.times)

    def point(self, i: int) -> PhasePoint:
        return PhasePoint.from_vector(self.spec, self.states[i])

    @property
    def blowup_time(self) -> Optional[float]:
        return float(self.times[-1]) if self.reason == BLOW_UP else None


# ---------------------------------------------------------------------------
# vector fields


class FlowModel:
    """Float arrays for the vector fields of one admissible map."""

    def __init__(self, phi: AdmissibleMap):
        self.phi = phi
        self.spec = phi.spec
        rep = get_rep(self.spec)
        arr = rep.float_arrays()
        self.dim_g, self.dim_V = rep.dim_g, rep.dim_V
        self.act = arr["act"]
        self.B_inv = arr["B_inv"]
        self.T = phi.tensor_float
        self.sigma = arr["sigma"]
        self.c = complex(phi.c) if self.spec.is_complex else float(phi.c)

    def split(self, z):
        return z[:self.dim_g], z[self.dim_g:]

    def phi_at(self, a):
        return np.einsum("abij,a,b->ij", self.T, a, a) + self.c * self.sigma

    def X(self, z, x):
        """Reduced geodesic field X_x."""
        a, b = self.split(z)
        adot = np.einsum("kij,i,j->k", self.act, b, x)
        bdot = x @ self.phi_at(a)
        return np.concatenate([adot, bdot])

    def eta(self, z, w):
        """Hamiltonian field of the linear function w in W."""
        a, b = self.split(z)
        return w @ bivector_float(self.phi, a, b)

    def eta_V(self, z, x):
        return self.eta(z, np.concatenate([np.zeros(self.dim_g, dtype=np.result_type(x, float)), x]))

    def dPhi(self, z, x, y):
        """dPhi(p)(x, y) as a vector in g (coordinates against the g basis)."""
        a, _ = self.split(z)
        D = self.phi.d_float(a)
        return np.einsum("kij,i,j->k", D, x, y)

    def rank(self, z) -> int:
        a, b = self.split(z)
        return float_rank(bivector_float(self.phi, a, b))

    def leaf_rank(self, z) -> int:
        """Bivector rank preserved by the X flows (evaluated at (-a, b))."""
        a, b = self.split(z)
        return float_rank(bivector_float(self.phi, -a, b), LEAF_RANK_RTOL)


def geodesic_rhs(p: PhasePoint, x: Sequence, phi: AdmissibleMap) -> PhasePoint:
    model = FlowModel(phi)
    return PhasePoint.from_vector(phi.spec, model.X(p.vector(), np.asarray(x)))


def _dtype(spec: RepSpec):
    return complex if spec.is_complex else float


def integrate_flow(p0: PhasePoint, fs: FlowSpec, monitor_rank: bool = True,
                   seed: Optional[int] = None, direction: float = 1.0) -> Trajectory:
    """Integrate X_x from p0 for time ``direction * fs.t_max``."""
    phi = make_phi(fs.spec, fs.c) if not isinstance(fs.c, AdmissibleMap) else fs.c
    model = FlowModel(phi)
    x = np.asarray(fs.x, dtype=_dtype(fs.spec))
    res = integrate(lambda t, z: model.X(z, x), p0.vector().astype(_dtype(fs.spec)),
                    direction * fs.t_max, rtol=fs.rtol, h0=fs.h0, blowup=fs.blowup)
    mon = {"max_norm": np.max(np.abs(res.states), axis=1)}
    if monitor_rank:
        mon["leaf_rank"] = np.array([model.leaf_rank(z) if np.max(np.abs(z)) <= LEAF_RANK_CAP else -1
                                     for z in res.states])
    return Trajectory(fs.spec, res.times, res.states, res.steps, res.reason, mon,
                      res.blowup_bracket, seed)


# ---------------------------------------------------------------------------
# commutator defect


@dataclass(frozen=True)
class DefectResult:
    defect: np.ndarray
    reference: np.ndarray


def commutator_defect(p: PhasePoint, x, y, s: float, phi: AdmissibleMap,
                      rtol: float = 1e-13) -> DefectResult:
    """(Fl^y_{-s} Fl^x_{-s} Fl^y_s Fl^x_s)(p) - p for the eta fields, and s^2 eta_{dPhi(p)(x,y)}(p)."""
    if s <= 0:
        raise ValueError("s must be positive")
    model = FlowModel(phi)
    dt = _dtype(phi.spec)
    x = np.asarray(x, dtype=dt)
    y = np.asarray(y, dtype=dt)
    z0 = p.vector().astype(dt)
    fx = lambda t, z: model.eta_V(z, x)
    fy = lambda t, z: model.eta_V(z, y)
    kw = dict(rtol=rtol, h0=s / 4)
    try:
        z = flow_map(fx, z0, s, **kw)
        z = flow_map(fy, z, s, **kw)
        z = flow_map(fx, z, -s, **kw)
        z = flow_map(fy, z, -s, **kw)
    except FloatingPointError as exc:
        raise FloatingPointError(f"blow-up during composed flows: {exc}") from exc
    w = np.concatenate([model.dPhi(z0, x, y), np.zeros(model.dim_V, dtype=dt)])
    return DefectResult(z - z0, s * s * model.eta(z0, w))


@dataclass(frozen=True)
class CommutatorCheck:
    extrapolated: np.ndarray
    reference: np.ndarray
    rel_error: float
    ratios: Tuple[float, ...]


def commutator_check(p: PhasePoint, x, y, phi: AdmissibleMap,
                     steps: Sequence[float] = (1e-2, 5e-3, 2.5e-3, 1.25e-3)) -> CommutatorCheck:
    """Richardson-extrapolated defect / s^2 against eta_{dPhi(p)(x,y)}(p)."""
    quotients = []
    ref = None
    for s in steps:
        r = commutator_defect(p, x, y, s, phi)
        quotients.append(r.defect / (s * s))
        ref = r.reference / (s * s)
    # successive halving removes the O(s), O(s^2), O(s^3) terms in turn
    level = list(quotients)
    order = 1
    while len(level) > 1:
        f = 2.0 ** order
        level = [(f * level[i + 1] - level[i]) / (f - 1) for i in range(len(level) - 1)]
        order += 1
    ext = level[0]
    scale = max(float(np.linalg.norm(ref)), 1e-300)
    ratios = tuple(float(np.linalg.norm(q) / scale) for q in quotients)
    return CommutatorCheck(ext, ref, float(np.linalg.norm(ext - ref)) / scale, ratios)


# ---------------------------------------------------------------------------
# incompleteness witness


@dataclass(frozen=True)
class WitnessFrame:
    spec: RepSpec
    e1: tuple
    e2: tuple
    xs: Tuple[tuple, ...]        # x_1 ... x_{n-2}
    y: tuple
    z: tuple
    A0: AlgElem
    M0: AlgElem
    c1: float = 1.0
    c2: float = 1.0

    def conditions(self) -> Dict[str, bool]:
        rep = get_rep(self.spec)
        ip = rep.inner
        from .rep_core import area
        out = {}
        eps = [ip(xi, xi) for xi in self.xs]
        out["orthonormal_x"] = (all(ip(xi, xj) == 0 for i, xi in enumerate(self.xs)
                                    for j, xj in enumerate(self.xs) if i != j)
                                and all(e in (1, -1) for e in eps))
        out["eps1_positive"] = bool(eps) and eps[0] == 1
        out["x_perp_yz"] = all(ip(xi, self.y) == 0 and ip(xi, self.z) == 0 for xi in self.xs)
        out["y_null"] = ip(self.y, self.y) == 0
        out["z_null"] = ip(self.z, self.z) == 0
        out["yz_one"] = ip(self.y, self.z) == 1
        out["area_one"] = area(self.e1, self.e2) == 1
        out["c_nonzero"] = self.c1 != 0 and self.c2 != 0
        return out

    def with_constants(self, c1: float, c2: float) -> "WitnessFrame":
        return WitnessFrame(self.spec, self.e1, self.e2, self.xs, self.y, self.z,
                            self.A0, self.M0, c1, c2)


def build_witness_frame(spec: RepSpec) -> WitnessFrame:
    """Null frame for an indefinite real metric or a complex one."""
    if spec.family == TENSOR_REAL:
        p, q = spec.p, spec.q
        if p + q < 3:
            raise ValueError("the witness needs n = p + q >= 3")
        if p == 0 or q == 0:
            raise ValueError(f"definite signature ({p},{q}) has no null vectors")
        if p < 2:
            raise ValueError(f"signature ({p},{q}) leaves no positive vector besides the null pair; "
                             f"use the negated metric ({q},{p})")
        n = p + q
        iu, iv = p - 1, p
        unit = lambda k: tuple(xl.to_scalar(1 if i == k else 0) for i in range(n))
        u, v = unit(iu), unit(iv)
        y = tuple(s + t for s, t in zip(u, v))
        z = tuple((s - t) / 2 for s, t in zip(u, v))
        xs = tuple(unit(k) for k in range(n) if k not in (iu, iv))
    elif spec.family == TENSOR_COMPLEX:
        n = spec.n
        if n < 3:
            raise ValueError("the witness needs n >= 3")
        I = xl.I
        unit = lambda k: tuple(xl.to_scalar(1 if i == k else 0) for i in range(n))
        u, v = unit(n - 2), unit(n - 1)
        y = tuple(xl.to_scalar(s + I * t) for s, t in zip(u, v))
        z = tuple(xl.to_scalar((s - I * t) / 2) for s, t in zip(u, v))
        xs = tuple(unit(k) for k in range(n - 2))
    else:
        raise ValueError(f"no witness frame for {spec.label}")
    if spec.center:
        raise ValueError("the witness frame is defined without the center")
    rep = get_rep(spec)
    e1 = (xl.to_scalar(1), xl.to_scalar(0))
    e2 = (xl.to_scalar(0), xl.to_scalar(1))
    A0 = -1 * rep.sym2(e1, e1)
    M0 = 2 * rep.wedge(y, xs[0])
    frame = WitnessFrame(spec, e1, e2, xs, y, z, A0, M0)
    bad = [k for k, ok in frame.conditions().items() if not ok]
    if bad:
        raise ArithmeticError(f"frame conditions failed: {bad}")
    return frame


def _as_np(vals, dtype):
    return np.array([complex(v) if dtype is complex else float(v) for v in vals], dtype=dtype)


class WitnessFunctions:
    """The linear functions f1, f2, g and the flows xi_1, xi_2 of a frame."""

    def __init__(self, frame: WitnessFrame, phi: AdmissibleMap):
        self.frame = frame
        self.model = FlowModel(phi)
        spec = frame.spec
        rep = get_rep(spec)
        dt = self.dtype = _dtype(spec)
        dg, dv = rep.dim_g, rep.dim_V
        zeros_b = np.zeros(dv, dtype=dt)
        self.ell_f1 = np.concatenate([_as_np(frame.A0.coeffs, dt), zeros_b])
        self.ell_f2 = np.concatenate([_as_np(frame.M0.coeffs, dt), zeros_b])
        e1y = _as_np(rep.tensor(frame.e1, frame.y).coeffs, dt)
        self.ell_g = np.concatenate([np.zeros(dg, dtype=dt), -2 * e1y])
        self.x1 = _as_np(rep.tensor(frame.e1, frame.xs[0]).coeffs, dt)
        self.x2 = _as_np(rep.tensor(frame.e2, frame.y).coeffs, dt)
        self.y_vec = _as_np(frame.y, dt)
        self.eps = np.array([float(e) for e in rep.metric.eps])
        so = []
        for k, ge in enumerate(rep.g_basis()):
            m = rep.so_matrix(ge)
            so.append([[complex(v) if dt is complex else float(v) for v in row] for row in m])
        self.so_mats = np.array(so, dtype=dt)

    def f1(self, z):
        return self.ell_f1 @ z

    def f2(self, z):
        return self.ell_f2 @ z

    def g(self, z):
        return self.ell_g @ z

    def xi(self, z, k: int):
        return self.model.X(z, self.x1 if k == 1 else self.x2)

    def xi2_g(self, z):
        return self.ell_g @ self.xi(z, 2)

    def My_sq(self, z):
        a = z[:self.model.dim_g]
        a_sharp = self.model.B_inv @ a
        M = np.einsum("k,kij->ij", a_sharp, self.so_mats)
        My = M @ self.y_vec
        return np.sum(self.eps * My * My)

    def direction(self, c1, c2):
        return c1 * self.x1 + c2 * self.x2

    def Q(self, z, c1, c2):
        f1, f2 = self.f1(z), self.f2(z)
        return (c1 * f1 - c2 * f2) ** 2 - 3 * c2 ** 2 * (self.xi2_g(z) - f2 ** 2)

    def Q_scale(self, z, c1, c2):
        f1, f2 = self.f1(z), self.f2(z)
        return max(1.0, abs(c1 * f1 - c2 * f2) ** 2, 3 * abs(c2) ** 2 * abs(self.xi2_g(z)),
                   3 * abs(c2) ** 2 * abs(f2) ** 2)

    def f(self, z, c1, c2):
        return c1 ** 2 * self.f1(z) + 2 * c1 * c2 * self.f2(z)


def flow_derivative(F, field_, z, rel_step: float = FD_REL_STEP):
    """Richardson-extrapolated central difference of F along the flow of ``field_``."""
    v = field_(z)
    vn = float(np.max(np.abs(v)))
    if vn == 0:
        return 0.0 * F(z)
    h = rel_step * max(1.0, float(np.max(np.abs(z)))) / vn
    f = lambda t, w: field_(w)

    def central(hh):
        zp = flow_map(f, z, hh, fixed_step=hh)
        zm = flow_map(f, z, -hh, fixed_step=hh)
        return (F(zp) - F(zm)) / (2 * hh)

    return (4 * central(h / 2) - central(h)) / 3


IDENTITY_NAMES = ("xi1(f1)=0", "xi2(f2)=0", "xi1(f2)=g", "xi2(f1)=g", "xi1(g)=2f1f2",
                  "xi2(g)=4(My,My)")


def identity_residuals(wf: WitnessFunctions, z) -> Dict[str, float]:
    """Relative residuals (unit floor) of the six derivative identities at z."""
    x1 = lambda w: wf.xi(w, 1)
    x2 = lambda w: wf.xi(w, 2)
    f1, f2, g = wf.f1(z), wf.f2(z), wf.g(z)
    pairs = [
        (flow_derivative(wf.f1, x1, z), 0.0),
        (flow_derivative(wf.f2, x2, z), 0.0),
        (flow_derivative(wf.f2, x1, z), g),
        (flow_derivative(wf.f1, x2, z), g),
        (flow_derivative(wf.g, x1, z), 2 * f1 * f2),
        (flow_derivative(wf.g, x2, z), 4 * wf.My_sq(z)),
    ]
    return {name: float(abs(lhs - rhs) / max(1.0, abs(rhs)))
            for name, (lhs, rhs) in zip(IDENTITY_NAMES, pairs)}


def arranged_initial_point(spec: RepSpec, frame: WitnessFrame, seed: int = 0,
                           c: float = 1.0, max_tries: int = 1000) -> Tuple[PhasePoint, float, float]:
    """Random p0 meeting the standing assumptions, arranged so the solution blows up.

    Returns (p0, c1, c2) with f1(p0) > 0, g(p0) != 0, f, f'' >= 0 at p0 and, in the
    complex model, f1, f2, g real so that f stays real along the flow.
    """
    rng = np.random.default_rng(seed)
    wf = WitnessFunctions(frame, make_phi(spec, c))
    dg, dv = wf.model.dim_g, wf.model.dim_V
    N = dg + dv
    for _ in range(max_tries):
        if spec.is_complex:
            z = rng.normal(size=N) + 1j * rng.normal(size=N)
            # project onto Im f1 = Im f2 = Im g = 0 (real-linear conditions)
            L = np.array([np.concatenate([ell.imag, ell.real]) for ell in (wf.ell_f1, wf.ell_f2, wf.ell_g)])
            zr = np.concatenate([z.real, z.imag])
            zr = zr - L.T @ np.linalg.solve(L @ L.T, L @ zr)
            z = zr[:N] + 1j * zr[N:]
        else:
            z = rng.normal(size=N)
        if wf.f1(z).real < 0:
            z[:dg] = -z[:dg]
        f1, f2, g = wf.f1(z), wf.f2(z), wf.g(z)
        h = wf.xi2_g(z)
        a_sharp = wf.model.B_inv @ z[:dg]
        M_nonzero = np.max(np.abs(np.einsum("k,kij->ij", a_sharp, wf.so_mats))) > 1e-3
        if spec.is_complex and abs(h.imag) > 1e-9 * max(1.0, abs(h)):
            continue
        if (f1.real > 0.1 and abs(g) > 0.1 and abs(f2) > 0.1 and h.real >= 0
                and M_nonzero and np.max(np.abs(z[dg:])) > 1e-3):
            c1 = float(np.sign(f2.real))
            return PhasePoint.from_vector(spec, z), c1, 1.0
    raise RuntimeError("could not arrange initial data")


@dataclass
class WitnessReport:
    spec: RepSpec
    c1: float
    c2: float
    identity_residuals: Dict[str, float]
    conserved_drift: float
    ode_residual: float
    C: complex
    f0: complex
    fp0: complex
    fpp0: complex
    blowup_time: Optional[float]
    reason: str
    samples_checked: int
    trajectory: Optional[Trajectory] = None

    def as_dict(self) -> dict:
        def num(v):
            v = complex(v)
            return v.real if abs(v.imag) <= 1e-12 * max(1.0, abs(v)) else [v.real, v.imag]
        return {
            "spec": self.spec.as_dict(), "c1": self.c1, "c2": self.c2,
            "identity_residuals": dict(self.identity_residuals),
            "max_identity_residual": max(self.identity_residuals.values()),
            "conserved_drift": self.conserved_drift, "ode_residual": self.ode_residual,
            "C": num(self.C), "f0": num(self.f0), "fprime0": num(self.fp0), "fsecond0": num(self.fpp0),
            "blow_up_time": self.blowup_time, "termination": self.reason,
            "samples_checked": self.samples_checked,
        }


def incompleteness_witness(spec: RepSpec, p0: PhasePoint, frame: WitnessFrame, c: float = 1.0,
                           t_max: float = 50.0, rtol: float = DEFAULT_RTOL,
                           check_norm: float = 1e3, max_checks: int = 12) -> WitnessReport:
    """Run the witness pipeline along xi = c1 xi_1 + c2 xi_2 from p0."""
    phi = make_phi(spec, c)
    wf = WitnessFunctions(frame, phi)
    c1, c2 = frame.c1, frame.c2
    z0 = p0.vector().astype(wf.dtype)
    dg = wf.model.dim_g
    a_sharp = wf.model.B_inv @ z0[:dg]
    if np.max(np.abs(np.einsum("k,kij->ij", a_sharp, wf.so_mats))) == 0 or not np.any(z0[dg:]):
        raise ValueError("the witness needs M_p0 != 0 and b_p0 != 0")
    x = wf.direction(c1, c2)
    field_ = lambda w: wf.model.X(w, x)
    ell_f = c1 ** 2 * wf.ell_f1 + 2 * c1 * c2 * wf.ell_f2
    fprime = lambda w: ell_f @ field_(w)
    f0 = wf.f(z0, c1, c2)
    fp0 = fprime(z0)
    direction = 1.0 if complex(fp0).real >= 0 else -1.0
    res = integrate(lambda t, w: field_(w), z0, direction * t_max, rtol=rtol)
    Q0 = wf.Q(z0, c1, c2)
    C = -c1 ** 2 * Q0
    drift = max(float(abs(wf.Q(w, c1, c2) - Q0) / wf.Q_scale(w, c1, c2)) for w in res.states)
    # pointwise checks at samples below the norm cap
    norms = np.max(np.abs(res.states), axis=1)
    idx = [i for i in range(len(res.times)) if norms[i] <= check_norm * max(1.0, norms[0])]
    if len(idx) > max_checks:
        idx = [idx[int(round(k))] for k in np.linspace(0, len(idx) - 1, max_checks)]
    ident = {k: 0.0 for k in IDENTITY_NAMES}
    ode_res = 0.0
    fpp0 = None
    for i in idx:
        w = res.states[i]
        for k, v in identity_residuals(wf, w).items():
            ident[k] = max(ident[k], v)
        fpp = flow_derivative(fprime, field_, w)
        fw = wf.f(w, c1, c2)
        if fpp0 is None:
            fpp0 = fpp
        ode_res = max(ode_res, float(abs(fpp - fw ** 2 - C) / max(1.0, abs(fw) ** 2, abs(C))))
    traj = Trajectory(spec, res.times, res.states, res.steps, res.reason,
                      {"max_norm": norms}, res.blowup_bracket)
    return WitnessReport(spec, c1, c2, ident, drift, ode_res, C, f0, fp0, fpp0,
                         res.blowup_time, res.reason, len(idx), traj)


# ---------------------------------------------------------------------------
# the scalar ODE y'' = y^2 + C


def first_integral(y, yp, C):
    return yp ** 2 - (2.0 / 3.0) * y ** 3 - 2 * C * y


def _ode_rhs(C):
    return lambda t, s: np.array([s[1], s[0] ** 2 + C])


@dataclass(frozen=True)
class ODEOutcome:
    C: float
    y0: float
    yp0: float
    forward: str
    backward: str
    forward_time: Optional[float]
    backward_time: Optional[float]
    drift_rate: float

    @property
    def blows_up(self) -> bool:
        return self.forward == BLOW_UP or self.backward == BLOW_UP

    @property
    def in_assertion(self) -> bool:
        return self.y0 > 0 and self.yp0 != 0 and self.y0 ** 2 + self.C >= 0


def _drift_rate(res: IntegrationResult, C: float) -> float:
    y, yp = res.states[:, 0], res.states[:, 1]
    E = first_integral(y, yp, C)
    scale = np.maximum.reduce([np.ones_like(y), yp ** 2, (2.0 / 3.0) * np.abs(y) ** 3, 2 * abs(C) * np.abs(y)])
    per_time = np.abs(E - E[0]) / scale / np.maximum(1.0, np.abs(res.times))
    return float(np.max(per_time))


def ode_outcome(C: float, y0: float, yp0: float, horizon: float = ODE_HORIZON,
                rtol: float = DEFAULT_RTOL) -> ODEOutcome:
    f = _ode_rhs(C)
    fw = integrate(f, [y0, yp0], horizon, rtol=rtol)
    bw = integrate(f, [y0, yp0], -horizon, rtol=rtol)
    return ODEOutcome(C, y0, yp0, fw.reason, bw.reason, fw.blowup_time, bw.blowup_time,
                      max(_drift_rate(fw, C), _drift_rate(bw, C)))


def _scan_direction(C: float, Y0: np.ndarray, t_end: float, rtol: float):
    E0 = first_integral(Y0[:, 0], Y0[:, 1], C)
    worst = np.zeros(len(Y0))

    def monitor(t, Y, mask):
        y, yp = Y[mask, 0], Y[mask, 1]
        with np.errstate(over="ignore", invalid="ignore"):
            E = first_integral(y, yp, C)
            scale = np.maximum.reduce([np.ones_like(y), yp ** 2, (2.0 / 3.0) * np.abs(y) ** 3,
                                       2 * abs(C) * np.abs(y)])
            rate = np.abs(E - E0[mask]) / scale / np.maximum(1.0, np.abs(t[mask]))
        rate = np.where(np.isfinite(rate), rate, 0.0)
        worst[mask] = np.maximum(worst[mask], rate)

    rhs = lambda t, Y: np.stack([Y[:, 1], Y[:, 0] ** 2 + C], axis=1)
    res = integrate_batch(rhs, Y0, t_end, rtol=rtol, monitor=monitor)
    return res, worst


def _scan_one_C(args) -> List[ODEOutcome]:
    C, Y0, horizon, rtol = args
    fw, dfw = _scan_direction(C, Y0, horizon, rtol)
    bw, dbw = _scan_direction(C, Y0, -horizon, rtol)
    return [ODEOutcome(C, float(y0), float(yp0), fw.reasons[i], bw.reasons[i],
                       fw.blowup_time(i), bw.blowup_time(i), float(max(dfw[i], dbw[i])))
            for i, (y0, yp0) in enumerate(Y0)]


def ode_lemma_scan(C: float, y0s: Sequence[float], yp0s: Sequence[float],
                   horizon: float = ODE_HORIZON, rtol: float = DEFAULT_RTOL) -> List[ODEOutcome]:
    """Integrate y'' = y^2 + C forward and backward from every grid point.

    All grid points are advanced together, each with its own adaptive step.
    """
    Y0 = np.array([[y0, yp0] for y0 in y0s for yp0 in yp0s], dtype=float)
    return _scan_one_C((float(C), Y0, horizon, rtol))


def ode_lemma_scan_many(Cs: Sequence[float], y0s, yp0s, horizon: float = ODE_HORIZON,
                        rtol: float = DEFAULT_RTOL, workers: int = 1) -> Dict[float, List[ODEOutcome]]:
    """Scan several values of C, optionally one process per value."""
    Y0 = np.array([[y0, yp0] for y0 in y0s for yp0 in yp0s], dtype=float)
    jobs = [(float(C), Y0, horizon, rtol) for C in Cs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_scan_one_C, jobs))
    else:
        results = [_scan_one_C(j) for j in jobs]
    return dict(zip((float(C) for C in Cs), results))


def default_ode_grid() -> Tuple[np.ndarray, np.ndarray]:
    """21 x 21 grid; the y0' = 0 column is integrated but not asserted on."""
    return np.linspace(0.1, 5.0, 21), np.linspace(-3.0, 3.0, 21)


# ---------------------------------------------------------------------------
# holonomy span


def curvature_span_dim(phi: AdmissibleMap, a: np.ndarray) -> Tuple[int, np.ndarray]:
    """Rank of {phi2'(a)(u_i, u_j)} in g and an orthonormal basis of the span."""
    T = phi.tensor_float
    dv = T.shape[2]
    vals = np.einsum("k,kbij->ijb", a, T)
    iu = np.triu_indices(dv, 1)
    rows = vals[iu]
    return _row_space(rows)


def _row_space(rows: np.ndarray, rtol: float = 1e-9) -> Tuple[int, np.ndarray]:
    if rows.size == 0 or np.max(np.abs(rows)) == 0:
        return 0, np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0))
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    r = int(np.sum(s > rtol * s[0]))
    return r, vh[:r]


def holonomy_span_along(traj: Trajectory, phi: AdmissibleMap) -> Tuple[List[int], List[int]]:
    """Per-sample curvature span dimension and the dimension of the running union."""
    dg = get_rep(traj.spec).dim_g
    per, running = [], []
    basis = np.zeros((0, dg))
    for z in traj.states:
        a = z[:dg]
        r, vh = curvature_span_dim(phi, a)
        per.append(r)
        if r:
            stacked = np.vstack([basis, vh]) if basis.size else vh
            _, basis = _row_space(stacked)
        running.append(basis.shape[0])
    return per, running
