"""Command-line entry point: ``holonomy-lab <command> [options]``.

Exit status 0 when every check in the report passes, 1 when one fails and
2 on configuration errors.  A ``--config`` file holds ``key = value`` lines
with the flag names as keys; flags given on the command line win.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import acceptance as acc
from . import curvature as cv
from . import dynamics as dyn
from . import poisson as ps
from .integrator import BLOWUP_THRESHOLD, DEFAULT_H0, DEFAULT_RTOL
from .reports import Report, dumps, emit_report, export_trajectory
from .rep_core import BINARY_CUBIC, RepSpec, get_rep

log = logging.getLogger("holonomy_lab")

COMMANDS = ("dims", "berger", "jacobi", "admissible", "lemma-reps", "rank-scan", "geodesic",
            "witness", "ode-scan", "holonomy", "all")
FAMILIES = ("tensor-real", "tensor-complex", "tensor", "binary-cubic", "sym-power")
SEED_ENV = "HOLONOMY_LAB_SEED"


class ConfigError(ValueError):
    """Invalid or incomplete run configuration (exit status 2)."""


@dataclass
class RunConfig:
    command: str
    family: str = "tensor-real"
    p: Optional[int] = None
    q: Optional[int] = None
    n: Optional[int] = None
    field: str = "R"
    center: bool = False
    degree: Optional[int] = None
    c: float = 1.0
    seed: int = 0
    points: Optional[int] = None
    grid: int = 21
    t_max: Optional[float] = None
    rtol: float = DEFAULT_RTOL
    h0: float = DEFAULT_H0
    blowup: float = BLOWUP_THRESHOLD
    workers: int = 1
    control: bool = False
    criteria: Optional[str] = None
    out: Optional[str] = None
    csv: Optional[str] = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.rtol <= 0 or self.h0 <= 0 or self.blowup <= 0:
            raise ConfigError("rtol, h0 and blowup must be positive")
        if self.t_max is not None and self.t_max <= 0:
            raise ConfigError("t-max must be positive")
        if self.points is not None and self.points < 1:
            raise ConfigError("points must be >= 1")
        if self.grid < 2 or self.workers < 1:
            raise ConfigError("grid must be >= 2 and workers >= 1")
        if self.command not in SPEC_FREE:
            self.rep_spec()
        if self.command == "all":
            self.criteria_list()

    def rep_spec(self) -> RepSpec:
        fam = self.family
        field = self.field.upper()[:1] if self.field else "R"
        if fam == "tensor":
            fam = "tensor-complex" if field == "C" else "tensor-real"
        try:
            if fam == "tensor-real":
                if self.p is None and self.q is None:
                    if self.n is None:
                        raise ConfigError("tensor-real needs --p/--q or --n")
                    return RepSpec.tensor_real(self.n, 0, self.center)
                p, q = self.p or 0, self.q or 0
                if self.n is not None and self.n != p + q:
                    raise ConfigError(f"--n {self.n} disagrees with p + q = {p + q}")
                return RepSpec.tensor_real(p, q, self.center)
            if fam == "tensor-complex":
                n = self.n if self.n is not None else self.p
                if n is None:
                    raise ConfigError("tensor-complex needs --n")
                return RepSpec.tensor_complex(n, self.center)
            if fam == "binary-cubic":
                return RepSpec.binary_cubic(field)
            if fam == "sym-power":
                if self.degree is None:
                    raise ConfigError("sym-power needs --degree")
                return RepSpec.sym_power(self.degree, field)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        raise ConfigError(f"unknown family {self.family!r}")

    def criteria_list(self) -> List[int]:
        if not self.criteria:
            return list(acc.CRITERIA)
        try:
            nums = [int(s) for s in str(self.criteria).replace(",", " ").split()]
        except ValueError as exc:
            raise ConfigError(f"bad criteria list {self.criteria!r}") from exc
        bad = [k for k in nums if k not in acc.CRITERIA]
        if bad:
            raise ConfigError(f"unknown criteria {bad}")
        return nums


# ---------------------------------------------------------------------------
# commands


def _in_classified_range(spec: RepSpec) -> bool:
    return (spec.is_tensor and spec.n >= 3 and not spec.center) or spec.family == BINARY_CUBIC


def cmd_dims(cfg: RunConfig, spec: RepSpec) -> Report:
    rep = get_rep(spec)
    r = Report("dims", spec, seed=cfg.seed)
    kb = cv.compute_K(spec)
    k1 = cv.compute_K1(spec)
    j2 = cv.compute_J2(spec)
    span, proper = cv.berger_check(kb)
    r.results.update(dim_g=rep.dim_g, dim_V=rep.dim_V, dim_K=len(kb), dim_K1=len(k1),
                     dim_J2=len(j2.basis), j2_invariant=j2.invariant,
                     berger_span=span, berger_proper=proper)
    if _in_classified_range(spec):
        r.check("dim K = dim g", len(kb) == rep.dim_g, witness={"dim_K": len(kb)})
        r.check("dim K1 = dim V", len(k1) == rep.dim_V, witness={"dim_K1": len(k1)})
        r.check("dim J2 = 1 and invariant", len(j2.basis) == 1 and j2.invariant,
                witness={"non_invariant_generators": list(j2.residuals)[:5]} if not j2.invariant else None)
    elif spec.is_tensor and spec.n == 2:
        r.check("dim K = 9", len(kb) == 9)
    return r


def cmd_berger(cfg: RunConfig, spec: RepSpec) -> Report:
    r = Report("berger", spec, seed=cfg.seed)
    span, proper = cv.berger_check(cv.compute_K(spec))
    r.results.update(dim_g=get_rep(spec).dim_g, span_dim=span, berger_proper=proper)
    r.check("curvature span = g", not proper, witness=None if not proper else {"span_dim": span})
    if spec.is_tensor:
        rng = np.random.default_rng(cfg.seed)
        k = cfg.points or 20
        misses = [i for i in range(k) if not cv.full_curvature_check(cv.rho_elem(cv.random_full_element(spec, rng)))]
        r.results["full_curvature"] = f"{k - len(misses)}/{k}"
        r.check("rho_a full for random a", not misses, witness={"samples": misses} if misses else None)
    return r


def cmd_jacobi(cfg: RunConfig, spec: RepSpec) -> Report:
    r = Report("jacobi", spec, seed=cfg.seed)
    scan = ps.PoissonStructure(ps.make_phi(spec, cfg.c)).jacobi_scan()
    r.results.update(c=ps.exact_scalar(cfg.c), triples=scan["triples"], nonzero=scan["nonzero"])
    r.check("Jacobiator vanishes", scan["nonzero"] == 0,
            witness={"triples": scan["witnesses"]} if scan["nonzero"] else None)
    if cfg.control:
        ctrl = ps.PoissonStructure(ps.random_quadratic_map(spec, cfg.seed)).jacobi_scan(stop_at_first=True)
        r.results["control_nonzero"] = ctrl["nonzero"]
        r.check("negative control has a nonzero Jacobiator", ctrl["nonzero"] > 0)
    return r


def cmd_admissible(cfg: RunConfig, spec: RepSpec) -> Report:
    r = Report("admissible", spec, seed=cfg.seed)
    rep_ = ps.admissibility_check(ps.make_phi(spec, cfg.c))
    r.results.update(c=ps.exact_scalar(cfg.c), equivariant=rep_.equivariant, dphi_in_K=rep_.dphi_in_K)
    fails = {f["condition"]: f for f in rep_.failures}
    r.check("equivariance", rep_.equivariant, witness=fails.get("equivariance"))
    r.check("dphi in K", rep_.dphi_in_K, witness=fails.get("dphi in K"))
    if cfg.control:
        ctrl = ps.admissibility_check(ps.random_quadratic_map(spec, cfg.seed))
        r.results["control"] = {"equivariant": ctrl.equivariant, "dphi_in_K": ctrl.dphi_in_K}
        r.check("negative control rejected", not ctrl.passed)
    return r


def cmd_lemma_reps(cfg: RunConfig, spec: RepSpec) -> Report:
    r = Report("lemma-reps", spec, seed=cfg.seed)
    res = ps.lemma_reps_solution_space(spec)
    r.results.update(dim=res.dim, antisymmetric=res.antisymmetric, spanned_by_sigma=res.spanned_by_sigma)
    r.check("solutions antisymmetric", res.antisymmetric)
    r.check("solutions = span(sigma)", res.spanned_by_sigma, witness={"dim": res.dim})
    return r


def symmetry_bound(spec: RepSpec) -> Optional[int]:
    if not spec.is_tensor:
        return None
    if spec.n == 3:
        return 2
    if spec.n in (4, 5):
        return 1
    return None


def cmd_rank_scan(cfg: RunConfig, spec: RepSpec) -> Report:
    r = Report("rank-scan", spec, seed=cfg.seed)
    scan = ps.generic_rank_scan(spec, c=ps.exact_scalar(cfg.c), points=cfg.points or ps.DEFAULT_RANK_POINTS,
                                seed=cfg.seed)
    r.results.update(scan.as_dict())
    r.results.pop("spec", None)
    bound = symmetry_bound(spec)
    if bound is not None:
        r.results["symmetry_bound"] = bound
        r.check(f"dim s >= {bound}", scan.symmetry_dim >= bound, witness={"half_rank": scan.half_rank})
    return r


def _random_start(spec: RepSpec, rng: np.random.Generator):
    rep = get_rep(spec)
    z = rng.normal(size=rep.dim_g + rep.dim_V)
    x = rng.normal(size=rep.dim_V)
    if spec.is_complex:
        z = z + 1j * rng.normal(size=z.size)
        x = x + 1j * rng.normal(size=x.size)
    return dyn.PhasePoint.from_vector(spec, z), x


def _geodesic(cfg: RunConfig, spec: RepSpec, t_default: float):
    rng = np.random.default_rng(cfg.seed)
    p0, x = _random_start(spec, rng)
    fs = dyn.FlowSpec(spec, x, cfg.c, cfg.h0, cfg.rtol, cfg.t_max or t_default, cfg.blowup)
    return dyn.integrate_flow(p0, fs, seed=cfg.seed)


def cmd_geodesic(cfg: RunConfig, spec: RepSpec) -> Report:
    r = Report("geodesic", spec, seed=cfg.seed)
    traj = _geodesic(cfg, spec, 1.0)
    ranks = traj.monitored["leaf_rank"]
    seen = sorted({int(k) for k in ranks if k >= 0})
    r.results.update(c=cfg.c, samples=len(traj), termination=traj.reason,
                     blow_up_time=traj.blowup_time, t_final=float(traj.times[-1]),
                     leaf_ranks=seen, max_norm=float(traj.monitored["max_norm"].max()))
    first_change = next((float(traj.times[i]) for i in range(len(ranks))
                         if ranks[i] >= 0 and ranks[i] != seen[0]), None) if seen else None
    r.check("leaf rank constant along the flow", len(seen) == 1,
            witness={"sample_time": first_change} if len(seen) > 1 else None)
    if cfg.csv:
        export_trajectory(traj, cfg.csv)
    return r


def cmd_witness(cfg: RunConfig, spec: RepSpec) -> Report:
    r = Report("witness", spec, seed=cfg.seed)
    try:
        frame = dyn.build_witness_frame(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    p0, c1, c2 = dyn.arranged_initial_point(spec, frame, seed=cfg.seed, c=cfg.c)
    rep_ = dyn.incompleteness_witness(spec, p0, frame.with_constants(c1, c2), c=cfg.c,
                                      t_max=cfg.t_max or 50.0, rtol=cfg.rtol)
    r.results.update(rep_.as_dict())
    r.results.pop("spec", None)
    r.results["frame_conditions"] = frame.conditions()
    worst = max(rep_.identity_residuals, key=rep_.identity_residuals.get)
    r.check("frame conditions", all(frame.conditions().values()))
    r.check("derivative identities", rep_.identity_residuals[worst] < acc.IDENTITY_TOL,
            rep_.identity_residuals[worst], acc.IDENTITY_TOL, witness={"identity": worst})
    r.check("conserved quantity", rep_.conserved_drift < acc.DRIFT_TOL, rep_.conserved_drift, acc.DRIFT_TOL)
    r.check("f'' = f^2 + C", rep_.ode_residual < acc.ODE_RESIDUAL_TOL, rep_.ode_residual, acc.ODE_RESIDUAL_TOL)
    r.check("finite blow-up", rep_.blowup_time is not None, witness={"termination": rep_.reason})
    if cfg.csv and rep_.trajectory is not None:
        rep_.trajectory.seed = cfg.seed
        export_trajectory(rep_.trajectory, cfg.csv)
    return r


def cmd_ode_scan(cfg: RunConfig, spec: Optional[RepSpec]) -> Report:
    r = Report("ode-scan", None, seed=cfg.seed)
    y0s = np.linspace(0.1, 5.0, cfg.grid)
    yp0s = np.linspace(-3.0, 3.0, cfg.grid)
    horizon = cfg.t_max or dyn.ODE_HORIZON
    rows_by_C = dyn.ode_lemma_scan_many((-1.0, 0.0, 1.0), y0s, yp0s, horizon=horizon,
                                        rtol=cfg.rtol, workers=cfg.workers)
    summary = {}
    for C, rows in rows_by_C.items():
        asserted = [o for o in rows if o.in_assertion]
        missing = [[o.y0, o.yp0] for o in asserted if not o.blows_up]
        drift = max(o.drift_rate for o in rows)
        summary[repr(C)] = {"grid": len(rows), "asserted": len(asserted),
                            "blow_up": sum(o.blows_up for o in asserted), "max_drift_rate": drift}
        r.check(f"C={C}: asserted points blow up", not missing,
                witness={"initial_conditions": missing[:5]} if missing else None)
        r.check(f"C={C}: first-integral drift", drift < acc.ODE_DRIFT_TOL, drift, acc.ODE_DRIFT_TOL)
    r.results.update(grid=cfg.grid, horizon=horizon, scan=summary)
    return r


def cmd_holonomy(cfg: RunConfig, spec: RepSpec) -> Report:
    r = Report("holonomy", spec, seed=cfg.seed)
    traj = _geodesic(cfg, spec, 1.0)
    phi = ps.make_phi(spec, cfg.c)
    per, running = dyn.holonomy_span_along(traj, phi)
    dg = get_rep(spec).dim_g
    r.results.update(samples=len(traj), termination=traj.reason, dim_g=dg,
                     per_sample_max=max(per), running_final=running[-1],
                     running=running[:: max(1, len(running) // 50)])
    r.check("running curvature span reaches g", running[-1] == dg, witness={"reached": running[-1]})
    if cfg.csv:
        export_trajectory(traj, cfg.csv)
    return r


def cmd_all(cfg: RunConfig, spec: Optional[RepSpec]) -> Report:
    r = Report("all", None, seed=cfg.seed)
    results = acc.run_all(cfg.criteria_list(), seed=cfg.seed, workers=cfg.workers)
    for res in results:
        print(res.line(), flush=True)
        r.check(f"criterion {res.number}: {res.title}", res.passed,
                witness={"failures": res.failures} if res.failures else None)
        r.results[f"criterion_{res.number:02d}"] = res.details
        r.timing[f"criterion_{res.number:02d}"] = round(res.elapsed, 3)
    return r


HANDLERS: Dict[str, Callable[[RunConfig, Optional[RepSpec]], Report]] = {
    "dims": cmd_dims, "berger": cmd_berger, "jacobi": cmd_jacobi, "admissible": cmd_admissible,
    "lemma-reps": cmd_lemma_reps, "rank-scan": cmd_rank_scan, "geodesic": cmd_geodesic,
    "witness": cmd_witness, "ode-scan": cmd_ode_scan, "holonomy": cmd_holonomy, "all": cmd_all,
}
SPEC_FREE = ("ode-scan", "all")


def run(cfg: RunConfig):
    """Execute one command; returns ``(exit_status, report)``."""
    cfg.validate()
    spec = None if cfg.command in SPEC_FREE else cfg.rep_spec()
    t0 = time.perf_counter()
    report = HANDLERS[cfg.command](cfg, spec)
    report.timing.setdefault("total", round(time.perf_counter() - t0, 3))
    if cfg.out:
        emit_report(report, cfg.out)
    return (0 if report.passed else 1), report


# ---------------------------------------------------------------------------
# argument and config parsing


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _field_types() -> Dict[str, type]:
    hints = {"p": int, "q": int, "n": int, "degree": int, "seed": int, "points": int, "grid": int,
             "workers": int, "c": float, "t_max": float, "rtol": float, "h0": float, "blowup": float,
             "center": bool, "control": bool}
    return {f.name: hints.get(f.name, str) for f in fields(RunConfig) if f.name != "command"}


def _convert(key: str, value: str):
    kind = _field_types()[key]
    if kind is bool:
        v = value.strip().lower()
        if v in _BOOL_TRUE:
            return True
        if v in _BOOL_FALSE:
            return False
        raise ConfigError(f"{key}: expected a boolean, got {value!r}")
    try:
        return kind(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {value!r}") from exc


def read_config(path) -> Dict[str, object]:
    """Parse a flat ``key = value`` file; '#' starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    out = {}
    known = _field_types()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _convert(key, value)
    if not out:
        raise ConfigError(f"config file {path} is empty")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="holonomy-lab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="command")
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("representation")
    g.add_argument("--family", choices=FAMILIES, default=S)
    g.add_argument("--p", type=int, default=S)
    g.add_argument("--q", type=int, default=S)
    g.add_argument("--n", type=int, default=S)
    g.add_argument("--field", choices=("R", "C", "real", "complex"), default=S)
    g.add_argument("--center", action="store_true", default=S, help="include the center of gl(2)")
    g.add_argument("--degree", type=int, default=S, help="degree for sym-power")
    r = common.add_argument_group("run")
    r.add_argument("--c", type=float, default=S, help="coefficient of sigma (default 1)")
    r.add_argument("--seed", type=int, default=S, help=f"RNG seed (fallback: ${SEED_ENV}, then 0)")
    r.add_argument("--points", type=int, default=S, help="sample count for scans")
    r.add_argument("--grid", type=int, default=S, help="ODE scan grid size per axis")
    r.add_argument("--t-max", dest="t_max", type=float, default=S)
    r.add_argument("--rtol", type=float, default=S)
    r.add_argument("--h0", type=float, default=S)
    r.add_argument("--blowup", type=float, default=S)
    r.add_argument("--workers", type=int, default=S)
    r.add_argument("--control", action="store_true", default=S, help="also run the negative control")
    r.add_argument("--criteria", default=S, help="subset for 'all', e.g. 1,2,6")
    o = common.add_argument_group("output")
    o.add_argument("--out", default=S, help="write the JSON report here")
    o.add_argument("--csv", default=S, help="write the trajectory CSV here")
    o.add_argument("--config", default=S, help="key = value file; flags override it")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    args.pop("verbose", None)
    if command is None:
        raise ConfigError("no command given")
    values: Dict[str, object] = {}
    cfg_path = args.pop("config", None)
    if cfg_path is not None:
        values.update(read_config(cfg_path))
    if "field" in args:
        args["field"] = "C" if args["field"] in ("C", "complex") else "R"
    values.update(args)
    if "seed" not in values and os.environ.get(SEED_ENV):
        try:
            values["seed"] = int(os.environ[SEED_ENV])
        except ValueError as exc:
            raise ConfigError(f"${SEED_ENV} is not an integer") from exc
    if values.get("family") == "tensor-complex":
        values.setdefault("field", "C")
    return RunConfig(command=command, **values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO if ("-v" in argv or "--verbose" in argv) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(argv)
        status, report = run(cfg)
    except ConfigError as exc:
        print(f"holonomy-lab: configuration error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:   # argparse
        return 2 if exc.code else 0
    if cfg.out:
        verdict = "pass" if status == 0 else "FAIL"
        print(f"{cfg.command}: {verdict} -> {cfg.out}")
    else:
        sys.stdout.write(dumps(report))
    for c in report.checks:
        if not c.passed:
            log.warning("check failed: %s (%s)", c.name, json.dumps(c.witness, default=str))
    return status


if __name__ == "__main__":
    sys.exit(main())
