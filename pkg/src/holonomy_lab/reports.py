"""Machine-readable reports (JSON, schema v1) and trajectory CSV export.

Exact scalars serialize as ``"num/den"`` strings (``"re|imi"`` over C),
floats through ``repr`` (shortest round-trip), non-finite floats as the
strings ``"inf"``, ``"-inf"`` and ``"nan"``.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from . import __version__
from . import exact_linalg as xl
from .dynamics import Trajectory
from .integrator import BLOW_UP
from .poisson import coord_labels
from .rep_core import RepSpec

SCHEMA_VERSION = 1
#: keys that vary between otherwise identical runs
VOLATILE_KEYS = ("timestamp", "timing")

BASIS_ORDERING = {
    "g": "sl(2) basis e1^2, e1e2, e2^2; then so(n) basis x_i ^ x_j for i < j; then the center",
    "V": "e_a (x) x_i at index a * n + i",
    "W*": "a-coordinates against the g basis, then b-coordinates against the V basis",
}


@dataclass
class Check:
    """One asserted quantity: a residual (float) or an exactness marker."""

    name: str
    passed: bool
    residual: Any = "exact"
    tolerance: Optional[float] = None
    witness: Any = None     # basis indices or sample time naming the failure

    def as_dict(self) -> dict:
        d = {"name": self.name, "passed": self.passed, "residual": self.residual}
        if self.tolerance is not None:
            d["tolerance"] = self.tolerance
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class Report:
    command: str
    spec: Optional[RepSpec]
    results: Dict[str, Any] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    seed: Optional[int] = None
    timing: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, passed: bool, residual: Any = "exact", tolerance=None, witness=None) -> bool:
        # witnesses only attribute failures
        self.checks.append(Check(name, bool(passed), residual, tolerance, None if passed else witness))
        return bool(passed)

    def as_dict(self, timestamp: bool = True) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "spec": self.spec.as_dict() if self.spec is not None else None,
            **self.results,
            "checks": [c.as_dict() for c in self.checks],
            "passed": self.passed,
            "failures": [c.as_dict() for c in self.checks if not c.passed],
            "provenance": {"basis_ordering": BASIS_ORDERING, "seed": self.seed,
                           "version": __version__},
        }
        if self.spec is not None:
            d["provenance"]["coordinates"] = coord_labels(self.spec)
        if timestamp:
            d["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
            if self.timing:
                d["timing"] = dict(self.timing)
        return d


def to_jsonable(obj: Any) -> Any:
    """Recursively convert exact scalars, numpy values and tuples to JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (Fraction, xl.GaussianRational)):
        return xl.format_scalar(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if np.isfinite(x):
            return x
        return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, RepSpec):
        return obj.as_dict()
    return obj


def dumps(report: Report, timestamp: bool = True) -> str:
    return json.dumps(to_jsonable(report.as_dict(timestamp)), sort_keys=True, indent=2) + "\n"


def report_body(text: str) -> str:
    """The deterministic part of a serialized report (volatile keys removed)."""
    d = json.loads(text)
    for k in VOLATILE_KEYS:
        d.pop(k, None)
    return json.dumps(d, sort_keys=True, indent=2)


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_report(report: Report, path) -> Path:
    """Write the report as JSON, atomically (temp file plus rename)."""
    _atomic_write(Path(path), dumps(report))
    return Path(path)


def _columns(traj: Trajectory) -> List[str]:
    names = coord_labels(traj.spec)
    if np.iscomplexobj(traj.states):
        names = [f"{s}.{part}" for s in names for part in ("re", "im")]
    return ["t", *names, *traj.monitored.keys(), "flag"]


def export_trajectory(traj: Trajectory, path) -> Path:
    """CSV with '#' header lines (spec, seed, termination) and one row per sample.

    The last row of a blown-up trajectory carries the flag ``blow-up``.
    """
    lines = [
        f"# spec: {traj.spec.label}",
        f"# seed: {traj.seed}",
        f"# termination: {traj.reason}",
    ]
    if traj.blowup_bracket is not None:
        lo, hi = traj.blowup_bracket
        lines.append(f"# blowup_bracket: {lo!r} {hi!r}")
    complex_states = np.iscomplexobj(traj.states)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_columns(traj))
    n = len(traj.times)
    for i in range(n):
        state = traj.states[i]
        if complex_states:
            vals = [v for z in state for v in (z.real, z.imag)]
        else:
            vals = list(state)
        mon = [traj.monitored[k][i] for k in traj.monitored]
        flag = traj.reason if (i == n - 1 and traj.reason == BLOW_UP) else ""
        w.writerow([repr(float(traj.times[i])), *(repr(float(v)) for v in vals),
                    *(repr(m.item() if hasattr(m, "item") else m) for m in mon), flag])
    _atomic_write(Path(path), "\n".join(lines) + "\n" + buf.getvalue())
    return Path(path)
