"""Embedded Runge-Kutta-Fehlberg 4(5) integrator with blow-up detection.

The fourth-order solution is propagated and the fifth-order one only feeds
the error estimate.  Besides the usual adaptive mode there is a fixed-step
mode, used for order-of-convergence measurements.

scipy's ``solve_ivp`` is not used because it cannot report step underflow
separately from other failures and does not propagate the order-4 solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

BLOWUP_THRESHOLD = 1e8
MIN_STEP = 1e-12
DEFAULT_RTOL = 1e-12
DEFAULT_H0 = 1e-3

TIME_LIMIT = "time-limit"
BLOW_UP = "blow-up"
STEP_UNDERFLOW = "step-underflow"
MAX_STEPS = "max-steps"

# Fehlberg tableau
_C = np.array([0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2])
_A = [
    [],
    [1 / 4],
    [3 / 32, 9 / 32],
    [1932 / 2197, -7200 / 2197, 7296 / 2197],
    [439 / 216, -8.0, 3680 / 513, -845 / 4104],
    [-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40],
]
_B4 = np.array([25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0])
_B5 = np.array([16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55])
_E = _B5 - _B4

RHS = Callable[[float, np.ndarray], np.ndarray]


def rkf45_step(f: RHS, t: float, y: np.ndarray, h: float):
    """One Fehlberg step: (order-4 solution, error estimate)."""
    k = []
    for i in range(6):
        yi = y
        for j, a in enumerate(_A[i]):
            yi = yi + h * a * k[j]
        k.append(np.asarray(f(t + _C[i] * h, yi)))
    y4 = y + h * sum(b * kk for b, kk in zip(_B4, k) if b)
    err = h * sum(e * kk for e, kk in zip(_E, k) if e)
    return y4, err


def _norm(y: np.ndarray) -> float:
    return float(np.max(np.abs(y))) if y.size else 0.0


@dataclass
class IntegrationResult:
    times: np.ndarray
    states: np.ndarray
    steps: np.ndarray
    reason: str
    blowup_bracket: Optional[tuple] = None   # (t_below, t_above) around the threshold crossing
    rejected: int = 0

    @property
    def blowup_time(self) -> Optional[float]:
        if self.reason != BLOW_UP:
            return None
        return float(self.times[-1])

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _bisect_crossing(f: RHS, t: float, y: np.ndarray, h: float, threshold: float, iters: int = 50):
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ym, _ = rkf45_step(f, t, y, mid * h)
        if np.all(np.isfinite(ym)) and _norm(ym) <= threshold:
            lo = mid
        else:
            hi = mid
    a, b = t + lo * h, t + hi * h
    return (min(a, b), max(a, b)) if h > 0 else (max(a, b), min(a, b))


def integrate(f: RHS, y0, t_end: float, *, t0: float = 0.0, rtol: float = DEFAULT_RTOL,
              atol: Optional[float] = None, h0: float = DEFAULT_H0,
              blowup: float = BLOWUP_THRESHOLD, min_step: float = MIN_STEP,
              fixed_step: Optional[float] = None, max_steps: int = 2_000_000) -> IntegrationResult:
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end`` (either direction).

    Stops early on blow-up (max-norm above ``blowup``, or a non-finite
    state) or when the adaptive step drops below ``min_step``.
    """
    if rtol <= 0 or blowup <= 0:
        raise ValueError("tolerance and blow-up threshold must be positive")
    atol = rtol if atol is None else atol
    y = np.array(y0, dtype=np.result_type(np.asarray(y0), float))
    direction = 1.0 if t_end >= t0 else -1.0
    t = t0
    times: List[float] = [t0]
    states: List[np.ndarray] = [y.copy()]
    steps: List[float] = [0.0]
    h = abs(fixed_step if fixed_step is not None else h0)
    rejected = 0
    reason = TIME_LIMIT
    bracket = None
    span = abs(t_end - t0)
    for _ in range(max_steps):
        remaining = span - abs(t - t0)
        if remaining <= 1e-15 * max(1.0, span):
            break
        step = min(h, remaining)
        y_new, err = rkf45_step(f, t, y, direction * step)
        finite = bool(np.all(np.isfinite(y_new)))
        if fixed_step is None:
            if finite:
                scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
                en = float(np.max(np.abs(err) / scale)) if y.size else 0.0
            else:
                en = np.inf
            if en > 1.0:
                rejected += 1
                fac = 0.2 if not np.isfinite(en) else max(0.2, 0.9 * en ** -0.2)
                h = step * fac
                if h < min_step:
                    reason = STEP_UNDERFLOW
                    break
                continue
            fac = 5.0 if en == 0 else min(5.0, max(0.2, 0.9 * en ** -0.2))
        if not finite or _norm(y_new) > blowup:
            bracket = _bisect_crossing(f, t, y, direction * step, blowup)
            if finite:
                t = t + direction * step
                times.append(t)
                states.append(y_new)
                steps.append(step)
            reason = BLOW_UP
            break
        t = t + direction * step
        y = y_new
        times.append(t)
        states.append(y.copy())
        steps.append(step)
        if fixed_step is None:
            h = step * fac
            if h < min_step:
                reason = STEP_UNDERFLOW
                break
    else:
        reason = MAX_STEPS
    return IntegrationResult(np.array(times), np.array(states), np.array(steps), reason, bracket, rejected)


def flow_map(f: RHS, y0, t: float, **kw) -> np.ndarray:
    """State after time ``t`` (raises on blow-up or underflow)."""
    if t == 0:
        return np.array(y0)
    res = integrate(f, y0, t, **kw)
    if res.reason != TIME_LIMIT:
        raise FloatingPointError(f"flow terminated early: {res.reason}")
    return res.final


@dataclass
class BatchResult:
    """Per-member outcome of :func:`integrate_batch`."""

    reasons: List[str]
    t_final: np.ndarray
    final: np.ndarray
    steps: np.ndarray

    def blowup_time(self, i: int) -> Optional[float]:
        return float(self.t_final[i]) if self.reasons[i] == BLOW_UP else None


def integrate_batch(f: Callable[[np.ndarray, np.ndarray], np.ndarray], Y0, t_end: float, *,
                    rtol: float = DEFAULT_RTOL, atol: Optional[float] = None,
                    h0: float = DEFAULT_H0, blowup: float = BLOWUP_THRESHOLD,
                    min_step: float = MIN_STEP, max_iter: int = 5_000_000,
                    monitor: Optional[Callable[[np.ndarray, np.ndarray, np.ndarray], None]] = None
                    ) -> BatchResult:
    """Integrate many independent copies of one system with per-member adaptive steps.

    ``f(t, Y)`` maps an ``(m, d)`` array of states (and an ``(m,)`` array of
    times) to derivatives.  The step control is the same as in
    :func:`integrate`; ``monitor(t, Y, mask)`` is called after every sweep
    with the mask of members that accepted a step.
    """
    if rtol <= 0 or blowup <= 0:
        raise ValueError("tolerance and blow-up threshold must be positive")
    atol = rtol if atol is None else atol
    Y = np.array(Y0, dtype=float)
    m = Y.shape[0]
    direction = 1.0 if t_end >= 0 else -1.0
    span = abs(t_end)
    t = np.zeros(m)
    h = np.full(m, abs(h0))
    active = np.ones(m, dtype=bool)
    reasons = [TIME_LIMIT] * m
    nsteps = np.zeros(m, dtype=int)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        y, tt = Y[idx], t[idx]
        step = np.minimum(h[idx], span - np.abs(tt))
        hs = direction * step
        k = []
        for i in range(6):
            yi = y
            for j, a in enumerate(_A[i]):
                yi = yi + (hs * a)[:, None] * k[j]
            k.append(f(tt + _C[i] * hs, yi))
        y4 = y + hs[:, None] * sum(b * kk for b, kk in zip(_B4, k) if b)
        err = hs[:, None] * sum(e * kk for e, kk in zip(_E, k) if e)
        with np.errstate(invalid="ignore", over="ignore"):
            finite = np.all(np.isfinite(y4), axis=1)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y4))
            en = np.where(finite, np.max(np.abs(err) / scale, axis=1), np.inf)
            fac = np.where(en == 0, 5.0, np.clip(0.9 * np.where(en > 0, en, 1.0) ** -0.2, 0.2, 5.0))
        fac = np.where(np.isfinite(en), fac, 0.2)
        accept = en <= 1.0
        rej = idx[~accept]
        h[rej] = step[~accept] * fac[~accept]
        for i in rej[h[rej] < min_step]:
            reasons[i] = STEP_UNDERFLOW
            active[i] = False
        acc = idx[accept]
        Y[acc] = y4[accept]
        t[acc] = tt[accept] + hs[accept]
        nsteps[acc] += 1
        h[acc] = step[accept] * fac[accept]
        if monitor is not None:
            mask = np.zeros(m, dtype=bool)
            mask[acc] = True
            monitor(direction * np.abs(t), Y, mask)
        norms = np.max(np.abs(Y[acc]), axis=1) if acc.size else np.zeros(0)
        for i, nrm in zip(acc, norms):
            if not np.isfinite(nrm) or nrm > blowup:
                reasons[i] = BLOW_UP
                active[i] = False
            elif span - abs(t[i]) <= 1e-15 * max(1.0, span):
                active[i] = False
            elif h[i] < min_step:
                reasons[i] = STEP_UNDERFLOW
                active[i] = False
    else:
        for i in np.flatnonzero(active):
            reasons[i] = MAX_STEPS
    return BatchResult(reasons, t, Y, nsteps)
