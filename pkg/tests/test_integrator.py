from __future__ import annotations

import numpy as np
import pytest

from holonomy_lab.integrator import (BLOW_UP, STEP_UNDERFLOW, TIME_LIMIT, flow_map, integrate,
                                     integrate_batch, rkf45_step)


def energy(z, C):
    return z[..., 1] ** 2 - (2.0 / 3.0) * z[..., 0] ** 3 - 2 * C * z[..., 0]


def ode(C):
    return lambda t, z: np.array([z[1], z[0] ** 2 + C])


def test_blowup_of_y_squared():
    r = integrate(lambda t, y: y ** 2, [1.0], 5.0)
    assert r.reason == BLOW_UP
    assert 0.99 <= r.blowup_time <= 1.01
    assert r.blowup_time == pytest.approx(1.0, abs=1e-6)
    assert r.blowup_bracket is not None


def test_time_limit_and_accuracy():
    r = integrate(lambda t, y: -y, [1.0], 2.0)
    assert r.reason == TIME_LIMIT
    assert r.times[-1] == pytest.approx(2.0)
    # rtol is a per-step bound; the global error accumulates over the steps
    assert r.final[0] == pytest.approx(np.exp(-2.0), rel=1e-9)
    assert np.all(np.diff(r.times) > 0)


def test_backward_integration():
    r = integrate(lambda t, y: y, [1.0], -1.0)
    assert r.times[-1] == pytest.approx(-1.0)
    assert r.final[0] == pytest.approx(np.exp(-1.0), rel=1e-9)


def test_step_underflow_is_distinct_from_blowup():
    f = lambda t, y: np.array([1 / np.sqrt(1 - t)]) if t < 1 else np.array([np.nan])
    r = integrate(f, [0.0], 2.0)
    assert r.reason == STEP_UNDERFLOW
    assert np.all(np.abs(r.final) < 10)


@pytest.mark.parametrize("C,y0,yp0", [(0.0, 1.0, 0.5), (-1.0, 0.5, 0.0), (1.0, -0.5, 0.3)])
def test_first_integral_drift_over_unit_time(C, y0, yp0):
    r = integrate(ode(C), [y0, yp0], 1.0)
    e = energy(r.states, C)
    assert np.max(np.abs(e - e[0])) < 1e-8


def test_fourth_order_convergence():
    C = -25.0
    f = ode(C)
    ref = integrate(f, [-7.0, 0.0], 10.0, rtol=1e-15, atol=1e-15).final
    hs = [0.02, 0.01, 0.005]
    errs = [np.max(np.abs(integrate(f, [-7.0, 0.0], 10.0, fixed_step=h).final - ref)) for h in hs]
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert 3.6 < slope < 4.4


def test_single_step_error_estimate_is_small_for_polynomials():
    # the order-4 solution is exact for y' = t^3
    y4, err = rkf45_step(lambda t, y: np.array([t ** 3]), 0.0, np.array([0.0]), 0.5)
    assert y4[0] == pytest.approx(0.5 ** 4 / 4, rel=1e-12)
    assert abs(err[0]) < 1e-12


def test_flow_map_raises_on_blowup():
    assert flow_map(lambda t, y: -y, [2.0], 0.0)[0] == 2.0
    with pytest.raises(FloatingPointError):
        flow_map(lambda t, y: y ** 2, [1.0], 3.0)


def test_invalid_settings():
    with pytest.raises(ValueError):
        integrate(lambda t, y: y, [1.0], 1.0, rtol=0)
    with pytest.raises(ValueError):
        integrate(lambda t, y: y, [1.0], 1.0, blowup=-1)


def test_batch_matches_scalar_runs():
    C = 0.5
    Y0 = np.array([[1.0, 0.5], [0.3, -0.2], [2.0, 1.0]])
    f = lambda t, Y: np.stack([Y[:, 1], Y[:, 0] ** 2 + C], axis=1)
    batch = integrate_batch(f, Y0, 3.0)
    for i, y0 in enumerate(Y0):
        single = integrate(ode(C), y0, 3.0)
        assert batch.reasons[i] == single.reason
        if single.reason == BLOW_UP:
            assert batch.blowup_time(i) == pytest.approx(single.blowup_time, rel=1e-6)
        else:
            assert np.allclose(batch.final[i], single.final, rtol=1e-8)
