from __future__ import annotations

import numpy as np
import pytest

from holonomy_lab import curvature as cv
from holonomy_lab import dynamics as dyn
from holonomy_lab import poisson as ps
from holonomy_lab.integrator import BLOW_UP
from holonomy_lab.rep_core import B_flat, RepSpec, get_rep

SPEC = RepSpec.tensor_real(2, 1)


def unit(k, n):
    return tuple(1 if i == k else 0 for i in range(n))


def random_point(spec, seed):
    rep = get_rep(spec)
    rng = np.random.default_rng(seed)
    z = rng.normal(size=rep.dim_g + rep.dim_V)
    return dyn.PhasePoint.from_vector(spec, z), rng


@pytest.mark.parametrize("c", [0.0, 1.0, -2.0])
def test_geodesic_rhs_example(c):
    spec = RepSpec.tensor_real(3, 0)
    rep = get_rep(spec)
    a = np.array([float(v) for v in B_flat(rep.wedge(unit(0, 3), unit(1, 3)))])
    p = dyn.PhasePoint(a, np.zeros(rep.dim_V))
    x = np.zeros(rep.dim_V)
    x[0] = 1.0                                 # e1 (x) x1
    d = dyn.geodesic_rhs(p, x, ps.make_phi(spec, c))
    assert np.allclose(d.a, 0)
    assert d.b[3] == pytest.approx(3 + c)      # e2 (x) x1


def test_geodesic_rhs_zero_b_and_linearity():
    phi = ps.make_phi(SPEC, 1)
    p, rng = random_point(SPEC, 0)
    x = rng.normal(size=get_rep(SPEC).dim_V)
    d0 = dyn.geodesic_rhs(dyn.PhasePoint(p.a, np.zeros_like(p.b)), x, phi)
    assert np.allclose(d0.a, 0)
    d1 = dyn.geodesic_rhs(p, x, phi)
    d2 = dyn.geodesic_rhs(p, 2 * x, phi)
    assert np.allclose(d2.a, 2 * d1.a)
    assert np.allclose(d2.b, 2 * d1.b)


def test_flowspec_validation():
    with pytest.raises(ValueError):
        dyn.FlowSpec(SPEC, np.ones(6), rtol=0)
    with pytest.raises(ValueError):
        dyn.FlowSpec(SPEC, np.ones(5))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_leaf_rank_constant_along_geodesic(seed):
    p, rng = random_point(SPEC, seed)
    fs = dyn.FlowSpec(SPEC, rng.normal(size=6), c=1.0, t_max=1.0)
    traj = dyn.integrate_flow(p, fs, seed=seed)
    ranks = {int(r) for r in traj.monitored["leaf_rank"] if r >= 0}
    assert len(ranks) == 1
    assert len(traj.monitored["leaf_rank"]) == len(traj.times)
    assert 10 <= len(traj) <= 10 ** 6


@pytest.mark.parametrize("seed", range(8))
def test_leaf_rank_constant_up_to_blowup(seed):
    # long flows run into blow-up; monitored ranks must not drift near the cap
    rng = np.random.default_rng(seed)
    p = dyn.PhasePoint.from_vector(SPEC, rng.normal(size=12))
    traj = dyn.integrate_flow(p, dyn.FlowSpec(SPEC, rng.normal(size=6), t_max=20.0))
    ranks = traj.monitored["leaf_rank"]
    assert set(ranks[ranks >= 0].tolist()) == {10}
    assert traj.monitored["max_norm"][ranks < 0].min() > dyn.LEAF_RANK_CAP


def test_trajectory_rejects_non_monotone_times():
    with pytest.raises(ValueError):
        dyn.Trajectory(SPEC, np.array([0.0, 1.0, 0.5]), np.zeros((3, 12)), np.zeros(3), "time-limit")


def test_commutator_same_direction_is_zero():
    p, rng = random_point(SPEC, 3)
    x = rng.normal(size=6)
    r = dyn.commutator_defect(p, x, x, 1e-2, ps.make_phi(SPEC, 1))
    assert np.max(np.abs(r.defect)) < 1e-12


def test_commutator_with_constant_phi_is_third_order():
    p, rng = random_point(SPEC, 4)
    x, y = rng.normal(size=6), rng.normal(size=6)
    phi = ps.sigma_only(SPEC, 1)
    d1 = dyn.commutator_defect(p, x, y, 1e-2, phi)
    d2 = dyn.commutator_defect(p, x, y, 5e-3, phi)
    assert np.max(np.abs(d1.reference)) == 0
    # O(s^3) at most; in fact these flows commute, so only roundoff remains
    for s, d in ((1e-2, d1), (5e-3, d2)):
        assert np.linalg.norm(d.defect) <= 1e-3 * s ** 3


@pytest.mark.parametrize("seed", range(3))
def test_commutator_matches_reference(seed):
    p, rng = random_point(SPEC, 10 + seed)
    x, y = rng.normal(size=6), rng.normal(size=6)
    assert dyn.commutator_check(p, x, y, ps.make_phi(SPEC, 1)).rel_error < 1e-4


def test_commutator_rejects_nonpositive_step():
    p, _ = random_point(SPEC, 0)
    with pytest.raises(ValueError):
        dyn.commutator_defect(p, np.ones(6), np.ones(6), 0.0, ps.make_phi(SPEC, 1))


@pytest.mark.parametrize("spec", [RepSpec.tensor_real(2, 1), RepSpec.tensor_real(2, 2),
                                  RepSpec.tensor_complex(3)], ids=str)
def test_witness_frame_conditions(spec):
    frame = dyn.build_witness_frame(spec)
    assert all(frame.conditions().values())
    rep = get_rep(spec)
    assert rep.inner(frame.y, frame.y) == 0 and rep.inner(frame.z, frame.z) == 0
    assert rep.inner(frame.y, frame.z) == 1


@pytest.mark.parametrize("spec", [RepSpec.tensor_real(3, 0), RepSpec.tensor_real(1, 1),
                                  RepSpec.tensor_real(1, 2)], ids=str)
def test_witness_frame_errors(spec):
    with pytest.raises(ValueError):
        dyn.build_witness_frame(spec)


def test_witness_pipeline_two_two():
    spec = RepSpec.tensor_real(2, 2)
    frame = dyn.build_witness_frame(spec)
    p0, c1, c2 = dyn.arranged_initial_point(spec, frame, seed=1)
    rep = dyn.incompleteness_witness(spec, p0, frame.with_constants(c1, c2))
    assert max(rep.identity_residuals.values()) < 1e-6
    assert rep.conserved_drift < 1e-6
    assert rep.ode_residual < 1e-5
    assert rep.blowup_time is not None
    assert complex(rep.f0).real > 0
    assert len(rep.identity_residuals) == len(dyn.IDENTITY_NAMES)


def test_ode_energy_case_blows_up():
    out = dyn.ode_outcome(0.0, 1.0, 2.0)
    assert out.forward == BLOW_UP
    assert out.blows_up and out.in_assertion
    assert out.drift_rate < 1e-8


def test_ode_scan_small_grid():
    rows = dyn.ode_lemma_scan(-1.0, np.linspace(0.1, 5, 5), np.linspace(-3, 3, 5))
    assert len(rows) == 25
    assert all(o.blows_up for o in rows if o.in_assertion)
    assert max(o.drift_rate for o in rows) < 1e-8


def test_first_integral_formula():
    assert dyn.first_integral(1.0, 2.0, 0.0) == pytest.approx(4 - 2 / 3)


def test_holonomy_span_at_full_element():
    rep = get_rep(SPEC)
    phi = ps.make_phi(SPEC, 1)
    a_sharp = cv.random_full_element(SPEC, np.random.default_rng(0))
    a = np.array([float(v) for v in B_flat(a_sharp)])
    d, _ = dyn.curvature_span_dim(phi, a)
    assert d == rep.dim_g
    assert dyn.curvature_span_dim(phi, np.zeros(rep.dim_g))[0] == 0


def test_holonomy_running_union_reaches_g():
    p, rng = random_point(SPEC, 7)
    traj = dyn.integrate_flow(p, dyn.FlowSpec(SPEC, rng.normal(size=6), t_max=0.5), monitor_rank=False)
    per, running = dyn.holonomy_span_along(traj, ps.make_phi(SPEC, 1))
    assert running[-1] == get_rep(SPEC).dim_g
    assert all(b >= a for a, b in zip(running, running[1:]))
