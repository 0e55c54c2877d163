import csv
import io
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sgkit import linalg
from sgkit.errors import PreconditionError
from sgkit.exterior import gl_action, infinitesimal_action
from sgkit.fixtures import load_fixture
from sgkit.flow import (
    CSV_COLUMNS,
    FlowConfig,
    FlowProblem,
    breakdown_detect,
    diagnose,
    evolve,
    flow_field,
    integrate_rk4,
    monitor_residuals,
    restricted_flow_residuals,
    series_diagnostics,
    subspace_residual,
    summary_json,
    taylor_jets,
    trajectory_csv,
)
from sgkit.liealg import LieAlgebra, ce_differential
from sgkit.lifts import ExtendedAlgebra, hypo_lift
from sgkit.structures import model_structure
from sgkit.torsion import intrinsic_torsion

HYPO = load_fixture("heisenberg5_ext2")
ABELIAN = load_fixture("abelian7")
NO_MON = FlowConfig(monitors=())


@pytest.fixture(scope="module")
def hypo():
    return FlowProblem(HYPO.algebra, HYPO.structure)


@pytest.fixture(scope="module")
def abelian():
    return FlowProblem(ABELIAN.algebra, ABELIAN.structure)


@pytest.fixture(scope="module")
def trajectories(hypo):
    cfg = FlowConfig(max_torsion=1e12, monitors=(), extra=2)
    return integrate_rk4(hypo, 2.0, 1e-2, cfg), integrate_rk4(hypo, -2.0, 1e-2, cfg)


# --- problem setup ------------------------------------------------------------


def test_non_hypo_rejected():
    f = load_fixture("nonhypo7")
    with pytest.raises(PreconditionError, match="not hypo"):
        FlowProblem(f.algebra, f.structure)


def test_wrong_group_rejected():
    with pytest.raises(Exception):
        FlowProblem(LieAlgebra.abelian(6), model_structure("SU3"))


# --- field --------------------------------------------------------------------


def test_field_abelian_is_zero(abelian):
    assert np.all(abelian.field(np.eye(7)) == 0)
    assert np.all(flow_field(np.eye(7), ABELIAN.algebra, ABELIAN.structure) == 0)


def test_field_at_identity_is_initial_torsion(hypo):
    T0 = intrinsic_torsion(HYPO.algebra, HYPO.structure).T
    assert np.all(hypo.initial_torsion() == T0)
    assert np.all(flow_field(linalg.identity(7), HYPO.algebra, HYPO.structure) == T0)


def test_field_reproduces_psi_derivative_exactly():
    # D_psi(field) = d phi at t = 0, both sides exact and computed independently
    s = HYPO.structure
    F = flow_field(linalg.identity(7), HYPO.algebra, s)
    assert infinitesimal_action(F, s["psi"]) == ce_differential(HYPO.algebra, s["phi"])


@given(st.integers(0, 2**16))
def test_fast_field_matches_direct(seed):
    rng = np.random.default_rng(seed)
    A = np.eye(7) + 0.2 * rng.normal(size=(7, 7))
    if np.linalg.det(A) <= 0:
        A[0] *= -1
    fast = flow_field(A, HYPO.algebra, HYPO.structure)
    direct = flow_field(A, HYPO.algebra, HYPO.structure, method="direct")
    assert np.allclose(fast, direct, atol=1e-10)


def test_field_consistency_away_from_identity(hypo):
    # D_{psi_t}(T_t) = d phi_t at a generic point of the trajectory
    A = evolve(hypo, 0.3, 1e-2)
    s = HYPO.structure.to_float().act(A)
    lhs = infinitesimal_action(hypo.torsion(A), s["psi"])
    rhs = ce_differential(HYPO.algebra.to_float(), s["phi"])
    assert (lhs - rhs).norm() < 1e-10


def test_exact_field_at_rational_gauge():
    A = linalg.identity(7)
    A[2, 4] = Fraction(1, 3)
    fast = flow_field(A, HYPO.algebra, HYPO.structure)
    direct = flow_field(A, HYPO.algebra, HYPO.structure, method="direct")
    assert np.all(fast == direct)


# --- integration ------------------------------------------------------------


def test_abelian_trajectory_constant(abelian):
    tr = integrate_rk4(abelian, 5.0, 1.0, FlowConfig(monitors=("thm32",)))
    assert not tr.breakdown
    for s in tr.states:
        assert np.all(s.A == np.eye(7))
        assert s.hypo_res == 0 and s.torsion_norm == 0


def test_rk4_is_fourth_order(hypo):
    ref = evolve(hypo, 0.1, 1.25e-3)
    errs = [np.max(np.abs(evolve(hypo, 0.1, h) - ref)) for h in (0.02, 0.01, 0.005)]
    for a, b in zip(errs, errs[1:]):
        assert 3.7 <= math.log2(a / b) <= 4.3


def test_time_reversal(hypo):
    A = evolve(hypo, 0.3, 1e-3)
    back = evolve(hypo, -0.3, 1e-3, A0=A)
    # the flow is autonomous in A only through A . s0, so step back with the same field
    assert np.max(np.abs(back - np.eye(7))) < 1e-8


def test_hypo_preserved(trajectories):
    for tr in trajectories:
        assert max(s.hypo_res for s in tr.states) <= 1e-9


def test_breakdown_both_directions(trajectories):
    fwd, bwd = trajectories
    assert fwd.breakdown and bwd.breakdown
    assert fwd.reason == bwd.reason == "metric degenerate"
    assert fwd.trigger_min_eig < 1e-6 and bwd.trigger_min_eig < 1e-6
    assert 0.7 < fwd.t_breakdown < 0.9 and -0.9 < bwd.t_breakdown < -0.7


def test_default_caps_stop_on_torsion(hypo):
    tr = integrate_rk4(hypo, 2.0, 1e-2, NO_MON)
    assert tr.breakdown and tr.reason == "torsion blow-up"


def test_breakdown_scales_with_gauge():
    c = 2
    f = HYPO
    q = FlowProblem(f.algebra, f.structure.act(linalg.identity(7) * c))
    cfg = FlowConfig(max_torsion=1e12, monitors=())
    t1 = integrate_rk4(FlowProblem(f.algebra, f.structure), 2.0, 1e-2, cfg).t_breakdown
    t2 = integrate_rk4(q, 2.0, 1e-2 / c, cfg).t_breakdown
    assert abs(t2 - t1 / c) < 1e-3


def test_self_dual_fixture_breaks_down_backward_only():
    f = load_fixture("heisenberg5_sasaki")
    p = FlowProblem(ExtendedAlgebra(f.ext.base, 2).algebra, hypo_lift(hypo_lift(f.structure)))
    cfg = FlowConfig(max_torsion=1e12, monitors=())
    fwd = integrate_rk4(p, 3.0, 1e-2, cfg)
    bwd = integrate_rk4(p, -3.0, 1e-2, cfg)
    assert not fwd.breakdown and bwd.breakdown
    assert np.trace(linalg.to_float(p.initial_torsion())) == pytest.approx(-1)


def test_flow_commutes_with_automorphism(hypo):
    F = np.eye(7)
    F[2:6, 2:6] *= 2.0
    F[6, 6] = 4.0
    Finv = np.linalg.inv(F)
    q = FlowProblem(HYPO.algebra, HYPO.structure.act(linalg.exact_matrix(F.astype(int).tolist())))
    A = evolve(hypo, 0.2, 1e-3)
    B = evolve(q, 0.2, 1e-3)
    assert np.allclose(B, F @ A @ Finv, atol=1e-10)


def test_invalid_step(hypo):
    with pytest.raises(ValueError):
        integrate_rk4(hypo, 1.0, 0.0)


# --- monitors ---------------------------------------------------------------


def test_subspace_conserved(trajectories):
    for tr in trajectories:
        assert max(s.subspace_res for s in tr.states) < 1e-9


def test_subspace_residual_detects_mixing():
    A = np.eye(7)
    A[3, 0] = 1e-3
    assert subspace_residual(A, np.zeros((7, 7)), 2) == pytest.approx(1e-3)


def test_shape_operator_monitors_second_order(hypo):
    res = [monitor_residuals(hypo, 0.1, h) for h in (2e-3, 1e-3, 5e-4)]
    for key in ("shape_a", "shape_b"):
        rates = [math.log2(a[key] / b[key]) for a, b in zip(res, res[1:])]
        assert all(1.7 <= r <= 2.3 for r in rates), (key, rates)
    assert res[1]["shape_a"] < 1e-6
    # the torsion residual is pure differencing error h^2/6 |T'''|, about 2e-6 here
    assert res[1]["shape_b"] < 5e-6


def test_stated_sign_monitors_do_not_vanish(hypo):
    # with T defined by nabla phi = -(T .) -| psi, g' = +2 g(T., .) fails at O(1)
    r = monitor_residuals(hypo, 0.2, 1e-3)
    assert r["thm32a"] > 0.5 and r["thm32b"] > 0.5


def test_monitors_on_trajectory(hypo):
    tr = integrate_rk4(hypo, 0.05, 1e-3, FlowConfig(extra=2))
    inner = tr.states[1:-1]
    assert all(s.shape_a_res < 1e-5 and s.shape_b_res < 1e-5 for s in inner)
    assert math.isnan(tr.states[0].thm32a_res)


def test_restricted_families_satisfy_lower_equations(hypo):
    for t in (0.0, 0.3, 0.6):
        res = restricted_flow_residuals(hypo, t, 2)
        assert set(res) == {"rho", "sigma", "omega1", "rho2", "rho3", "half_omega3_sq"}
        assert max(res.values()) < 1e-7


def test_restricted_families_by_differences(hypo):
    res = restricted_flow_residuals(hypo, 0.3, 2, h=1e-5)
    assert max(res.values()) < 1e-7


# --- series -----------------------------------------------------------------


def test_series_abelian(abelian):
    ser = taylor_jets(abelian, 6)
    assert all(np.all(linalg.to_float(c) == 0) for c in ser.coefficients[1:])
    assert series_diagnostics(ser).infinite


def test_first_coefficient_is_initial_torsion_exact(hypo):
    ser = taylor_jets(hypo, 3, exact=True)
    assert np.all(ser.coefficients[1] == hypo.initial_torsion())
    assert np.all(ser.coefficients[0] == linalg.identity(7))


def test_exact_and_float_jets_agree(hypo):
    ex = taylor_jets(hypo, 4, exact=True)
    fl = taylor_jets(hypo, 4)
    for a, b in zip(ex.coefficients, fl.coefficients):
        assert np.allclose(linalg.to_float(a), b, atol=1e-12)


def test_second_coefficient_by_hand(hypo):
    # A'' = d/dt (T A) = (dT/dt) A + T T; at t = 0 compare with a central difference of the field
    ser = taylor_jets(hypo, 2)
    h = 1e-4
    Ap, Am = evolve(hypo, h, h / 4), evolve(hypo, -h, h / 4)
    fd = (hypo.field(Ap) - hypo.field(Am)) / (2 * h)
    assert np.allclose(ser.coefficients[2], fd, atol=1e-6)


def test_series_matches_rk4(hypo):
    ser = taylor_jets(hypo, 12)
    for t in (0.05, -0.05):
        assert np.max(np.abs(ser.partial_sum(t) - evolve(hypo, t, 1e-3))) < 1e-8


def test_radius_estimate(hypo, trajectories):
    ser = taylor_jets(hypo, 14)
    r = series_diagnostics(ser)
    r2 = series_diagnostics(ser, 12)
    assert not r.infinite and r.radius > 0
    assert abs(r.radius - r2.radius) / r.radius < 0.2
    t_break = trajectories[0].t_breakdown
    assert 0.5 < r.radius / t_break < 2.0


def test_series_order_validation(hypo):
    with pytest.raises(ValueError):
        taylor_jets(hypo, 0)
    with pytest.raises(ValueError):
        series_diagnostics(taylor_jets(hypo, 3))


# --- breakdown report and output ------------------------------------------------


def test_breakdown_report(hypo, trajectories):
    rep = breakdown_detect(*trajectories, hypo.initial_torsion())
    assert rep.verdict == "breakdown in both directions"
    assert rep.min_eig_plus < 1e-6 and rep.min_eig_minus < 1e-6
    js = rep.to_json()
    assert js["verdict"] == rep.verdict and js["t_plus"] == trajectories[0].t_breakdown


def test_breakdown_report_abelian(abelian):
    fwd = integrate_rk4(abelian, 1000.0, 100.0, NO_MON)
    bwd = integrate_rk4(abelian, -1000.0, 100.0, NO_MON)
    rep = breakdown_detect(fwd, bwd, abelian.initial_torsion())
    assert rep.parallel and rep.verdict == "parallel (no breakdown)"
    assert rep.t_plus is None and rep.t_minus is None


def test_csv_and_summary(hypo):
    tr = integrate_rk4(hypo, 0.01, 5e-3, FlowConfig(extra=2))
    text = trajectory_csv(tr.states)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) == 1 + len(tr.states)
    assert float(rows[1][0]) == 0.0 and float(rows[1][1]) == 1.0
    assert text == trajectory_csv(tr.states)  # deterministic
    rep = breakdown_detect(tr, tr, hypo.initial_torsion())
    out = json.loads(summary_json(rep, series_diagnostics(taylor_jets(hypo, 6)), {"fixture": "x"}))
    assert out["radius_estimate"]["heuristic"] is True
    assert out["fixture"] == "x" and out["breakdown"]["parallel"] is False


def test_diagnose_fields(hypo):
    st_ = diagnose(hypo, 0.0, np.eye(7), extra=2)
    assert st_.min_eig == pytest.approx(1.0)
    assert st_.tr_T == pytest.approx(0.0)
    assert st_.subspace_res == 0.0
    assert np.allclose(st_.g, np.eye(7))


def test_metric_is_gauge_pullback(hypo):
    A = evolve(hypo, 0.2, 1e-3)
    s = HYPO.structure.to_float().act(A)
    assert np.allclose(hypo.metric(A), s.metric, atol=1e-12)
    assert gl_action(A, HYPO.structure["psi"].to_float()).allclose(s["psi"], 1e-12)
