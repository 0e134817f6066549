import math
from dataclasses import replace

import numpy as np
import pytest

from uavrelay.errors import DomainError, NoFeasibleDesign
from uavrelay.optimizer import (DesignPoint, DesignSpace, SweepCurve, evaluate_design,
                                feasibility_check, optimize, sweep_vs_flight_angle, sweep_vs_Ls,
                                sweep_vs_uav_elements)
from uavrelay.montecarlo import EstimatorResult
from uavrelay.scenario import Design, Scenario

R = math.radians


@pytest.fixture(scope="module")
def scn():
    return replace(Scenario(), n_samples=20_000, path_points=31)


@pytest.fixture(scope="module")
def sampler(scn):
    return scn.sampler()


def test_candidates_and_ties():
    sp = DesignSpace(n_sx=(12, 18), n_usx=(8, 12), n_usy=(12, 18), H_u=(3000.0,),
                     L_sc=(12_000.0, 13_000.0), tie_ground=True, tie_uav=True)
    c = sp.candidates()
    assert len(c) == 2 * 4 * 2
    assert all(d.n_sx == d.n_sy == d.n_dx == d.n_dy for d in c)
    assert all((d.n_usx, d.n_usy) == (d.n_udx, d.n_udy) for d in c)
    with pytest.raises(DomainError):
        DesignSpace(n_usx=())
    with pytest.raises(DomainError):
        DesignSpace(n_usx=(100,))


def test_rank_key_prefers_capacity_then_size():
    cap = EstimatorResult(3.0, 0.01, 100, 1)
    small = DesignPoint(Design(n_usx=8), True, 0.0, cap)
    big = DesignPoint(Design(n_usx=12), True, 0.0, cap)
    better = DesignPoint(Design(n_usx=18), True, 0.0, EstimatorResult(3.1, 0.01, 100, 1))
    order = sorted([big, small, better], key=DesignPoint.rank_key)
    assert [p.design.n_usx for p in order] == [18, 8, 12]


def test_feasibility_trivial_constraints(scn, sampler):
    loose = replace(scn, psi_s_min=0.0, psi_d_min=0.0, p_out_tr=1.0)
    f = feasibility_check(Design(n_usx=18, n_udx=18), loose, loose.sampler())
    assert f.feasible and f.H_u_min == 0.0


def test_feasibility_names_violated_length(scn, sampler):
    f = feasibility_check(Design(L_sc=17_000.0), scn, sampler)
    assert not f.feasible
    assert "L_s_max" in f.violations


def test_large_uav_x_array_infeasible_everywhere(scn, sampler):
    for L_sc in np.arange(9000.0, 16_001.0, 1000.0):
        f = feasibility_check(Design(n_usx=16, n_udx=16, L_sc=float(L_sc)), scn, sampler)
        assert not f.feasible


def test_single_point_space(scn):
    res = optimize(DesignSpace(), scn)
    assert res.best.design == Design()
    assert res.best.feasible and len(res.ranked) == 1


def test_two_point_space_returns_feasible_one(scn):
    sp = DesignSpace(n_usx=(12, 18), n_udx=(12, 18), n_usy=(18,), n_udy=(18,), tie_uav=True)
    res = optimize(sp, scn)
    assert res.best.design.n_usx == 12
    assert len(res.ranked) == 1


def test_no_feasible_design_reports_counts(scn):
    sp = DesignSpace(n_usx=(18,), n_udx=(18,), tie_uav=True)
    with pytest.raises(NoFeasibleDesign) as info:
        optimize(sp, scn)
    d = info.value.details
    assert d["n_candidates"] == 1
    assert sum(d["violations"].values()) >= 1


def test_pruning_rules_do_not_change_winner(scn):
    sp = DesignSpace(n_usx=(10, 12, 18), n_usy=(10, 12, 18), L_sc=(12_500.0, 13_000.0),
                     tie_uav=True)
    a = optimize(sp, scn, prune=True, threads=4)
    b = optimize(sp, scn, prune=False, threads=4)
    assert a.best.design == b.best.design
    assert any(p.pruned_by == "axis_balance" for p in a.pruned)
    assert not b.pruned
    assert a.best.design.n_usy >= a.best.design.n_usx
    assert any("mirrored winner" in n for n in a.notes)


def test_sweep_curve_requires_increasing_abscissa():
    with pytest.raises(DomainError):
        SweepCurve("x", ("x", "y"), ((1.0, 0.0), (1.0, 1.0)))


def test_sweep_vs_ls(scn, sampler):
    grid = np.arange(10_000.0, 16_001.0, 1000.0)
    c = sweep_vs_Ls(scn, grid, sampler=sampler)
    assert len(c.rows) == len(grid)
    assert np.all(np.diff(c.column("C_su")) < 0) and np.all(np.diff(c.column("C_du")) > 0)
    assert np.allclose(c.column("C_e2e"), np.minimum(c.column("C_su"), c.column("C_du")))
    assert abs(c.meta["crossing_L_s_m"] - c.meta["argmax_e2e_L_s_m"]) <= 1000.0
    acc = c.column("accepted").astype(bool)
    assert np.all(c.column("L_s_m")[acc] <= c.meta["L_s_max_m"])
    with pytest.raises(DomainError):
        sweep_vs_Ls(scn, [2000.0], sampler=sampler)


def test_sweep_vs_flight_angle(scn, sampler):
    c = sweep_vs_flight_angle(scn, M=181, sampler=sampler)
    assert len(c.rows) == 181
    th = c.column("theta_R1_rad")
    assert th[0] == 0.0 and th[-1] == pytest.approx(math.pi)
    assert c.meta["average_of_min"] <= c.meta["trapezoid_mean"]
    assert c.meta["dLs_dtheta_max_over_min"] > 1.5


def test_flight_angle_curve_symmetric_for_symmetric_setup(sampler):
    sym = replace(Scenario(p_td=1.0, psi_d_min=R(10.0)), n_samples=20_000).with_design(L_sc=9500.0)
    c = sweep_vs_flight_angle(sym, M=21, sampler=sym.sampler())
    e2e = c.column("C_e2e")
    se = np.maximum(c.column("C_su_se"), c.column("C_du_se"))
    assert np.all(np.abs(e2e - e2e[::-1]) < 4 * np.hypot(se, se[::-1]))


def test_sweep_vs_uav_elements(scn, sampler):
    c = sweep_vs_uav_elements(scn, [8, 12], axis="y", sampler=sampler)
    assert c.columns[0] == "N_uqy" and len(c.rows) == 2
    with pytest.raises(DomainError):
        sweep_vs_uav_elements(scn, [8], axis="z", sampler=sampler)


def test_evaluate_design_reuses_common_draws(scn, sampler):
    a = evaluate_design(Design(), scn, sampler)
    b = evaluate_design(Design(), scn, sampler)
    assert a == b and a.feasible


def test_looser_outage_target_never_lowers_optimum(scn):
    sp = DesignSpace(n_usx=(10, 12, 14), n_udx=(10, 12, 14), n_usy=(18,), n_udy=(18,),
                     L_sc=(12_500.0, 13_000.0), tie_uav=True)
    tight = optimize(sp, scn).best.avg_capacity.mean
    loose = optimize(sp, replace(scn, p_out_tr=1e-2)).best.avg_capacity.mean
    assert loose >= tight
