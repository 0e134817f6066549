"""Constrained design search and the parameter sweeps behind it.

The search maximises the flight-path average end-to-end capacity over a grid
of element counts, altitudes, and circle placements, subject to the outage
target at the critical path points and the line-of-sight altitude floor.

Two pruning rules keep the grid cheap:

* ``axis_balance``: when the UAV's pointing error is smaller across-track (y) than
  along-track (x), candidates with fewer y than x elements on a UAV array are
  skipped. This is a heuristic, so after the search the mirrored twin of
  the winner is evaluated. If the twin wins, the search is repeated without
  the rule.
* ``link_length``: the maximum single-hop lengths depend on the arrays and
  altitude only. A placement whose far path points exceed them cannot be
  feasible, so no capacity is estimated for it.
"""
from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, InfeasibleError, NoFeasibleDesign
from .geometry import elevation_angle, link_lengths, min_height
from .montecarlo import (CU_HOP, UR_HOP, EstimatorResult, GainSampler, OutageEstimate,
                         conditional_hop_capacity, max_link_length, path_capacity_profile,
                         path_point_outage, single_hop_outage, conditional_outage,
                         worst_case_path_outage)
from .scenario import Design, Scenario

log = logging.getLogger(__name__)

N_MAX = 64


@dataclass(frozen=True)
class DesignSpace:
    """Grids for every decision variable.

    With ``tie_ground`` all four ground counts take the value of ``n_sx``;
    with ``tie_uav`` the UR-side UAV array copies the CU-side one.
    """

    n_sx: Tuple[int, ...] = (18,)
    n_sy: Tuple[int, ...] = (18,)
    n_dx: Tuple[int, ...] = (18,)
    n_dy: Tuple[int, ...] = (18,)
    n_usx: Tuple[int, ...] = (12,)
    n_usy: Tuple[int, ...] = (18,)
    n_udx: Tuple[int, ...] = (12,)
    n_udy: Tuple[int, ...] = (18,)
    H_u: Tuple[float, ...] = (3000.0,)
    L_sc: Tuple[float, ...] = (13000.0,)
    tie_ground: bool = False
    tie_uav: bool = False
    n_max: int = N_MAX

    def __post_init__(self):
        for name in ("n_sx", "n_sy", "n_dx", "n_dy", "n_usx", "n_usy", "n_udx", "n_udy",
                     "H_u", "L_sc"):
            grid = getattr(self, name)
            if len(grid) == 0:
                raise DomainError(f"design grid {name} is empty")
            if name.startswith("n_") and any(not 1 <= v <= self.n_max for v in grid):
                raise DomainError(f"{name} values must lie in [1, {self.n_max}]")

    def candidates(self) -> List[Design]:
        if self.tie_ground:
            ground = [(n, n, n, n) for n in self.n_sx]
        else:
            ground = list(itertools.product(self.n_sx, self.n_sy, self.n_dx, self.n_dy))
        if self.tie_uav:
            uav = [(x, y, x, y) for x, y in itertools.product(self.n_usx, self.n_usy)]
        else:
            uav = list(itertools.product(self.n_usx, self.n_usy, self.n_udx, self.n_udy))
        return [Design(*g, *u, H_u=h, L_sc=l)
                for g in ground for u in uav for h in self.H_u for l in self.L_sc]


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    worst_outage: Optional[OutageEstimate]
    L_s_max: float
    L_d_max: float
    H_u_min: float
    violations: Tuple[str, ...] = ()


@dataclass(frozen=True)
class DesignPoint:
    design: Design
    feasible: bool
    worst_outage: Optional[float]
    avg_capacity: Optional[EstimatorResult]
    violations: Tuple[str, ...] = ()
    pruned_by: Optional[str] = None
    L_s_max: Optional[float] = None
    L_d_max: Optional[float] = None

    def rank_key(self):
        """Total order: higher capacity first, then fewer elements, then lexicographic."""
        cap = self.avg_capacity.mean if self.avg_capacity else -math.inf
        return (-cap, self.design.n_total, self.design.key())


@dataclass
class OptimizationResult:
    best: DesignPoint
    ranked: List[DesignPoint]
    evaluated: List[DesignPoint]
    pruned: List[DesignPoint]
    pruning_disabled: bool = False
    notes: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class SweepCurve:
    kind: str
    columns: Tuple[str, ...]
    rows: Tuple[Tuple, ...]
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        x = [r[0] for r in self.rows]
        if any(b <= a for a, b in zip(x, x[1:])):
            raise DomainError(f"{self.kind} abscissa must be strictly increasing")

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)


def _link_limits(scn: Scenario, design: Design, sampler: GainSampler, cache: Optional[dict] = None):
    """Maximum CU and UR link lengths (m) at the design's altitude; 0 when unreachable."""
    key = (design.n_sx, design.n_sy, design.n_dx, design.n_dy,
           design.n_usx, design.n_usy, design.n_udx, design.n_udy, design.H_u)
    if cache is not None and key in cache:
        return cache[key]
    hop_s, hop_d = scn.hops(design)
    out = []
    for hop, idx in ((hop_s, CU_HOP), (hop_d, UR_HOP)):
        try:
            out.append(max_link_length(hop, scn.gamma_th, scn.p_out_tr, design.H_u, 0, 0,
                                       hop_index=idx, L_max=scn.L_search_max, sampler=sampler))
        except InfeasibleError:
            out.append(0.0)
    res = tuple(out)
    if cache is not None:
        cache[key] = res
    return res


def feasibility_check(design: Design, scn: Scenario, sampler: Optional[GainSampler] = None,
                      _limits_cache: Optional[dict] = None) -> Feasibility:
    """Outage and altitude constraints for one candidate.

    Feasible when the altitude clears the line-of-sight floor, both far path
    points lie within the maximum hop lengths, and the worst end-to-end
    outage at the path extremes is below the target.
    """
    sampler = sampler or scn.sampler()
    geom = scn.geometry(design)
    h_min = geom.H_u_min
    L_s_max, L_d_max = _link_limits(scn, design, sampler, _limits_cache)
    L_s_far = link_lengths(0.0, geom)[0]
    L_d_far = link_lengths(math.pi, geom)[1]
    violations = []
    if design.H_u < h_min:
        violations.append("min_height")
    if L_s_far > L_s_max:
        violations.append("L_s_max")
    if L_d_far > L_d_max:
        violations.append("L_d_max")
    hop_s, hop_d = scn.hops(design)
    worst = worst_case_path_outage(geom, hop_s, hop_d, scn.gamma_th, 0, 0, sampler=sampler)
    if not worst.probability < scn.p_out_tr:
        violations.append("outage")
    return Feasibility(not violations, worst, L_s_max, L_d_max, h_min, tuple(violations))


def evaluate_design(design: Design, scn: Scenario, sampler: GainSampler,
                    with_capacity: bool = True, _limits_cache: Optional[dict] = None) -> DesignPoint:
    f = feasibility_check(design, scn, sampler, _limits_cache)
    cap = None
    if with_capacity:
        hop_s, hop_d = scn.hops(design)
        cap = path_capacity_profile(scn.geometry(design), hop_s, hop_d, scn.path_points, 0, 0,
                                    base=scn.log_base, sampler=sampler).average
    return DesignPoint(design, f.feasible, f.worst_outage.probability, cap, f.violations,
                       None, f.L_s_max, f.L_d_max)


def _axis_balance_applies(scn: Scenario) -> bool:
    return scn.uav_stats.sigma_y < scn.uav_stats.sigma_x


def _axis_balance_pruned(d: Design) -> bool:
    return d.n_usy < d.n_usx or d.n_udy < d.n_udx


def _mirror(d: Design) -> Design:
    return replace(d, n_usx=d.n_usy, n_usy=d.n_usx, n_udx=d.n_udy, n_udy=d.n_udx)


def optimize(space: DesignSpace, scn: Scenario, *, prune: bool = True,
             threads: Optional[int] = None) -> OptimizationResult:
    """Exhaustive constrained grid search.

    Raises NoFeasibleDesign (with per-constraint violation counts) when no
    candidate satisfies every constraint.
    """
    threads = scn.threads if threads is None else threads
    sampler = scn.sampler(threads=1)
    limits: dict = {}
    candidates = space.candidates()
    use_axis_balance = prune and _axis_balance_applies(scn)

    pruned: List[DesignPoint] = []
    todo: List[Design] = []
    for d in candidates:
        if use_axis_balance and _axis_balance_pruned(d):
            pruned.append(DesignPoint(d, False, None, None, (), "axis_balance"))
        else:
            todo.append(d)

    # link limits are shared across placements; fill the cache serially so
    # every worker sees the same values
    for d in todo:
        _link_limits(scn, d, sampler, limits)

    def run(d: Design) -> DesignPoint:
        if prune:
            geom = scn.geometry(d)
            L_s_max, L_d_max = limits[(d.n_sx, d.n_sy, d.n_dx, d.n_dy, d.n_usx, d.n_usy,
                                       d.n_udx, d.n_udy, d.H_u)]
            bad = []
            if link_lengths(0.0, geom)[0] > L_s_max:
                bad.append("L_s_max")
            if link_lengths(math.pi, geom)[1] > L_d_max:
                bad.append("L_d_max")
            if d.H_u < geom.H_u_min:
                bad.append("min_height")
            if bad:
                return DesignPoint(d, False, None, None, tuple(bad), "link_length",
                                   L_s_max, L_d_max)
        return evaluate_design(d, scn, sampler, True, limits)

    from .streams import ordered_map
    results = ordered_map(run, todo, threads)
    evaluated = [r for r in results if r.pruned_by is None]
    pruned += [r for r in results if r.pruned_by is not None]
    for p in pruned:
        log.debug("pruned %s by %s", p.design, p.pruned_by)

    feasible = sorted((p for p in evaluated if p.feasible), key=DesignPoint.rank_key)
    if not feasible:
        counts: Dict[str, int] = {}
        for p in evaluated + [p for p in pruned if p.pruned_by == "link_length"]:
            for v in p.violations:
                counts[v] = counts.get(v, 0) + 1
        raise NoFeasibleDesign("no candidate satisfies all constraints",
                               n_candidates=len(candidates), n_evaluated=len(evaluated),
                               n_pruned=len(pruned), violations=counts)

    result = OptimizationResult(feasible[0], feasible, evaluated, pruned)
    if use_axis_balance:
        twin = _mirror(feasible[0].design)
        if twin != feasible[0].design and any(p.design == twin for p in pruned):
            tp = evaluate_design(twin, scn, sampler, True, limits)
            if tp.feasible and tp.rank_key() < feasible[0].rank_key():
                msg = (f"axis-balance pruning removed a better design {twin}; "
                       "repeating the search without it")
                warnings.warn(msg, RuntimeWarning)
                redo = optimize(space, scn, prune=False, threads=threads)
                redo.pruning_disabled = True
                redo.notes.append(msg)
                return redo
            result.notes.append("axis-balance check: mirrored winner is not better")
    return result


def _placement_for_Ls(scn: Scenario, L_s: float, H_u: float) -> Tuple[float, float]:
    """Circle-centre placement putting the centre at slant range ``L_s`` from the CN."""
    if L_s <= H_u:
        raise DomainError(f"L_s={L_s} must exceed H_u={H_u}")
    L_sc = math.sqrt(L_s * L_s - H_u * H_u)
    if not 0 < L_sc < scn.L_sd:
        raise DomainError(f"L_s={L_s} places the UAV outside the CN-RA span")
    return L_sc, math.sqrt((scn.L_sd - L_sc) ** 2 + H_u * H_u)


def _crossing(x, diff):
    """Linear interpolation of the first sign change of ``diff``."""
    for i in range(len(x) - 1):
        if diff[i] == 0:
            return float(x[i])
        if diff[i] * diff[i + 1] < 0:
            t = diff[i] / (diff[i] - diff[i + 1])
            return float(x[i] + t * (x[i + 1] - x[i]))
    return None


def sweep_vs_Ls(scn: Scenario, L_s_grid: Sequence[float], design: Optional[Design] = None,
                sampler: Optional[GainSampler] = None) -> SweepCurve:
    """Hop and end-to-end performance with the UAV held at the circle centre.

    Each abscissa value ``L_s`` fixes the centre placement; ``L_d`` follows
    from the CN-RA span. Also reports the interpolated L_s where the two hop
    capacities cross and the maximum hop lengths (the accepted interval).
    """
    design = design or scn.design
    sampler = sampler or scn.sampler()
    hop_s, hop_d = scn.hops(design)
    H = design.H_u
    L_s_max, L_d_max = _link_limits(scn, design, sampler)
    rows = []
    for L_s in L_s_grid:
        L_sc, L_d = _placement_for_Ls(scn, L_s, H)
        psi_s, psi_d = elevation_angle(L_s, H), elevation_angle(L_d, H)
        cs = conditional_hop_capacity(hop_s, L_s, psi_s, 0, 0, hop_index=CU_HOP,
                                      base=scn.log_base, sampler=sampler)
        cd = conditional_hop_capacity(hop_d, L_d, psi_d, 0, 0, hop_index=UR_HOP,
                                      base=scn.log_base, sampler=sampler)
        os_ = single_hop_outage(hop_s, L_s, psi_s, scn.gamma_th, 0, 0, hop_index=CU_HOP, sampler=sampler)
        od = single_hop_outage(hop_d, L_d, psi_d, scn.gamma_th, 0, 0, hop_index=UR_HOP, sampler=sampler)
        oe = conditional_outage(hop_s, hop_d, L_s, L_d, psi_s, psi_d, scn.gamma_th, 0, 0, sampler=sampler)
        accepted = int(L_s <= L_s_max and L_d <= L_d_max)
        rows.append((float(L_s), L_d, L_sc, cs.mean, cs.std_error, cd.mean, cd.std_error,
                     min(cs.mean, cd.mean), os_.probability, od.probability, oe.probability,
                     accepted))
    columns = ("L_s_m", "L_d_m", "L_sc_m", "C_su", "C_su_se", "C_du", "C_du_se", "C_e2e",
               "P_out_s", "P_out_d", "P_out_e2e", "accepted")
    x = np.array([r[0] for r in rows])
    diff = np.array([r[3] - r[5] for r in rows])
    e2e = np.array([r[7] for r in rows])
    meta = {
        "crossing_L_s_m": _crossing(x, diff),
        "argmax_e2e_L_s_m": float(x[int(np.argmax(e2e))]),
        "L_s_max_m": L_s_max,
        "L_d_max_m": L_d_max,
        "H_u_m": H,
    }
    return SweepCurve("L_s", columns, tuple(rows), meta)


def sweep_vs_flight_angle(scn: Scenario, design: Optional[Design] = None, M: Optional[int] = None,
                          sampler: Optional[GainSampler] = None) -> SweepCurve:
    """Capacity (per hop and end to end) and outage along the flight semicircle."""
    design = design or scn.design
    sampler = sampler or scn.sampler()
    M = M or scn.path_points
    geom = scn.geometry(design)
    hop_s, hop_d = scn.hops(design)
    prof = path_capacity_profile(geom, hop_s, hop_d, M, 0, 0, base=scn.log_base, sampler=sampler)
    rows = []
    for j, th in enumerate(prof.thetas):
        out = path_point_outage(geom, hop_s, hop_d, float(th), scn.gamma_th, 0, 0, sampler=sampler)
        rows.append((float(th), float(prof.L_s[j]), float(prof.L_d[j]),
                     float(prof.c_su[j]), float(prof.se_su[j]),
                     float(prof.c_du[j]), float(prof.se_du[j]),
                     float(min(prof.c_su[j], prof.c_du[j])), out.probability))
    columns = ("theta_R1_rad", "L_s_m", "L_d_m", "C_su", "C_su_se", "C_du", "C_du_se",
               "C_e2e", "P_out_e2e")
    dLs = np.abs(np.diff(prof.L_s) / np.diff(prof.thetas))
    meta = {
        "trapezoid_mean": prof.average.mean,
        "trapezoid_std_error": prof.average.std_error,
        "average_of_min": prof.average_of_min,
        "dLs_dtheta_max_over_min": float(dLs.max() / dLs.min()),
        "L_sc_m": design.L_sc,
        "H_u_m": design.H_u,
    }
    return SweepCurve("theta_R1", columns, tuple(rows), meta)


def sweep_vs_uav_elements(scn: Scenario, values: Sequence[int], axis: str = "x",
                          design: Optional[Design] = None,
                          sampler: Optional[GainSampler] = None) -> SweepCurve:
    """Path-averaged capacity and feasibility versus the UAV element count on one axis.

    Both UAV arrays change together.
    """
    if axis not in ("x", "y"):
        raise DomainError(f"axis must be 'x' or 'y', got {axis!r}")
    design = design or scn.design
    sampler = sampler or scn.sampler()
    rows = []
    for v in values:
        d = (replace(design, n_usx=v, n_udx=v) if axis == "x"
             else replace(design, n_usy=v, n_udy=v))
        p = evaluate_design(d, scn, sampler)
        rows.append((int(v), p.avg_capacity.mean, p.avg_capacity.std_error, p.worst_outage,
                     p.L_s_max, p.L_d_max, int(p.feasible)))
    kind = "N_uqx" if axis == "x" else "N_uqy"
    columns = (kind, "C_e2e_avg", "C_e2e_avg_se", "P_out_worst", "L_s_max_m", "L_d_max_m",
               "feasible")
    return SweepCurve(kind, columns, tuple(rows), {"H_u_m": design.H_u, "L_sc_m": design.L_sc})
