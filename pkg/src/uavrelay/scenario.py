"""A fully resolved simulation scenario in SI units.

:class:`Scenario` bundles everything that stays fixed while a design is
varied. :class:`Design` holds the decision variables: element counts of the
four arrays, UAV altitude, and circle placement.
"""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass, field, fields, replace
from typing import Optional, Tuple

from .antenna import Antenna, ArrayConfig, ElementPattern, MisalignmentStats
from .atmosphere import AtmosphereParams, CarrierPlan
from .geometry import PathGeometry
from .link import HopConfig, noise_power_w
from .montecarlo import GainSampler


@dataclass(frozen=True, order=True)
class Design:
    n_sx: int = 18
    n_sy: int = 18
    n_dx: int = 18
    n_dy: int = 18
    n_usx: int = 12
    n_usy: int = 18
    n_udx: int = 12
    n_udy: int = 18
    H_u: float = 3000.0
    L_sc: float = 13000.0

    @property
    def n_total(self) -> int:
        return (self.n_sx * self.n_sy + self.n_dx * self.n_dy
                + self.n_usx * self.n_usy + self.n_udx * self.n_udy)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def key(self) -> Tuple:
        return astuple(self)


@dataclass(frozen=True)
class Scenario:
    carrier: CarrierPlan = CarrierPlan(70.0)
    atmosphere: Optional[AtmosphereParams] = AtmosphereParams()
    element: ElementPattern = ElementPattern()
    p_ts: float = 1.0
    p_td: float = 0.2
    noise_power: float = field(default_factory=noise_power_w)
    spacing_wl: float = 0.5
    beta: float = 0.0
    ground_stats: MisalignmentStats = MisalignmentStats.from_degrees(0.3, 0.3, 0.5, 0.5)
    uav_stats: MisalignmentStats = MisalignmentStats.from_degrees(1.7, 1.0, 1.5, 0.5)
    L_sd: float = 19_000.0
    L_u1: float = 3_500.0
    psi_s_min: float = math.radians(10.0)
    psi_d_min: float = math.radians(15.0)
    gamma_th: float = 10 ** 0.1
    p_out_tr: float = 1e-3
    design: Design = Design()
    n_samples: int = 100_000
    seed: int = 1
    path_points: int = 181
    threads: int = 1
    strict_truncation: bool = False
    log_base: float = 2.0
    L_search_max: float = 100_000.0

    def array(self, N_x: int, N_y: int) -> ArrayConfig:
        d = self.carrier.spacing(self.spacing_wl)
        return ArrayConfig(N_x, N_y, d, d, self.beta, self.beta)

    def hops(self, design: Optional[Design] = None) -> Tuple[HopConfig, HopConfig]:
        """CU and UR hop configurations for ``design``."""
        d = design or self.design
        atm = self.atmosphere
        g_s = atm.ground_height_s if atm else 0.0
        g_d = atm.ground_height_d if atm else 0.0
        hop_s = HopConfig(
            self.p_ts, self.noise_power,
            Antenna(self.array(d.n_sx, d.n_sy), self.ground_stats),
            Antenna(self.array(d.n_usx, d.n_usy), self.uav_stats),
            self.carrier, atm, self.element, g_s)
        hop_d = HopConfig(
            self.p_td, self.noise_power,
            Antenna(self.array(d.n_dx, d.n_dy), self.ground_stats),
            Antenna(self.array(d.n_udx, d.n_udy), self.uav_stats),
            self.carrier, atm, self.element, g_d)
        return hop_s, hop_d

    def geometry(self, design: Optional[Design] = None) -> PathGeometry:
        d = design or self.design
        return PathGeometry(self.L_sd, self.L_u1, d.L_sc, d.H_u, self.psi_s_min, self.psi_d_min)

    def sampler(self, n: Optional[int] = None, threads: Optional[int] = None) -> GainSampler:
        return GainSampler(self.seed, n or self.n_samples,
                           threads=self.threads if threads is None else threads,
                           strict_truncation=self.strict_truncation)

    def with_design(self, **changes) -> "Scenario":
        return replace(self, design=replace(self.design, **changes))
