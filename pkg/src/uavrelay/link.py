"""Per-hop SNR, capacity, and decode-and-forward combination."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .antenna import Antenna, ElementPattern, PointingSample, composite_gain
from .atmosphere import AtmosphereParams, CarrierPlan, total_path_loss_db
from .errors import DomainError

THERMAL_NOISE_DBM_HZ = -174.0


def noise_power_w(bandwidth_hz: float = 1e9, noise_figure_db: float = 10.0,
                  psd_dbm_hz: float = THERMAL_NOISE_DBM_HZ) -> float:
    """Receiver noise power in watts (thermal density x bandwidth x noise figure)."""
    if bandwidth_hz <= 0:
        raise DomainError("bandwidth must be > 0 Hz")
    dbm = psd_dbm_hz + 10.0 * math.log10(bandwidth_hz) + noise_figure_db
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class HopConfig:
    """One hop of the relay: a ground array talking to one UAV array.

    ``ground_height`` is the terminal's height above sea level in km; it is the
    lower end of the slant absorption integral. ``atmosphere=None`` keeps only
    free-space loss.
    """

    tx_power: float
    noise_power: float
    ground: Antenna
    uav: Antenna
    carrier: CarrierPlan
    atmosphere: Optional[AtmosphereParams] = AtmosphereParams()
    element: ElementPattern = ElementPattern()
    ground_height: float = 0.0

    def __post_init__(self):
        if not self.tx_power > 0:
            raise DomainError(f"tx_power must be > 0 W, got {self.tx_power}")
        if not self.noise_power > 0:
            raise DomainError(f"noise_power must be > 0 W, got {self.noise_power}")


@dataclass(frozen=True)
class SnrRealization:
    gamma: float
    ground_pointing: PointingSample
    uav_pointing: PointingSample


def path_loss_db(hop: HopConfig, L: float, psi: float) -> float:
    """Total loss for a link of length ``L`` m at elevation ``psi`` rad.

    The UAV end sits ``L*sin(psi)`` above the ground terminal; ``psi == 0``
    falls back to the horizontal sea-level form.
    """
    if not L > 0:
        raise DomainError(f"link length must be > 0 m, got {L}")
    slant = None
    if psi > 0:
        h1 = hop.ground_height
        slant = (h1, h1 + L * math.sin(psi) / 1000.0, psi)
    return total_path_loss_db(hop.carrier.f_c, L, slant, hop.atmosphere)


def snr_scale(hop: HopConfig, L: float, psi: float) -> float:
    """Deterministic part of the SNR: P_t * h_L / sigma_n^2 (antenna gains excluded)."""
    return hop.tx_power * 10.0 ** (-path_loss_db(hop, L, psi) / 10.0) / hop.noise_power


def hop_snr(hop: HopConfig, L: float, psi: float,
            ground_p: PointingSample, uav_p: PointingSample) -> SnrRealization:
    k = hop.carrier.wavenumber
    g_ground = composite_gain(hop.ground.array, ground_p, k, hop.element)
    g_uav = composite_gain(hop.uav.array, uav_p, k, hop.element)
    gamma = snr_scale(hop, L, psi) * g_ground * g_uav
    return SnrRealization(gamma, ground_p, uav_p)


def instantaneous_capacity(gamma, base: float = 2.0):
    """Spectral efficiency log_base(1 + gamma); bits/s/Hz for the default base."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise DomainError("SNR must be >= 0")
    c = np.log2(1.0 + g) if base == 2 else np.log1p(g) / math.log(base)
    return float(c) if c.ndim == 0 else c


def e2e_snr(gamma_cu, gamma_ur):
    """End-to-end SNR of a decode-and-forward relay: the weaker hop."""
    return np.minimum(gamma_cu, gamma_ur)
