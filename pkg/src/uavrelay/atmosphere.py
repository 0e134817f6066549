"""Atmospheric absorption and total path loss.

Sea-level oxygen and water-vapour attenuation use the closed-form ITU
approximations valid below 350 GHz at 20 degC. Absorber density decays
exponentially with height, and slant links integrate that profile in
closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0  # m/s
F_MAX_GHZ = 350.0


@dataclass(frozen=True)
class AtmosphereParams:
    """Standard-atmosphere inputs.

    Heights are in km above sea level; ``rho0`` is the sea-level water-vapour
    density in g/m^3.
    """

    rho0: float = 7.5
    h_scale: float = 1.5
    ground_height_s: float = 0.0
    ground_height_d: float = 0.0

    def __post_init__(self):
        if not self.rho0 > 0:
            raise DomainError(f"rho0 must be > 0 g/m^3, got {self.rho0}")
        if not self.h_scale > 0:
            raise DomainError(f"h_scale must be > 0 km, got {self.h_scale}")
        if self.ground_height_s < 0 or self.ground_height_d < 0:
            raise DomainError("ground heights must be >= 0 km")


@dataclass(frozen=True)
class CarrierPlan:
    f_c: float  # GHz

    def __post_init__(self):
        _check_frequency(self.f_c)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / (self.f_c * 1e9)

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    def spacing(self, wavelengths: float = 0.5) -> float:
        """Element spacing in metres for a spacing given in wavelengths."""
        return wavelengths * self.wavelength


def _check_frequency(f_c):
    f = np.asarray(f_c, dtype=float)
    if np.any(~(f > 0)) or np.any(f >= F_MAX_GHZ):
        raise DomainError(
            f"carrier frequency must lie in (0, {F_MAX_GHZ:g}) GHz, got {f_c}")


def _oxygen_branch_low(f):
    return 0.001 * f * f * (6.09 / (f * f + 0.227) + 4.81 / ((f - 57.0) ** 2 + 1.5))


_OXYGEN_AT_57 = _oxygen_branch_low(57.0)


def oxygen_attn_sea_level(f_c):
    """Oxygen specific attenuation at sea level (dB/km).

    Three-branch piecewise approximation. The middle branch (57-63 GHz) is a
    linear ramp anchored at the low branch's value at 57 GHz. Note the
    approximation is *not* continuous at 63 GHz (about 4.5 dB/km jump).
    Accepts scalars or arrays.
    """
    _check_frequency(f_c)
    f = np.asarray(f_c, dtype=float)
    high = 0.001 * f * f * (4.13 / ((f - 63.0) ** 2 + 1.1)
                            + 0.19 / ((f - 118.7) ** 2 + 2.0))
    out = np.where(f < 57.0, _oxygen_branch_low(f),
                   np.where(f < 63.0, _OXYGEN_AT_57 + 1.5 * (f - 57.0), high))
    return float(out) if out.ndim == 0 else out


def water_attn_sea_level(f_c, rho0=7.5):
    """Water-vapour specific attenuation at sea level (dB/km), linear in ``rho0``."""
    _check_frequency(f_c)
    if np.any(np.asarray(rho0) < 0):
        raise DomainError(f"rho0 must be >= 0 g/m^3, got {rho0}")
    f = np.asarray(f_c, dtype=float)
    out = 0.0001 * f * f * rho0 * (
        0.05
        + 3.6 / ((f - 22.2) ** 2 + 8.5)
        + 10.6 / ((f - 183.3) ** 2 + 9.0)
        + 8.9 / ((f - 325.4) ** 2 + 26.3)
    )
    return float(out) if np.ndim(out) == 0 else out


def sea_level_attn(f_c, atm: AtmosphereParams = AtmosphereParams()):
    """Combined oxygen + water specific attenuation at sea level (dB/km)."""
    return oxygen_attn_sea_level(f_c) + water_attn_sea_level(f_c, atm.rho0)


def specific_attn_at_height(f_c, H, atm: AtmosphereParams = AtmosphereParams()):
    """Specific attenuation (dB/km) at height ``H`` km above sea level."""
    if np.any(np.asarray(H) < 0):
        raise DomainError(f"height must be >= 0 km, got {H}")
    return sea_level_attn(f_c, atm) * np.exp(-np.asarray(H, dtype=float) / atm.h_scale)


def slant_attn_total(f_c, H1, H2, psi, atm: AtmosphereParams = AtmosphereParams()):
    """Total absorption (dB) along a straight slant path from ``H1`` to ``H2`` km.

    ``psi`` is the elevation angle in radians. The exponential profile is
    integrated in closed form, so the result is an attenuation in dB, not a
    rate.
    """
    if not 0 <= H1 < H2:
        raise DomainError(f"need 0 <= H1 < H2 (km), got H1={H1}, H2={H2}")
    if not 0 < psi <= math.pi / 2:
        raise DomainError(
            f"elevation must be in (0, pi/2] rad, got {psi}; "
            "use the horizontal form for psi = 0")
    hs = atm.h_scale
    column = math.exp(-H1 / hs) - math.exp(-H2 / hs)
    return sea_level_attn(f_c, atm) * column * hs / math.sin(psi)


def free_space_loss_db(f_c, L):
    """Free-space spreading loss 20*log10(4*pi*L/lambda) in dB."""
    lam = SPEED_OF_LIGHT / (np.asarray(f_c, dtype=float) * 1e9)
    return 20.0 * np.log10(4.0 * math.pi * np.asarray(L, dtype=float) / lam)


def total_path_loss_db(
    f_c: float,
    L: float,
    slant: Optional[Tuple[float, float, float]] = None,
    atm: Optional[AtmosphereParams] = AtmosphereParams(),
) -> float:
    """Free-space loss plus gaseous absorption for a link of length ``L`` metres.

    ``slant`` is ``(H1_km, H2_km, psi_rad)``; without it the link is treated
    as horizontal at sea level. Passing ``atm=None`` drops the absorption
    term entirely.
    """
    if not L > 0:
        raise DomainError(f"link length must be > 0 m, got {L}")
    _check_frequency(f_c)
    loss = float(free_space_loss_db(f_c, L))
    if atm is None:
        return loss
    if slant is None:
        return loss + sea_level_attn(f_c, atm) * L / 1000.0
    H1, H2, psi = slant
    return loss + slant_attn_total(f_c, H1, H2, psi, atm)


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)
