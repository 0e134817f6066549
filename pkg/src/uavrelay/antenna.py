"""Planar array gain under pointing error.

Each terminal carries an N_x x N_y uniform rectangular array. The gain seen
along the link is the broadside array gain N_x*N_y, times the single element
pattern, times the squared per-axis Dirichlet kernels evaluated at the
misalignment direction. All functions broadcast over numpy arrays so a whole
batch of Monte Carlo draws is evaluated in one call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError

ArrayLike = Union[float, np.ndarray]

_KERNEL_EPS = 1e-12


@dataclass(frozen=True)
class ArrayConfig:
    N_x: int
    N_y: int
    d_x: float
    d_y: float
    beta_x: float = 0.0
    beta_y: float = 0.0

    def __post_init__(self):
        if int(self.N_x) != self.N_x or int(self.N_y) != self.N_y or self.N_x < 1 or self.N_y < 1:
            raise DomainError(f"element counts must be integers >= 1, got {self.N_x}x{self.N_y}")
        if not (self.d_x > 0 and self.d_y > 0):
            raise DomainError("element spacings must be > 0")

    @property
    def broadside_gain(self) -> int:
        return int(self.N_x) * int(self.N_y)


@dataclass(frozen=True)
class MisalignmentStats:
    """Per-axis Gaussian pointing error (radians).

    A zero sigma is accepted and means a deterministic offset at the mean.
    """

    mu_x: float
    mu_y: float
    sigma_x: float
    sigma_y: float

    def __post_init__(self):
        if self.sigma_x < 0 or self.sigma_y < 0:
            raise DomainError("misalignment standard deviations must be >= 0")

    @classmethod
    def from_degrees(cls, mu_x, mu_y, sigma_x, sigma_y):
        r = math.radians
        return cls(r(mu_x), r(mu_y), r(sigma_x), r(sigma_y))


@dataclass(frozen=True)
class Antenna:
    """An array together with the statistics of its pointing error."""

    array: ArrayConfig
    misalignment: MisalignmentStats


@dataclass(frozen=True)
class ElementPattern:
    """3GPP-style single element pattern.

    ``azimuth_offset`` rotates the mapping of the misalignment azimuth onto
    the pattern cuts; at 0 the x axis of the array is the horizontal cut.
    """

    g_max_dbi: float = 8.0
    theta_3db: float = math.radians(65.0)
    phi_3db: float = math.radians(65.0)
    a_m_db: float = 30.0
    sla_db: float = 30.0
    azimuth_offset: float = 0.0


@dataclass(frozen=True)
class PointingSample:
    theta_x: ArrayLike
    theta_y: ArrayLike
    theta_xy: ArrayLike
    phi: ArrayLike


def pointing_from_axes(theta_x, theta_y) -> PointingSample:
    """Combine the two per-axis tilts into a polar offset and its azimuth."""
    tx = np.asarray(theta_x, dtype=float)
    ty = np.asarray(theta_y, dtype=float)
    if np.any(np.abs(tx) >= math.pi / 2) or np.any(np.abs(ty) >= math.pi / 2):
        raise DomainError("misalignment angles must satisfy |theta| < pi/2")
    tan_x, tan_y = np.tan(tx), np.tan(ty)
    theta_xy = np.arctan(np.hypot(tan_x, tan_y))
    phi = np.arctan2(tan_y, tan_x)
    if tx.ndim == 0 and ty.ndim == 0:
        return PointingSample(float(tx), float(ty), float(theta_xy), float(phi))
    return PointingSample(tx, ty, theta_xy, phi)


def element_gain_db(p: PointingSample, pattern: ElementPattern = ElementPattern()):
    """Element gain in dBi for the direction described by ``p``."""
    phi = np.asarray(p.phi) - pattern.azimuth_offset
    tan_xy = np.tan(np.asarray(p.theta_xy))
    horiz = np.arctan(tan_xy * np.cos(phi))
    vert = np.arctan(tan_xy * np.sin(phi))
    a_v = np.minimum(12.0 * (vert / pattern.theta_3db) ** 2, pattern.sla_db)
    a_h = np.minimum(12.0 * (horiz / pattern.phi_3db) ** 2, pattern.a_m_db)
    return pattern.g_max_dbi - np.minimum(a_v + a_h, pattern.a_m_db)


def element_gain(p: PointingSample, pattern: ElementPattern = ElementPattern()):
    """Element power gain, linear."""
    out = 10.0 ** (element_gain_db(p, pattern) / 10.0)
    return float(out) if np.ndim(out) == 0 else out


def dirichlet(N: int, u):
    """sin(N u/2) / (N sin(u/2)), with the removable singularity filled in."""
    u = np.asarray(u, dtype=float)
    half = 0.5 * u
    s = np.sin(half)
    small = np.abs(s) < _KERNEL_EPS
    safe = np.where(small, 1.0, s)
    regular = np.sin(N * half) / (N * safe)
    # limit of the ratio where sin(u/2) -> 0
    limit = np.cos(N * half) / np.cos(half)
    out = np.where(small, limit, regular)
    return float(out) if out.ndim == 0 else out


def array_factor_axis(N: int, d: float, k: float, beta: float, psi_arg):
    """Normalised amplitude factor of an N-element line array.

    ``psi_arg`` is the direction-cosine-like projection of the offset on the
    array axis (sin(theta_xy)*cos(phi) for x); the inter-element phase is
    ``k*d*psi_arg + beta``.
    """
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if N == 1:
        return np.ones_like(np.asarray(psi_arg, dtype=float)) if np.ndim(psi_arg) else 1.0
    return dirichlet(N, k * d * np.asarray(psi_arg, dtype=float) + beta)


def composite_gain(cfg: ArrayConfig, p: PointingSample, k: float,
                   pattern: ElementPattern = ElementPattern()):
    """Linear power gain of the array toward the misaligned link direction."""
    s = np.sin(np.asarray(p.theta_xy))
    phi = np.asarray(p.phi)
    af_x = array_factor_axis(cfg.N_x, cfg.d_x, k, cfg.beta_x, s * np.cos(phi))
    af_y = array_factor_axis(cfg.N_y, cfg.d_y, k, cfg.beta_y, s * np.sin(phi))
    g = cfg.broadside_gain * element_gain(p, pattern) * np.square(af_x) * np.square(af_y)
    return float(g) if np.ndim(g) == 0 else g


def gain_from_angles(cfg: ArrayConfig, theta_x, theta_y, k: float,
                     pattern: ElementPattern = ElementPattern()):
    """Shortcut: :func:`composite_gain` of :func:`pointing_from_axes`."""
    return composite_gain(cfg, pointing_from_axes(theta_x, theta_y), k, pattern)
