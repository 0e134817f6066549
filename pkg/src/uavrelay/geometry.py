"""Circular flight path of the relay and the resulting link geometry.

Coordinates: the circle centre B_p is the origin of the horizontal plane,
the CN lies at x = -L_sc and the RA at x = +L_dc. The UAV flies the
semicircle from B_p1 = (L_u1/2, 0) to B_p2 = (-L_u1/2, 0); the other half
of the circle is its mirror image in y and produces identical link lengths.
All lengths are metres, angles radians.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Tuple

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class PathGeometry:
    L_sd: float
    L_u1: float
    L_sc: float
    H_u: float
    psi_s_min: float = 0.0
    psi_d_min: float = 0.0

    def __post_init__(self):
        if not 0 < self.L_u1 < self.L_sd:
            raise DomainError(f"need 0 < L_u1 < L_sd, got L_u1={self.L_u1}, L_sd={self.L_sd}")
        if not 0 < self.L_sc < self.L_sd:
            raise DomainError(f"need 0 < L_sc < L_sd, got L_sc={self.L_sc}")
        if not self.H_u > 0:
            raise DomainError(f"H_u must be > 0 m, got {self.H_u}")
        for name in ("psi_s_min", "psi_d_min"):
            v = getattr(self, name)
            if not 0 <= v < math.pi / 2:
                raise DomainError(f"{name} must be in [0, pi/2), got {v}")

    @property
    def L_dc(self) -> float:
        return self.L_sd - self.L_sc

    @property
    def H_u_min(self) -> float:
        return min_height(self.L_sc, self.L_dc, self.L_u1, self.psi_s_min, self.psi_d_min)

    def with_placement(self, L_sc=None, H_u=None) -> "PathGeometry":
        changes = {}
        if L_sc is not None:
            changes["L_sc"] = L_sc
        if H_u is not None:
            changes["H_u"] = H_u
        return replace(self, **changes)


@dataclass(frozen=True)
class PathPoint:
    theta_R1: float
    x_u: float
    y_u: float
    L_s: float
    L_d: float
    psi_s: float
    psi_d: float


def uav_position(theta_R1, L_u1):
    """Horizontal UAV position on the semicircle, relative to the centre."""
    th = np.asarray(theta_R1, dtype=float)
    if np.any(th < 0) or np.any(th > math.pi):
        raise DomainError(f"theta_R1 must lie in [0, pi], got {theta_R1}")
    r = L_u1 / 2.0
    x, y = r * np.cos(th), r * np.sin(th)
    if th.ndim == 0:
        return float(x), float(y)
    return x, y


def link_lengths(theta_R1, geom: PathGeometry):
    """Slant lengths CN-UAV and UAV-RA at path angle ``theta_R1``."""
    x, y = uav_position(theta_R1, geom.L_u1)
    H2 = geom.H_u ** 2
    L_s = np.sqrt((geom.L_sc + x) ** 2 + y ** 2 + H2)
    L_d = np.sqrt((geom.L_dc - x) ** 2 + y ** 2 + H2)
    if np.ndim(L_s) == 0:
        return float(L_s), float(L_d)
    return L_s, L_d


def elevation_angle(L, H_u):
    """Elevation of a straight link of length ``L`` climbing ``H_u``."""
    L = np.asarray(L, dtype=float)
    if not H_u > 0:
        raise DomainError(f"H_u must be > 0, got {H_u}")
    if np.any(L < H_u):
        raise DomainError(f"link length {L} shorter than height {H_u}")
    out = np.arcsin(np.minimum(H_u / L, 1.0))
    return float(out) if out.ndim == 0 else out


def min_height(L_sc, L_dc, L_u1, psi_s_min, psi_d_min) -> float:
    """Lowest altitude keeping both terminals above their minimum elevation.

    The requirement is taken at the far edge of the circle for each
    terminal, ``(L_qc + L_u1/2) * sin(psi_q_min)``.
    """
    for v in (psi_s_min, psi_d_min):
        if not 0 <= v < math.pi / 2:
            raise DomainError(f"minimum elevation must be in [0, pi/2), got {v}")
    if L_sc <= 0 or L_dc <= 0 or L_u1 <= 0:
        raise DomainError("horizontal distances must be positive")
    return max((L_sc + L_u1 / 2.0) * math.sin(psi_s_min),
               (L_dc + L_u1 / 2.0) * math.sin(psi_d_min))


def path_profile(geom: PathGeometry, M: int) -> List[PathPoint]:
    """``M`` uniformly spaced points over the semicircle, endpoints included."""
    if M < 2:
        raise DomainError(f"need at least 2 path points, got {M}")
    thetas = np.linspace(0.0, math.pi, M)
    xs, ys = uav_position(thetas, geom.L_u1)
    L_s, L_d = link_lengths(thetas, geom)
    psi_s = elevation_angle(L_s, geom.H_u)
    psi_d = elevation_angle(L_d, geom.H_u)
    return [PathPoint(float(t), float(x), float(y), float(a), float(b), float(c), float(d))
            for t, x, y, a, b, c, d in zip(thetas, xs, ys, L_s, L_d, psi_s, psi_d)]


def path_arrays(geom: PathGeometry, M: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised form of :func:`path_profile`: ``(thetas, L_s, L_d)``."""
    if M < 2:
        raise DomainError(f"need at least 2 path points, got {M}")
    thetas = np.linspace(0.0, math.pi, M)
    L_s, L_d = link_lengths(thetas, geom)
    return thetas, L_s, L_d


def trapezoid_weights(M: int) -> np.ndarray:
    """Weights w with sum(w) = 1 so that sum(w*f) approximates (1/pi) * integral over [0, pi]."""
    w = np.full(M, 1.0 / (M - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    return w
