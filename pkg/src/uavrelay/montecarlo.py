"""Monte Carlo estimators for capacity, outage, and maximum link length.

Antenna pointing errors are the only randomness in the model. Antenna gains
do not depend on link length, so each hop's gain draws are generated once
per ``(seed, hop, antenna)`` and reused at every link length, path angle,
and design point (common random numbers). Estimates are therefore smooth and
exactly monotone in the deterministic inputs, and repeated evaluations cost
one multiply and one log per sample.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .antenna import Antenna, ElementPattern, MisalignmentStats, PointingSample, composite_gain, pointing_from_axes
from .errors import DomainError, InfeasibleError, NumericalError
from .geometry import PathGeometry, elevation_angle, link_lengths, path_arrays, trapezoid_weights
from .link import HopConfig, snr_scale
from .streams import CHUNK_SIZE, chunk_bounds, ordered_map, stream

CU_HOP, UR_HOP = 0, 1
_GROUND, _UAV = 0, 1
_MAX_REDRAWS = 10_000


@dataclass(frozen=True)
class EstimatorResult:
    mean: float
    std_error: float
    n_samples: int
    seed: int


@dataclass(frozen=True)
class OutageEstimate:
    probability: float
    n_samples: int
    n_failures: int
    seed: int
    gamma_th: float
    theta_R1: Optional[float] = None

    @property
    def std_error(self) -> float:
        p = self.probability
        return math.sqrt(p * (1.0 - p) / self.n_samples)


def _draw_axis(rng, mu, sigma, size, strict):
    lo = 0.0 if strict else -math.pi / 2

    def bad(t):
        return (t < lo) | (t <= -math.pi / 2) | (t >= math.pi / 2)

    t = mu + sigma * rng.standard_normal(size)
    mask = bad(t)
    tries = 0
    while np.any(mask):
        if sigma == 0 or tries >= _MAX_REDRAWS:
            raise DomainError(
                f"misalignment N({mu:.4g}, {sigma:.4g}^2) has (almost) no mass in the allowed range")
        t[mask] = mu + sigma * rng.standard_normal(int(mask.sum()))
        mask = bad(t)
        tries += 1
    return t


def sample_misalignment(stats: MisalignmentStats, rng: np.random.Generator,
                        size: int = 1, strict: bool = False) -> PointingSample:
    """Draw independent Gaussian tilts about both array axes.

    Draws with ``|theta| >= pi/2`` are redrawn. With ``strict`` the support is
    further restricted to ``[0, pi/2)``, which reproduces integrating each
    angle over the positive quadrant only.
    """
    tx = _draw_axis(rng, stats.mu_x, stats.sigma_x, size, strict)
    ty = _draw_axis(rng, stats.mu_y, stats.sigma_y, size, strict)
    return pointing_from_axes(tx, ty)


class GainSampler:
    """Cached antenna gain draws for one ``(seed, n)`` pair.

    Thread-safe; the cache key includes everything the gains depend on, so a
    single sampler can serve a whole design sweep.
    """

    def __init__(self, seed: int, n: int, threads: int = 1,
                 strict_truncation: bool = False, chunk_size: int = CHUNK_SIZE):
        if n < 1:
            raise DomainError(f"sample count must be >= 1, got {n}")
        self.seed = int(seed)
        self.n = int(n)
        self.threads = threads
        self.strict_truncation = strict_truncation
        self.chunk_size = chunk_size
        self._cache: Dict[tuple, np.ndarray] = {}
        self._lock = threading.Lock()

    def chunks(self):
        return chunk_bounds(self.n, self.chunk_size)

    def antenna_gains(self, antenna: Antenna, k: float, pattern: ElementPattern,
                      key: Tuple[int, ...]) -> np.ndarray:
        ckey = ("ant", key, antenna, k, pattern)
        with self._lock:
            hit = self._cache.get(ckey)
        if hit is not None:
            return hit

        def work(chunk):
            idx, start, stop = chunk
            rng = stream(self.seed, *key, idx)
            p = sample_misalignment(antenna.misalignment, rng, stop - start, self.strict_truncation)
            return np.asarray(composite_gain(antenna.array, p, k, pattern), dtype=float)

        gains = np.concatenate(ordered_map(work, self.chunks(), self.threads))
        gains.setflags(write=False)
        with self._lock:
            self._cache.setdefault(ckey, gains)
        return gains

    def hop_gains(self, hop: HopConfig, hop_index: int) -> np.ndarray:
        """Product of ground and UAV array gains for every draw of one hop."""
        k = hop.carrier.wavenumber
        ckey = ("hop", hop_index, hop.ground, hop.uav, k, hop.element)
        with self._lock:
            hit = self._cache.get(ckey)
        if hit is not None:
            return hit
        g = (self.antenna_gains(hop.ground, k, hop.element, (hop_index, _GROUND))
             * self.antenna_gains(hop.uav, k, hop.element, (hop_index, _UAV)))
        g.setflags(write=False)
        with self._lock:
            self._cache.setdefault(ckey, g)
        return g


def _get_sampler(sampler, seed, n, threads, strict):
    if sampler is not None:
        return sampler
    return GainSampler(seed, n, threads=threads, strict_truncation=strict)


def _capacity(gamma, base):
    return np.log2(1.0 + gamma) if base == 2 else np.log1p(gamma) / math.log(base)


def _combine(a, b):
    """Merge (count, mean, m2) moment triples; works elementwise on arrays."""
    na, ma, m2a = a
    nb, mb, m2b = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * (nb / n), m2a + m2b + delta * delta * (na * nb / n)


def _se(m2, n):
    return np.sqrt(np.maximum(m2, 0.0) / (n - 1) / n) if n > 1 else np.zeros_like(m2)


def conditional_hop_capacity(hop: HopConfig, L: float, psi: float, n: int, seed: int, *,
                             hop_index: int = CU_HOP, threads: int = 1,
                             strict_truncation: bool = False, base: float = 2.0,
                             sampler: Optional[GainSampler] = None) -> EstimatorResult:
    """Mean capacity of one hop at fixed geometry, averaged over pointing errors."""
    s = _get_sampler(sampler, seed, n, threads, strict_truncation)
    if s.n < 100:
        raise DomainError(f"need n >= 100 samples, got {s.n}")
    c = _capacity(snr_scale(hop, L, psi) * s.hop_gains(hop, hop_index), base)
    if c.min() == c.max():
        return EstimatorResult(float(c[0]), 0.0, s.n, s.seed)
    return EstimatorResult(float(c.mean()), float(c.std(ddof=1) / math.sqrt(s.n)), s.n, s.seed)


@dataclass(frozen=True)
class PathCapacityProfile:
    """Per-angle hop capacities over the semicircle and their path average.

    ``average`` is the trapezoid mean of min(C_su, C_du); ``average_of_min``
    averages the instantaneous minimum instead and can never exceed it.
    """

    thetas: np.ndarray
    L_s: np.ndarray
    L_d: np.ndarray
    c_su: np.ndarray
    c_du: np.ndarray
    se_su: np.ndarray
    se_du: np.ndarray
    average: EstimatorResult
    average_of_min: float

    @property
    def c_e2e(self) -> np.ndarray:
        return np.minimum(self.c_su, self.c_du)


def path_capacity_profile(geom: PathGeometry, hop_s: HopConfig, hop_d: HopConfig,
                          M: int, n: int, seed: int, *, threads: int = 1,
                          strict_truncation: bool = False, base: float = 2.0,
                          sampler: Optional[GainSampler] = None) -> PathCapacityProfile:
    s = _get_sampler(sampler, seed, n, threads, strict_truncation)
    if s.n < 100:
        raise DomainError(f"need n >= 100 samples, got {s.n}")
    thetas, L_s, L_d = path_arrays(geom, M)
    psi_s = elevation_angle(L_s, geom.H_u)
    psi_d = elevation_angle(L_d, geom.H_u)
    a_s = np.array([snr_scale(hop_s, L, p) for L, p in zip(L_s, psi_s)])
    a_d = np.array([snr_scale(hop_d, L, p) for L, p in zip(L_d, psi_d)])
    g_s = s.hop_gains(hop_s, CU_HOP)
    g_d = s.hop_gains(hop_d, UR_HOP)
    w = trapezoid_weights(M)

    def first_pass(chunk):
        _, lo, hi = chunk
        gs, gd = g_s[lo:hi], g_d[lo:hi]
        m = hi - lo
        out = np.empty((5, M))
        for j in range(M):
            cs = _capacity(a_s[j] * gs, base)
            cd = _capacity(a_d[j] * gd, base)
            ms, md = cs.mean(), cd.mean()
            out[:, j] = (ms, np.square(cs - ms).sum(), md, np.square(cd - md).sum(),
                         np.minimum(cs, cd).sum())
        return m, out

    parts = ordered_map(first_pass, s.chunks(), s.threads)
    m0, acc = parts[0]
    st_s = (m0, acc[0], acc[1])
    st_d = (m0, acc[2], acc[3])
    min_sum = acc[4].copy()
    for m, out in parts[1:]:
        st_s = _combine(st_s, (m, out[0], out[1]))
        st_d = _combine(st_d, (m, out[2], out[3]))
        min_sum += out[4]
    c_su, c_du = st_s[1], st_d[1]
    use_s = c_su <= c_du

    def second_pass(chunk):
        _, lo, hi = chunk
        gs, gd = g_s[lo:hi], g_d[lo:hi]
        y = np.zeros(hi - lo)
        for j in range(M):
            if use_s[j]:
                y += w[j] * _capacity(a_s[j] * gs, base)
            else:
                y += w[j] * _capacity(a_d[j] * gd, base)
        my = y.mean()
        return hi - lo, my, float(np.square(y - my).sum())

    parts = ordered_map(second_pass, s.chunks(), s.threads)
    st_y = parts[0]
    for p in parts[1:]:
        st_y = _combine(st_y, p)

    avg = float(np.dot(w, np.minimum(c_su, c_du)))
    result = EstimatorResult(avg, float(_se(st_y[2], s.n)), s.n, s.seed)
    return PathCapacityProfile(
        thetas=thetas, L_s=L_s, L_d=L_d, c_su=c_su, c_du=c_du,
        se_su=_se(st_s[2], s.n), se_du=_se(st_d[2], s.n),
        average=result, average_of_min=float(np.dot(w, min_sum / s.n)),
    )


def e2e_avg_capacity(geom: PathGeometry, hop_s: HopConfig, hop_d: HopConfig,
                     M: int, n: int, seed: int, **kwargs) -> EstimatorResult:
    """Flight-path average of the end-to-end capacity (trapezoid rule in theta_R1)."""
    return path_capacity_profile(geom, hop_s, hop_d, M, n, seed, **kwargs).average


def single_hop_outage(hop: HopConfig, L: float, psi: float, gamma_th: float, n: int, seed: int,
                      *, hop_index: int = CU_HOP, threads: int = 1,
                      strict_truncation: bool = False,
                      sampler: Optional[GainSampler] = None) -> OutageEstimate:
    s = _get_sampler(sampler, seed, n, threads, strict_truncation)
    fails = int(np.count_nonzero(snr_scale(hop, L, psi) * s.hop_gains(hop, hop_index) < gamma_th))
    return OutageEstimate(fails / s.n, s.n, fails, s.seed, gamma_th)


def conditional_outage(hop_s: HopConfig, hop_d: HopConfig, L_s: float, L_d: float,
                       psi_s: float, psi_d: float, gamma_th: float, n: int, seed: int, *,
                       threads: int = 1, strict_truncation: bool = False,
                       sampler: Optional[GainSampler] = None) -> OutageEstimate:
    """Probability that the weaker hop's SNR falls below ``gamma_th``.

    The two hops use independent pointing draws (eight angles in total).
    Aim for ``n >= 100 / p`` at the probability level of interest.
    """
    s = _get_sampler(sampler, seed, n, threads, strict_truncation)
    gam_s = snr_scale(hop_s, L_s, psi_s) * s.hop_gains(hop_s, CU_HOP)
    gam_d = snr_scale(hop_d, L_d, psi_d) * s.hop_gains(hop_d, UR_HOP)
    fails = int(np.count_nonzero(np.minimum(gam_s, gam_d) < gamma_th))
    return OutageEstimate(fails / s.n, s.n, fails, s.seed, gamma_th)


def path_point_outage(geom: PathGeometry, hop_s: HopConfig, hop_d: HopConfig, theta_R1: float,
                      gamma_th: float, n: int, seed: int, **kwargs) -> OutageEstimate:
    L_s, L_d = link_lengths(theta_R1, geom)
    est = conditional_outage(hop_s, hop_d, L_s, L_d, elevation_angle(L_s, geom.H_u),
                             elevation_angle(L_d, geom.H_u), gamma_th, n, seed, **kwargs)
    return OutageEstimate(est.probability, est.n_samples, est.n_failures, est.seed,
                          est.gamma_th, float(theta_R1))


def worst_case_path_outage(geom: PathGeometry, hop_s: HopConfig, hop_d: HopConfig,
                           gamma_th: float, n: int, seed: int, **kwargs) -> OutageEstimate:
    """Larger of the end-to-end outages at the two extreme path points.

    Each hop is longest at one end of the semicircle (theta = 0 for CU,
    theta = pi for UR), so these are the critical points of the path.
    """
    at_0 = path_point_outage(geom, hop_s, hop_d, 0.0, gamma_th, n, seed, **kwargs)
    at_pi = path_point_outage(geom, hop_s, hop_d, math.pi, gamma_th, n, seed, **kwargs)
    return at_pi if at_pi.probability > at_0.probability else at_0


def max_link_length(hop: HopConfig, gamma_th: float, p_target: float, height: Optional[float],
                    n: int, seed: int, *, hop_index: int = CU_HOP,
                    L_min: Optional[float] = None, L_max: float = 100_000.0,
                    rtol: float = 1e-3, threads: int = 1, strict_truncation: bool = False,
                    sampler: Optional[GainSampler] = None) -> float:
    """Longest link whose single-hop outage stays at or below ``p_target``.

    ``height`` is the UAV altitude above the terminal in metres; the elevation
    then follows the link length as asin(height/L). ``None`` means a
    horizontal sea-level link. Bisection runs in log-length to relative
    tolerance ``rtol``. If even ``L_max`` meets the target, ``L_max`` is
    returned.

    Raises InfeasibleError when the target is already violated at ``L_min``.
    """
    if not 0 < p_target <= 1:
        raise DomainError(f"p_target must be in (0, 1], got {p_target}")
    s = _get_sampler(sampler, seed, n, threads, strict_truncation)
    g = s.hop_gains(hop, hop_index)
    if L_min is None:
        L_min = height * (1.0 + 1e-9) if height else 1.0
    if not 0 < L_min < L_max:
        raise DomainError(f"need 0 < L_min < L_max, got [{L_min}, {L_max}]")

    def outage(L):
        psi = math.asin(min(height / L, 1.0)) if height else 0.0
        return np.count_nonzero(snr_scale(hop, L, psi) * g < gamma_th) / s.n

    grid = np.geomspace(L_min, L_max, 9)
    probe = [outage(L) for L in grid]
    if any(b < a for a, b in zip(probe, probe[1:])):
        raise NumericalError(f"outage not monotone in link length: {probe}")
    if probe[0] > p_target:
        raise InfeasibleError(
            f"outage {probe[0]:.3g} exceeds target {p_target:g} already at L_min={L_min:.1f} m",
            L_min=L_min, L_max=L_max, outage_at_L_min=probe[0], outage_at_L_max=probe[-1])
    if probe[-1] <= p_target:
        return float(L_max)
    i = next(i for i, p in enumerate(probe) if p > p_target)
    lo, hi = grid[i - 1], grid[i]
    while hi / lo - 1.0 > rtol:
        mid = math.sqrt(lo * hi)
        if outage(mid) <= p_target:
            lo = mid
        else:
            hi = mid
    return float(lo)
