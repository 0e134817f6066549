import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavrelay.errors import DomainError
from uavrelay.geometry import (PathGeometry, elevation_angle, link_lengths, min_height,
                               path_arrays, path_profile, trapezoid_weights, uav_position)

# symmetric midpoint case, from sqrt(9500^2 + 1750^2 + 2000^2)
SYM_MID_L = 9864.70982847443
SYM_MID_PSI = 0.2041581979574331
# max(11250 sin 10 deg, 11250 sin 15 deg)
SYM_H_MIN = 2911.7142574033583


def sym_geom(H_u=2000.0):
    return PathGeometry(L_sd=19_000.0, L_u1=3500.0, L_sc=9500.0, H_u=H_u)


def test_uav_position_landmarks():
    assert uav_position(0.0, 3500.0) == pytest.approx((1750.0, 0.0))
    x, y = uav_position(math.pi, 3500.0)
    assert x == pytest.approx(-1750.0) and y == pytest.approx(0.0, abs=1e-9)
    x, y = uav_position(math.pi / 2, 3500.0)
    assert x == pytest.approx(0.0, abs=1e-9) and y == pytest.approx(1750.0)
    with pytest.raises(DomainError):
        uav_position(-0.1, 3500.0)
    with pytest.raises(DomainError):
        uav_position(4.0, 3500.0)


def test_link_lengths_endpoints():
    g = PathGeometry(19_000.0, 3500.0, 13_000.0, 3000.0)
    L_s, L_d = link_lengths(0.0, g)
    assert L_s == pytest.approx(math.hypot(13_000 + 1750, 3000))
    assert L_d == pytest.approx(math.hypot(6000 - 1750, 3000))
    L_s, L_d = link_lengths(math.pi, g)
    assert L_s == pytest.approx(math.hypot(13_000 - 1750, 3000))
    assert L_d == pytest.approx(math.hypot(6000 + 1750, 3000))


def test_symmetric_midpoint():
    L_s, L_d = link_lengths(math.pi / 2, sym_geom())
    assert L_s == pytest.approx(SYM_MID_L, abs=1e-6)
    assert L_d == pytest.approx(SYM_MID_L, abs=1e-6)
    assert elevation_angle(L_s, 2000.0) == pytest.approx(SYM_MID_PSI, abs=1e-12)


def test_elevation_landmarks():
    assert elevation_angle(2000.0, 2000.0) == pytest.approx(math.pi / 2)
    assert elevation_angle(4000.0, 2000.0) == pytest.approx(math.pi / 6)
    with pytest.raises(DomainError):
        elevation_angle(1999.0, 2000.0)


def test_min_height():
    r = math.radians
    assert min_height(9500, 9500, 3500, 0.0, 0.0) == 0.0
    assert min_height(9500, 9500, 3500, r(10), r(10)) == pytest.approx(11250 * math.sin(r(10)))
    assert min_height(9500, 9500, 3500, r(10), r(15)) == pytest.approx(SYM_H_MIN, abs=1e-6)
    assert sym_geom().with_placement(H_u=3000.0).H_u == 3000.0
    with pytest.raises(DomainError):
        min_height(9500, 9500, 3500, r(90), 0.0)


def test_geometry_validation():
    with pytest.raises(DomainError):
        PathGeometry(19_000.0, 3500.0, 19_000.0, 3000.0)
    with pytest.raises(DomainError):
        PathGeometry(19_000.0, 3500.0, 13_000.0, -1.0)
    with pytest.raises(DomainError):
        PathGeometry(19_000.0, 20_000.0, 13_000.0, 3000.0)


def test_path_profile():
    g = sym_geom()
    pts = path_profile(g, 2)
    assert [p.theta_R1 for p in pts] == [0.0, math.pi]
    pts = path_profile(g, 181)
    assert pts[1].theta_R1 - pts[0].theta_R1 == pytest.approx(math.pi / 180)
    th, L_s, L_d = path_arrays(g, 181)
    assert np.allclose(L_s, [p.L_s for p in pts]) and np.allclose(L_d, [p.L_d for p in pts])
    with pytest.raises(DomainError):
        path_profile(g, 1)


def test_symmetric_reciprocity():
    th, L_s, L_d = path_arrays(sym_geom(), 37)
    assert np.allclose(L_s, L_d[::-1], rtol=1e-12)


@pytest.mark.parametrize("M", [2, 3, 10, 181])
def test_trapezoid_weights(M):
    w = trapezoid_weights(M)
    assert w.sum() == pytest.approx(1.0, abs=1e-14)
    # integrates (1/pi) * int_0^pi cos^2 = 1/2 exactly for M >= 3
    th = np.linspace(0, math.pi, M)
    if M >= 3:
        assert np.dot(w, np.cos(th) ** 2) == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(theta=st.floats(0.0, math.pi), L_sc=st.floats(3000.0, 15_000.0),
       H=st.floats(100.0, 8000.0))
def test_lengths_exceed_height_and_obey_triangle(theta, L_sc, H):
    g = PathGeometry(19_000.0, 3500.0, L_sc, H)
    L_s, L_d = link_lengths(theta, g)
    assert L_s >= H and L_d >= H
    assert L_s + L_d >= 19_000.0 - 1e-6
