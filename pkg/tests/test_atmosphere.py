import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavrelay.atmosphere import (AtmosphereParams, CarrierPlan, free_space_loss_db,
                                 oxygen_attn_sea_level, sea_level_attn, slant_attn_total,
                                 specific_attn_at_height, total_path_loss_db,
                                 water_attn_sea_level)
from uavrelay.errors import DomainError

# hand-evaluated with plain float arithmetic, frozen before comparison
OXYGEN_57 = 10.424549574535728
OXYGEN_60 = 14.924549574535728
OXYGEN_70 = 0.40432435206681794
WATER_70 = 0.19305258843901052
FSPL_70GHZ_10KM = 149.3497440221685


def test_oxygen_reference_points():
    assert oxygen_attn_sea_level(57.0) == pytest.approx(OXYGEN_57, abs=1e-12)
    assert oxygen_attn_sea_level(60.0) == pytest.approx(OXYGEN_60, abs=1e-12)
    assert oxygen_attn_sea_level(70.0) == pytest.approx(OXYGEN_70, abs=1e-12)


def test_oxygen_continuous_at_57():
    eps = 1e-9
    assert abs(oxygen_attn_sea_level(57 - eps) - oxygen_attn_sea_level(57 + eps)) < 1e-6


def test_oxygen_jump_at_63_is_the_formula_itself():
    below, above = oxygen_attn_sea_level(63 - 1e-9), oxygen_attn_sea_level(63 + 1e-9)
    assert below == pytest.approx(OXYGEN_57 + 1.5 * 6, abs=1e-6)
    assert above == pytest.approx(0.001 * 63 ** 2 * (4.13 / 1.1 + 0.19 / (55.7 ** 2 + 2)), abs=1e-6)


def test_oxygen_vectorised_matches_scalar():
    f = np.array([1.0, 30.0, 57.0, 60.0, 63.0, 70.0, 200.0])
    vec = oxygen_attn_sea_level(f)
    assert vec.shape == f.shape
    assert np.allclose(vec, [oxygen_attn_sea_level(x) for x in f], rtol=0, atol=0)


@pytest.mark.parametrize("f", [0.0, -1.0, 350.0, 400.0])
def test_frequency_out_of_range(f):
    with pytest.raises(DomainError, match="350"):
        oxygen_attn_sea_level(f)
    with pytest.raises(DomainError):
        water_attn_sea_level(f, 7.5)


def test_water_reference_points():
    assert water_attn_sea_level(70.0, 7.5) == pytest.approx(WATER_70, abs=1e-12)
    assert water_attn_sea_level(70.0, 0.0) == 0.0
    with pytest.raises(DomainError):
        water_attn_sea_level(70.0, -1.0)


def test_water_peak_near_22_ghz():
    # the f^2 prefactor pulls the maximum slightly above the 22.2 GHz line centre
    f = np.arange(15.0, 30.0 + 1e-9, 0.01)
    w = water_attn_sea_level(f, 7.5)
    i = int(np.argmax(w))
    assert 0 < i < len(f) - 1
    assert f[i] == pytest.approx(22.63, abs=0.01)


def test_height_scaling():
    atm = AtmosphereParams()
    sl = OXYGEN_70 + WATER_70
    assert specific_attn_at_height(70.0, 0.0, atm) == pytest.approx(sl, rel=1e-12)
    assert specific_attn_at_height(70.0, 1.5, atm) == pytest.approx(sl / math.e, rel=1e-12)
    assert specific_attn_at_height(70.0, 1.5, atm) == pytest.approx(0.2197, abs=1e-4)
    with pytest.raises(DomainError):
        specific_attn_at_height(70.0, -0.1, atm)


def _slant_trapezoid(f, H1, H2, psi, atm, steps=100_000):
    # straight-line integral of the height profile along the slant path
    length = (H2 - H1) / math.sin(psi)
    s = np.linspace(0.0, length, steps + 1)
    h = H1 + s * math.sin(psi)
    y = sea_level_attn(f, atm) * np.exp(-h / atm.h_scale)
    return float(np.sum((y[1:] + y[:-1]) * 0.5 * np.diff(s)))


def test_slant_reference_case():
    atm = AtmosphereParams()
    got = slant_attn_total(70.0, 0.0, 3.0, 0.3, atm)
    assert got == pytest.approx(_slant_trapezoid(70.0, 0.0, 3.0, 0.3, atm), rel=1e-9)


def test_slant_zenith_column():
    atm = AtmosphereParams()
    got = slant_attn_total(70.0, 0.0, 200.0, math.pi / 2, atm)
    assert got == pytest.approx(sea_level_attn(70.0, atm) * atm.h_scale, rel=1e-12)


def test_slant_vanishes_as_heights_merge():
    assert slant_attn_total(70.0, 1.0, 1.0 + 1e-12, 0.5) < 1e-10


@pytest.mark.parametrize("H1,H2,psi", [(0.0, 3.0, 0.0), (3.0, 3.0, 0.3), (3.0, 1.0, 0.3),
                                       (-1.0, 3.0, 0.3), (0.0, 3.0, 2.0)])
def test_slant_domain(H1, H2, psi):
    with pytest.raises(DomainError):
        slant_attn_total(70.0, H1, H2, psi)


@settings(max_examples=60, deadline=None)
@given(f=st.floats(1.0, 340.0), h1=st.floats(0.0, 5.0), dh=st.floats(0.01, 10.0),
       psi=st.floats(0.05, math.pi / 2))
def test_slant_monotone_in_top_height(f, h1, dh, psi):
    a = slant_attn_total(f, h1, h1 + dh, psi)
    b = slant_attn_total(f, h1, h1 + 2 * dh, psi)
    assert 0 <= a <= b


def test_free_space_loss():
    assert free_space_loss_db(70.0, 10_000.0) == pytest.approx(FSPL_70GHZ_10KM, abs=1e-9)
    assert round(float(free_space_loss_db(70.0, 10_000.0)), 2) == 149.35
    diff = free_space_loss_db(70.0, 20_000.0) - free_space_loss_db(70.0, 10_000.0)
    assert diff == pytest.approx(20 * math.log10(2), abs=1e-12)


def test_total_path_loss_variants():
    assert total_path_loss_db(70.0, 10_000.0, atm=None) == pytest.approx(FSPL_70GHZ_10KM, abs=1e-9)
    horiz = total_path_loss_db(70.0, 10_000.0)
    assert horiz == pytest.approx(FSPL_70GHZ_10KM + 10 * (OXYGEN_70 + WATER_70), abs=1e-9)
    slant = total_path_loss_db(70.0, 10_000.0, (0.0, 3.0, math.asin(0.3)))
    assert FSPL_70GHZ_10KM < slant < horiz
    with pytest.raises(DomainError):
        total_path_loss_db(70.0, 0.0)


def test_carrier_plan():
    c = CarrierPlan(70.0)
    assert c.wavelength == pytest.approx(299_792_458.0 / 70e9)
    assert c.wavenumber * c.wavelength == pytest.approx(2 * math.pi)
    assert c.spacing() == pytest.approx(c.wavelength / 2)
    with pytest.raises(DomainError):
        CarrierPlan(400.0)


def test_atmosphere_params_validation():
    with pytest.raises(DomainError):
        AtmosphereParams(h_scale=0.0)
    with pytest.raises(DomainError):
        AtmosphereParams(rho0=-1.0)
