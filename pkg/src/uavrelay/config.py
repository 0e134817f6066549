"""Scenario configuration files.

A config is a flat YAML mapping whose keys carry their unit (``f_c_ghz``,
``sigma_uqx_deg``). Every key is optional; an empty file yields the
reference scenario. Unknown keys are rejected. Values stay in file units on
:class:`ScenarioConfig` and are converted to SI once, by
:func:`build_scenario`.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

import yaml

from .antenna import ElementPattern, MisalignmentStats
from .atmosphere import F_MAX_GHZ, AtmosphereParams, CarrierPlan
from .link import noise_power_w
from .optimizer import DesignSpace
from .scenario import Design, Scenario


class ConfigError(ValueError):
    def __init__(self, key: str, expected: str, line: Optional[int] = None, got: Any = None):
        where = f" (line {line})" if line else ""
        msg = f"{key}{where}: expected {expected}"
        if got is not None:
            msg += f", got {got!r}"
        super().__init__(msg)
        self.key, self.expected, self.line = key, expected, line


@dataclass(frozen=True)
class _Key:
    name: str
    default: Any
    kind: str  # float | int | bool | str | floats | ints
    expected: str
    check: Callable[[Any], bool] = lambda v: True


def _pos(v):
    return v > 0


def _nonneg(v):
    return v >= 0


def _grid(lo=None):
    def ok(vs):
        return len(vs) > 0 and (lo is None or all(v >= lo for v in vs))
    return ok


def _even(a, b):
    return tuple(range(a, b + 1, 2))


SCHEMA: Tuple[_Key, ...] = (
    # link budget
    _Key("p_ts_w", 1.0, "float", "CN transmit power in W, > 0", _pos),
    _Key("p_td_w", 0.2, "float", "UAV transmit power toward RA in W, > 0", _pos),
    _Key("f_c_ghz", 70.0, "float", f"carrier in GHz within the model range (0, {F_MAX_GHZ:g})",
         lambda v: 0 < v < F_MAX_GHZ),
    _Key("noise_psd_dbm_hz", -174.0, "float", "noise density in dBm/Hz"),
    _Key("bandwidth_hz", 1e9, "float", "bandwidth in Hz, > 0", _pos),
    _Key("noise_figure_db", 10.0, "float", "noise figure in dB, >= 0", _nonneg),
    _Key("gamma_th_db", 1.0, "float", "outage SNR threshold in dB"),
    _Key("p_out_tr", 1e-3, "float", "outage target in (0, 1]", lambda v: 0 < v <= 1),
    # atmosphere
    _Key("atmosphere_enabled", True, "bool", "true or false"),
    _Key("rho0_g_m3", 7.5, "float", "water-vapour density in g/m^3, > 0", _pos),
    _Key("h_scale_km", 1.5, "float", "scale height in km, > 0", _pos),
    _Key("temperature_c", 20.0, "float", "20 (only the 20 degC sea-level model exists)",
         lambda v: v == 20),
    _Key("ground_height_s_km", 0.0, "float", "CN height above sea level in km, >= 0", _nonneg),
    _Key("ground_height_d_km", 0.0, "float", "RA height above sea level in km, >= 0", _nonneg),
    # geometry
    _Key("l_sd_km", 19.0, "float", "CN-RA distance in km, > 0", _pos),
    _Key("l_u1_km", 3.5, "float", "flight circle diameter in km, > 0", _pos),
    _Key("l_sc_km", 13.0, "float", "CN to circle-centre distance in km, > 0", _pos),
    _Key("h_u_km", 3.0, "float", "UAV altitude in km, > 0", _pos),
    _Key("psi_s_min_deg", 10.0, "float", "degrees in [0, 90)", lambda v: 0 <= v < 90),
    _Key("psi_d_min_deg", 15.0, "float", "degrees in [0, 90)", lambda v: 0 <= v < 90),
    # arrays
    _Key("spacing_wavelengths", 0.5, "float", "element spacing in wavelengths, > 0", _pos),
    _Key("beta_deg", 0.0, "float", "progressive phase in degrees"),
    *(_Key(k, v, "int", "integer >= 1", lambda n: n >= 1) for k, v in (
        ("n_sx", 18), ("n_sy", 18), ("n_dx", 18), ("n_dy", 18),
        ("n_usx", 12), ("n_usy", 18), ("n_udx", 12), ("n_udy", 18))),
    _Key("mu_qw_deg", 0.3, "float", "ground mean misalignment in degrees"),
    _Key("sigma_qw_deg", 0.5, "float", "degrees, > 0", _pos),
    _Key("mu_uqx_deg", 1.7, "float", "UAV along-track mean misalignment in degrees"),
    _Key("mu_uqy_deg", 1.0, "float", "UAV across-track mean misalignment in degrees"),
    _Key("sigma_uqx_deg", 1.5, "float", "degrees, > 0", _pos),
    _Key("sigma_uqy_deg", 0.5, "float", "degrees, > 0", _pos),
    # element pattern
    _Key("g_max_dbi", 8.0, "float", "element peak gain in dBi"),
    _Key("theta_3db_deg", 65.0, "float", "degrees, > 0", _pos),
    _Key("phi_3db_deg", 65.0, "float", "degrees, > 0", _pos),
    _Key("a_m_db", 30.0, "float", "front-back floor in dB, >= 0", _nonneg),
    _Key("sla_db", 30.0, "float", "side-lobe floor in dB, >= 0", _nonneg),
    _Key("element_azimuth_offset_deg", 0.0, "float", "degrees"),
    # estimation
    _Key("samples", 100_000, "int", "integer >= 100", lambda n: n >= 100),
    _Key("seed", 1, "int", "unsigned 64-bit integer", lambda n: 0 <= n < 2 ** 64),
    _Key("path_points", 181, "int", "integer >= 2", lambda n: n >= 2),
    _Key("threads", 1, "int", "integer >= 0 (0 = all cores)", _nonneg),
    _Key("strict_truncation", False, "bool", "true or false"),
    _Key("prune", True, "bool", "true or false"),
    _Key("capacity_unit", "bits", "str", "'bits' or 'nats'", lambda s: s in ("bits", "nats")),
    _Key("l_search_max_km", 100.0, "float", "km, > 0", _pos),
    # command grids
    _Key("atmos_f_min_ghz", 1.0, "float", "GHz, > 0", _pos),
    _Key("atmos_f_max_ghz", 100.0, "float", f"GHz, < {F_MAX_GHZ:g}", lambda v: 0 < v < F_MAX_GHZ),
    _Key("atmos_f_step_ghz", 1.0, "float", "GHz, > 0", _pos),
    _Key("sweep_ls_min_km", 4.0, "float", "km, > 0", _pos),
    _Key("sweep_ls_max_km", 17.0, "float", "km, > 0", _pos),
    _Key("sweep_ls_step_km", 0.5, "float", "km, > 0", _pos),
    _Key("design_n_ground", _even(12, 18), "ints", "non-empty list of integers >= 1", _grid(1)),
    _Key("design_n_uav_x", _even(6, 18), "ints", "non-empty list of integers >= 1", _grid(1)),
    _Key("design_n_uav_y", _even(6, 18), "ints", "non-empty list of integers >= 1", _grid(1)),
    _Key("design_h_u_km", (3.0,), "floats", "non-empty list of km > 0", _grid(1e-9)),
    _Key("design_l_sc_km", tuple(x / 2 for x in range(22, 31)), "floats",
         "non-empty list of km > 0", _grid(1e-9)),
    _Key("outage_map_l_sc_km", tuple(float(x) for x in range(8, 18)), "floats",
         "non-empty list of km > 0", _grid(1e-9)),
    _Key("outage_map_h_u_km", (2.0, 2.5, 3.0, 3.5), "floats", "non-empty list of km > 0",
         _grid(1e-9)),
)

_BY_NAME = {k.name: k for k in SCHEMA}

ScenarioConfig = dataclasses.make_dataclass(
    "ScenarioConfig",
    [(k.name, Any, dataclasses.field(default=k.default)) for k in SCHEMA],
    frozen=True,
)
ScenarioConfig.__module__ = __name__
ScenarioConfig.__doc__ = "Validated scenario settings in file units (see SCHEMA)."


def _coerce(key: _Key, value, line):
    def fail():
        raise ConfigError(key.name, key.expected, line, value)

    if key.kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            fail()
        value = float(value)
        if not math.isfinite(value):
            fail()
    elif key.kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            fail()
    elif key.kind == "bool":
        if not isinstance(value, bool):
            fail()
    elif key.kind == "str":
        if not isinstance(value, str):
            fail()
    elif key.kind in ("floats", "ints"):
        if not isinstance(value, (list, tuple)):
            fail()
        if key.kind == "ints":
            if any(isinstance(v, bool) or not isinstance(v, int) for v in value):
                fail()
            value = tuple(value)
        else:
            if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value):
                fail()
            value = tuple(float(v) for v in value)
    if not key.check(value):
        fail()
    return value


def config_from_dict(data: Optional[Dict], lines: Optional[Dict[str, int]] = None):
    """Validate a mapping and fill in defaults."""
    lines = lines or {}
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError("<root>", "a mapping of key: value pairs", None, type(data).__name__)
    values = {}
    for name, value in data.items():
        key = _BY_NAME.get(name)
        if key is None:
            raise ConfigError(str(name), "a known key (unknown key rejected)", lines.get(name))
        values[name] = _coerce(key, value, lines.get(name))
    cfg = ScenarioConfig(**values)
    _cross_checks(cfg, lines)
    return cfg


def _cross_checks(cfg, lines):
    if not cfg.l_u1_km < cfg.l_sd_km:
        raise ConfigError("l_u1_km", "circle diameter smaller than l_sd_km", lines.get("l_u1_km"),
                          cfg.l_u1_km)
    if not cfg.l_sc_km < cfg.l_sd_km:
        raise ConfigError("l_sc_km", "value smaller than l_sd_km", lines.get("l_sc_km"), cfg.l_sc_km)
    if not cfg.atmos_f_min_ghz <= cfg.atmos_f_max_ghz:
        raise ConfigError("atmos_f_max_ghz", "value >= atmos_f_min_ghz",
                          lines.get("atmos_f_max_ghz"), cfg.atmos_f_max_ghz)
    if not cfg.sweep_ls_min_km < cfg.sweep_ls_max_km:
        raise ConfigError("sweep_ls_max_km", "value > sweep_ls_min_km",
                          lines.get("sweep_ls_max_km"), cfg.sweep_ls_max_km)


def loads_config(text: str):
    node = yaml.compose(text, Loader=yaml.SafeLoader)
    if node is None:
        return config_from_dict({})
    lines = {}
    if isinstance(node, yaml.MappingNode):
        lines = {k.value: k.start_mark.line + 1 for k, _ in node.value}
    return config_from_dict(yaml.safe_load(text), lines)


def load_config(path) -> "ScenarioConfig":
    return loads_config(Path(path).read_text())


def config_to_dict(cfg) -> Dict[str, Any]:
    out = {}
    for k in SCHEMA:
        v = getattr(cfg, k.name)
        out[k.name] = list(v) if isinstance(v, tuple) else v
    return out


def dumps_config(cfg) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)


def save_config(cfg, path) -> None:
    Path(path).write_text(dumps_config(cfg))


def config_hash(cfg, exclude=("threads",)) -> str:
    """SHA-256 over the canonical JSON form, ignoring settings that cannot change results."""
    d = {k: v for k, v in config_to_dict(cfg).items() if k not in exclude}
    return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


def build_scenario(cfg) -> Scenario:
    r = math.radians
    atm = None
    if cfg.atmosphere_enabled:
        atm = AtmosphereParams(cfg.rho0_g_m3, cfg.h_scale_km,
                               cfg.ground_height_s_km, cfg.ground_height_d_km)
    element = ElementPattern(cfg.g_max_dbi, r(cfg.theta_3db_deg), r(cfg.phi_3db_deg),
                             cfg.a_m_db, cfg.sla_db, r(cfg.element_azimuth_offset_deg))
    design = Design(cfg.n_sx, cfg.n_sy, cfg.n_dx, cfg.n_dy,
                    cfg.n_usx, cfg.n_usy, cfg.n_udx, cfg.n_udy,
                    H_u=cfg.h_u_km * 1000.0, L_sc=cfg.l_sc_km * 1000.0)
    return Scenario(
        carrier=CarrierPlan(cfg.f_c_ghz),
        atmosphere=atm,
        element=element,
        p_ts=cfg.p_ts_w,
        p_td=cfg.p_td_w,
        noise_power=noise_power_w(cfg.bandwidth_hz, cfg.noise_figure_db, cfg.noise_psd_dbm_hz),
        spacing_wl=cfg.spacing_wavelengths,
        beta=r(cfg.beta_deg),
        ground_stats=MisalignmentStats.from_degrees(cfg.mu_qw_deg, cfg.mu_qw_deg,
                                                    cfg.sigma_qw_deg, cfg.sigma_qw_deg),
        uav_stats=MisalignmentStats.from_degrees(cfg.mu_uqx_deg, cfg.mu_uqy_deg,
                                                 cfg.sigma_uqx_deg, cfg.sigma_uqy_deg),
        L_sd=cfg.l_sd_km * 1000.0,
        L_u1=cfg.l_u1_km * 1000.0,
        psi_s_min=r(cfg.psi_s_min_deg),
        psi_d_min=r(cfg.psi_d_min_deg),
        gamma_th=10.0 ** (cfg.gamma_th_db / 10.0),
        p_out_tr=cfg.p_out_tr,
        design=design,
        n_samples=cfg.samples,
        seed=cfg.seed,
        path_points=cfg.path_points,
        threads=cfg.threads,
        strict_truncation=cfg.strict_truncation,
        log_base=2.0 if cfg.capacity_unit == "bits" else math.e,
        L_search_max=cfg.l_search_max_km * 1000.0,
    )


def design_space(cfg) -> DesignSpace:
    g = tuple(cfg.design_n_ground)
    return DesignSpace(
        n_sx=g, n_sy=g, n_dx=g, n_dy=g,
        n_usx=tuple(cfg.design_n_uav_x), n_usy=tuple(cfg.design_n_uav_y),
        n_udx=tuple(cfg.design_n_uav_x), n_udy=tuple(cfg.design_n_uav_y),
        H_u=tuple(h * 1000.0 for h in cfg.design_h_u_km),
        L_sc=tuple(l * 1000.0 for l in cfg.design_l_sc_km),
        tie_ground=True, tie_uav=True,
    )
